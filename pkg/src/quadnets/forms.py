"""Quadratic forms, linear systems of quadrics, and exact inertia."""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, NamedTuple, Sequence

import numpy as np
from flint import fmpq, fmpq_mat

from .errors import DegenerateInput, InputError


def as_fraction(value) -> Fraction:
    """Parse an integer, a Fraction or a ``"p/q"`` string."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise InputError(f"not a rational: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError(f"not a rational: {value!r}") from exc
    if hasattr(value, "p") and hasattr(value, "q"):  # flint.fmpq
        return Fraction(int(value.p), int(value.q))
    raise InputError(f"not a rational: {value!r}")


def qmat(rows) -> fmpq_mat:
    """flint rational matrix from nested sequences of rationals."""
    rows = [list(r) for r in rows]
    flat = [as_fraction(v) for r in rows for v in r]
    return fmpq_mat(len(rows), len(rows[0]) if rows else 0, [fmpq(v.numerator, v.denominator) for v in flat])


def fraction_to_json(q: Fraction):
    return q.numerator if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


class Inertia(NamedTuple):
    positive: int
    zero: int
    negative: int


@dataclass(frozen=True)
class SymmetricForm:
    """Symmetric n x n matrix with exact rational entries."""

    entries: tuple

    def __post_init__(self):
        rows = tuple(tuple(as_fraction(v) for v in row) for row in self.entries)
        n = len(rows)
        if any(len(row) != n for row in rows):
            raise InputError("matrix is not square")
        for i in range(n):
            for j in range(i):
                if rows[i][j] != rows[j][i]:
                    raise InputError(f"matrix is not symmetric at ({i},{j})")
        object.__setattr__(self, "entries", rows)

    @property
    def n(self) -> int:
        return len(self.entries)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def __neg__(self):
        return SymmetricForm(tuple(tuple(-v for v in row) for row in self.entries))

    def to_numpy(self) -> np.ndarray:
        return np.array([[float(v) for v in row] for row in self.entries])

    def congruent(self, S: Sequence[Sequence]) -> "SymmetricForm":
        """Return S^T Q S."""
        S = [[as_fraction(v) for v in row] for row in S]
        n, m = self.n, len(S[0])
        QS = [[sum(self.entries[i][k] * S[k][j] for k in range(n)) for j in range(m)] for i in range(n)]
        return SymmetricForm(
            tuple(tuple(sum(S[k][i] * QS[k][j] for k in range(n)) for j in range(m)) for i in range(m))
        )

    def quad(self, u: Sequence) -> Fraction:
        u = [as_fraction(v) for v in u]
        return sum(self.entries[i][j] * u[i] * u[j] for i in range(self.n) for j in range(self.n))

    def det(self) -> Fraction:
        return as_fraction(qmat(self.entries).det())


def _symmetric_inertia(rows, sign: Callable, magnitude: Callable | None = None) -> Inertia:
    """Congruence diagonalisation of a symmetric matrix.

    ``sign`` maps an entry to -1, 0 or 1. With ``magnitude`` given, pivots are
    chosen by largest magnitude; otherwise the first admissible pivot is used.
    When every diagonal entry vanishes a 2x2 block [[0, a], [a, 0]] is split
    off; such a block has inertia (1, 0, 1).
    """
    A = [list(r) for r in rows]
    pos = neg = zero = 0
    while A:
        m = len(A)
        signs = [sign(A[i][i]) for i in range(m)]
        diag = [i for i in range(m) if signs[i] != 0]
        if diag:
            k = max(diag, key=lambda i: magnitude(A[i][i])) if magnitude else diag[0]
            if signs[k] > 0:
                pos += 1
            else:
                neg += 1
            order = [k] + [i for i in range(m) if i != k]
            A = [[A[i][j] for j in order] for i in order]
            p = A[0][0]
            col = [A[i][0] / p for i in range(1, m)]
            A = [
                [A[i][j] - col[i - 1] * A[0][j] for j in range(1, m)]
                for i in range(1, m)
            ]
            continue
        off = [(i, j) for i in range(m) for j in range(i + 1, m) if sign(A[i][j]) != 0]
        if not off:
            zero += m
            break
        i0, j0 = max(off, key=lambda ij: magnitude(A[ij[0]][ij[1]])) if magnitude else off[0]
        pos += 1
        neg += 1
        order = [i0, j0] + [i for i in range(m) if i not in (i0, j0)]
        A = [[A[i][j] for j in order] for i in order]
        a = A[0][1]
        A = [
            [A[r][c] - (A[r][0] * A[1][c] + A[r][1] * A[0][c]) / a for c in range(2, m)]
            for r in range(2, m)
        ]
    return Inertia(pos, zero, neg)


def _fraction_sign(q) -> int:
    return (q > 0) - (q < 0)


def inertia(Q: SymmetricForm) -> Inertia:
    """Exact signature of ``Q`` by Sylvester's law of inertia."""
    return _symmetric_inertia(Q.entries, _fraction_sign, abs)


def corank(Q: SymmetricForm) -> int:
    return inertia(Q).zero


@dataclass(frozen=True)
class Net:
    """Linear system x -> Q_x = sum x_i Q_i of quadrics in P^N.

    ``members`` holds r+1 symmetric (N+1) x (N+1) forms; they must be linearly
    independent so that the map x -> Q_x is injective.
    """

    members: tuple

    def __post_init__(self):
        members = tuple(m if isinstance(m, SymmetricForm) else SymmetricForm(m) for m in self.members)
        if len(members) < 1:
            raise InputError("a linear system needs at least one member")
        n = members[0].n
        if any(m.n != n for m in members):
            raise InputError("members have different sizes")
        object.__setattr__(self, "members", members)
        vectors = [[m.entries[i][j] for i in range(n) for j in range(i, n)] for m in members]
        rank = qmat(vectors).rank()
        if rank < len(members):
            raise DegenerateInput("members are linearly dependent (x -> q_x is not injective)", stage="forms")

    @property
    def N(self) -> int:
        return self.members[0].n - 1

    @property
    def r(self) -> int:
        return len(self.members) - 1

    def evaluate(self, x: Sequence) -> SymmetricForm:
        return evaluate(self, x)

    def matrices_float(self) -> np.ndarray:
        return np.array([m.to_numpy() for m in self.members])

    def transformed(self, T: Sequence[Sequence]) -> "Net":
        """Net obtained by the basis change x -> T x of the parameter space."""
        T = [[as_fraction(v) for v in row] for row in T]
        k = self.r + 1
        return Net(tuple(evaluate(self, [T[i][j] for i in range(k)]) for j in range(k)))

    def to_json(self) -> dict:
        return {
            "N": self.N,
            "r": self.r,
            "matrices": [[[fraction_to_json(v) for v in row] for row in m.entries] for m in self.members],
        }

    @classmethod
    def from_json(cls, data: dict) -> "Net":
        try:
            N, r, mats = int(data["N"]), int(data["r"]), data["matrices"]
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"malformed net description: {exc}") from exc
        if len(mats) != r + 1:
            raise InputError(f"expected {r + 1} matrices, got {len(mats)}")
        net = cls(tuple(SymmetricForm(tuple(tuple(row) for row in m)) for m in mats))
        if net.N != N:
            raise InputError(f"matrices have size {net.N + 1}, expected {N + 1}")
        return net


def evaluate(net: Net, x: Sequence) -> SymmetricForm:
    """Exact value of x -> sum x_i Q_i."""
    x = [as_fraction(v) for v in x]
    if len(x) != net.r + 1:
        raise InputError(f"parameter vector must have length {net.r + 1}")
    if all(v == 0 for v in x):
        raise InputError("parameter vector is zero")
    n = net.N + 1
    return SymmetricForm(
        tuple(
            tuple(sum(xi * m.entries[i][j] for xi, m in zip(x, net.members) if xi) for j in range(n))
            for i in range(n)
        )
    )


def load_net(path) -> Net:
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InputError(f"{path}: invalid JSON ({exc})") from exc
    return Net.from_json(data)


def dump_net(net: Net, path) -> None:
    with open(path, "w") as fh:
        json.dump(net.to_json(), fh, indent=1)
        fh.write("\n")


def random_symmetric(n: int, rng: np.random.Generator, bound: int = 5) -> SymmetricForm:
    A = rng.integers(-bound, bound + 1, size=(n, n))
    A = np.triu(A) + np.triu(A, 1).T
    return SymmetricForm(tuple(tuple(int(v) for v in row) for row in A))


def random_net(N: int, rng: np.random.Generator, r: int = 2, bound: int = 5) -> Net:
    """Random net with integer entries in [-bound, bound]; redrawn until injective."""
    while True:
        try:
            return Net(tuple(random_symmetric(N + 1, rng, bound) for _ in range(r + 1)))
        except DegenerateInput:
            continue
