"""Kronecker parity of an empty regular intersection of three conics.

The parity is the number of real solutions of q_a = q_b = 0 with q_c > 0
modulo 2, read on label triples for which q_a and q_b meet transversally (so
that the direction of c is a regular value). The two-conic system is solved
exactly: after a rational change of coordinates the solutions are the roots
of Res_y(q_a, q_b) and y is read off the first subresultant.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

from flint import fmpq_mat, fmpq_mpoly_ctx, fmpq_poly

from ..errors import DegenerateSystem, InputError
from ..forms import Net
from ..roots import RealAlgebraic, isolate_real_roots, primitive, to_fmpq

DEFAULT_TRIPLES = (
    ((1, 0, 0), (0, 1, 0), (0, 0, 1)),
    ((0, 1, 0), (0, 0, 1), (1, 0, 0)),
    ((1, 1, 0), (0, 1, 1), (1, 0, 1)),
    ((1, -1, 0), (1, 1, 1), (0, 1, -2)),
)


@dataclass
class TripleSolve:
    labels: tuple
    solutions: int  # distinct real solutions of q_a = q_b = 0
    positive: int  # ... of which q_c > 0
    transversal: bool  # all intersections simple

    def to_json(self) -> dict:
        return {
            "labels": [[str(Fraction(v)) for v in lab] for lab in self.labels],
            "real_solutions": self.solutions,
            "positive": self.positive,
            "transversal": self.transversal,
        }


@dataclass
class KroneckerResult:
    parity: int
    triples: list = field(default_factory=list)

    @property
    def positive(self) -> int:
        return self.triples[0].positive

    def to_json(self) -> dict:
        return {"kind": "kronecker", "parity": self.parity, "triples": [t.to_json() for t in self.triples]}


_R = fmpq_mpoly_ctx.get(("x", "y"), "lex")


def _member(net: Net, c):
    return [[sum(Fraction(ci) * m.entries[i][j] for ci, m in zip(c, net.members)) for j in range(3)]
            for i in range(3)]


def _poly(Q, M):
    """Q(M (x, y, 1)) as a polynomial in x, y."""
    x, y = _R.gens()
    v = [to_fmpq(M[i][0]) * x + to_fmpq(M[i][1]) * y + to_fmpq(M[i][2]) for i in range(3)]
    return sum((to_fmpq(Q[i][j]) * v[i] * v[j] for i in range(3) for j in range(3) if Q[i][j] != 0), _R.constant(0))


def _coeffs_y(p):
    """Coefficients of y^0, y^1, y^2 as univariate polynomials in x."""
    out = [dict(), dict(), dict()]
    for (ex, ey), c in p.to_dict().items():
        out[ey][ex] = c
    return [fmpq_poly([d.get(i, 0) for i in range(max(d, default=-1) + 1)]) for d in out]


def _univariate(p) -> fmpq_poly:
    d = {ex: c for (ex, ey), c in p.to_dict().items()}
    return fmpq_poly([d.get(i, 0) for i in range(max(d, default=-1) + 1)])


def _binary(Q, M, col_x, col_y):
    """Q restricted to the line z = 0 in the new coordinates, as a polynomial in t = x / y."""
    a = sum(Q[i][j] * M[i][col_x] * M[j][col_x] for i in range(3) for j in range(3))
    b = sum(2 * Q[i][j] * M[i][col_x] * M[j][col_y] for i in range(3) for j in range(3))
    c = sum(Q[i][j] * M[i][col_y] * M[j][col_y] for i in range(3) for j in range(3))
    return fmpq_poly([to_fmpq(c), to_fmpq(b), to_fmpq(a)])


def _transforms():
    rng = range(-2, 3)
    for entries in itertools.product(rng, repeat=6):
        M = [[1, entries[0], entries[1]], [entries[2], 1, entries[3]], [entries[4], entries[5], 1]]
        if fmpq_mat(M).det() != 0:
            yield M


def _solve(Qa, Qb, Qc, M):
    """Real solutions of Qa = Qb = 0 with multiplicities and q_c signs, or None for a bad chart."""
    A, B, C = _poly(Qa, M), _poly(Qb, M), _poly(Qc, M)
    a0, a1, a2 = _coeffs_y(A)
    b0, b1, b2 = _coeffs_y(B)
    if a2.degree() != 0 or b2.degree() != 0:
        return None
    # no common zero on the line at infinity
    inf_a, inf_b = _binary(Qa, M, 0, 1), _binary(Qb, M, 0, 1)
    if inf_a.is_zero() or inf_b.is_zero() or inf_a.gcd(inf_b).degree() > 0:
        return None
    R = _univariate(A.resultant(B, "y"))
    if R.degree() != 4:
        return None
    s1 = b2 * a1 - a2 * b1
    s0 = b2 * a0 - a2 * b0
    c0, c1, c2 = _coeffs_y(C)
    P = c2 * s0 * s0 - c1 * s0 * s1 + c0 * s1 * s1
    # regularity: no common complex zero of all three conics
    out = []
    _, factors = primitive(R.numer()).factor()
    for f, mult in factors:
        for lo, hi in isolate_real_roots(f):
            alpha = RealAlgebraic(f, lo, hi)
            sp = alpha.sign_of(P)
            if alpha.sign_of(s1) == 0:
                # A(alpha, y) and B(alpha, y) proportional: one point only if A has a double root in y
                if alpha.sign_of(a1 * a1 - 4 * a0 * a2) != 0:
                    return None
                sp = alpha.sign_of(c2 * a1 * a1 - 2 * c1 * a1 * a2 + 4 * c0 * a2 * a2)
            if sp == 0:
                raise DegenerateSystem("q_c vanishes at a common zero of q_a, q_b")
            out.append((int(mult), sp))
    return out


def solve_triple(net: Net, a, b, c) -> TripleSolve:
    """Exact real solutions of q_a = q_b = 0 and the sign of q_c at each of them."""
    if fmpq_mat([[to_fmpq(v) for v in row] for row in (a, b, c)]).det() == 0:
        raise InputError("labels are collinear points of the net plane")
    Qa, Qb, Qc = _member(net, a), _member(net, b), _member(net, c)
    for M in _transforms():
        sols = _solve(Qa, Qb, Qc, M)
        if sols is not None:
            break
    else:
        raise DegenerateSystem("no admissible chart for the two-conic system")
    return TripleSolve((a, b, c), len(sols), sum(1 for _, s in sols if s > 0), all(m == 1 for m, _ in sols))


def kronecker_parity(net: Net, labels=None, triples=None) -> KroneckerResult:
    """Parity of #{q_a = q_b = 0, q_c > 0}, required to agree over all transversal label triples."""
    if net.N != 2 or net.r != 2:
        raise InputError("Kronecker parity is defined for nets of conics (N = r = 2)")
    choices = [labels] if labels is not None else list(triples or DEFAULT_TRIPLES)
    solved = [solve_triple(net, *t) for t in choices]
    parities = {t.positive % 2 for t in solved if t.transversal}
    if not parities:
        raise DegenerateSystem("no label triple with transversal intersection")
    if len(parities) != 1:
        raise DegenerateSystem("Kronecker parity depends on the label triple: the net is not regular")
    return KroneckerResult(parities.pop(), solved)
