"""Dixon's determinantal roundtrip for a net with nonsingular spectral curve.

The first row of adj Q_x gives forms v_11, ..., v_1d of degree d-1. The rest
of the symmetric matrix [v_rs] is recovered from v_1r v_1s = v_11 v_rs - U w
by exact linear algebra; its algebraic complements are divisible by U^(d-2)
and the quotients form a symmetric matrix of linear forms with determinant a
constant multiple of U.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from flint import fmpq, fmpq_mat

from .errors import DegenerateRow, NonUniqueSolution, NonzeroRemainder, NoSolution, SingularInput
from .forms import Net, SymmetricForm, as_fraction, fraction_to_json
from .polys import QCTX, TernaryForm, from_mpoly, monomials
from .spectral import NONSINGULAR, certify_nonsingular, interpolate_form, spectral_form

# deterministic basis changes of R^{N+1} tried when the first adjugate row degenerates
def _basis_changes(n: int):
    yield None
    for k in range(1, 4):
        for shift in range(1, n):
            T = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
            for i in range(n):
                T[i][(i + shift) % n] += k
            yield T


@dataclass
class SectionRow:
    d: int
    forms: list  # v_11, ..., v_1d
    basis: list | None = None  # congruence T applied to the net, Q_x -> T^t Q_x T

    def to_json(self) -> dict:
        return {"d": self.d, "row": [f.to_json() for f in self.forms],
                "basis": None if self.basis is None else [[fraction_to_json(v) for v in r] for r in self.basis]}


@dataclass
class VMatrix:
    d: int
    v: list  # d x d symmetric, degree d-1 forms
    w: dict = field(default_factory=dict)  # (r, s) -> witness of degree d-2


@dataclass
class LinearMatrix:
    d: int
    beta: list  # d x d symmetric, linear forms
    c: Fraction | None = None

    def to_json(self) -> dict:
        return {
            "d": self.d,
            "beta": [[[fraction_to_json(b.coeffs.get(e, Fraction(0))) for e in ((1, 0, 0), (0, 1, 0), (0, 0, 1))]
                      for b in row] for row in self.beta],
            "c": None if self.c is None else fraction_to_json(self.c),
        }


def _congruent(net: Net, T) -> Net:
    if T is None:
        return net
    n = net.N + 1
    out = []
    for m in net.members:
        A = m.entries
        out.append(SymmetricForm([[sum(T[k][i] * A[k][l] * T[l][j] for k in range(n) for l in range(n))
                                   for j in range(n)] for i in range(n)]))
    return Net(tuple(out))


def _cofactor_row(net: Net, x, row: int = 0) -> list:
    Q = net.evaluate(x).entries
    n = len(Q)
    out = []
    for i in range(n):
        minor = [[Q[r][c] for c in range(n) if c != row] for r in range(n) if r != i]
        det = fmpq_mat([[fmpq(v.numerator, v.denominator) for v in r] for r in minor]).det() if n > 1 else fmpq(1)
        out.append(Fraction(int(det.p), int(det.q)) * (-1) ** (i + row))
    return out


def _gcd_trivial(a: TernaryForm, b: TernaryForm) -> bool:
    return a.to_mpoly().gcd(b.to_mpoly()).total_degree() == 0


def adjugate_row(net: Net, U: TernaryForm, seed: int = 0) -> SectionRow:
    """First row of adj Q_x as forms of degree d-1, after a basis change if it degenerates."""
    d = net.N + 1
    for T in _basis_changes(d):
        moved = _congruent(net, T)
        cache = {}

        def entry(x, i, moved=moved, cache=cache):
            key = tuple(x)
            if key not in cache:
                cache[key] = _cofactor_row(moved, x)
            return cache[key][i]

        forms = [interpolate_form(lambda x, i=i: entry(x, i), d - 1, seed) for i in range(d)]
        if any(f.is_zero for f in forms):
            continue
        if not _gcd_trivial(forms[0], U):
            continue
        return SectionRow(d, forms, T)
    raise DegenerateRow("every tried basis gives a vanishing entry or v_11 sharing a factor with U")


def _solve_entry(v1r, v1s, v11, U, d):
    """Unique (v_rs, w) with v_1r v_1s = v_11 v_rs - U w."""
    mons_v, mons_w = monomials(d - 1), monomials(d - 2)
    target = monomials(2 * d - 2)
    row = {e: i for i, e in enumerate(target)}
    cols = []
    g = QCTX.gens()

    def mono(e):
        return g[0] ** e[0] * g[1] ** e[1] * g[2] ** e[2]

    P11, PU = v11.to_mpoly(), U.to_mpoly()
    for e in mons_v:
        cols.append((P11 * mono(e)).to_dict())
    for e in mons_w:
        cols.append((-PU * mono(e)).to_dict())
    A = fmpq_mat(len(target), len(cols))
    for j, col in enumerate(cols):
        for e, c in col.items():
            A[row[tuple(e)], j] = c
    rhs_poly = (v1r.to_mpoly() * v1s.to_mpoly()).to_dict()
    b = fmpq_mat(len(target), 1)
    for e, c in rhs_poly.items():
        b[row[tuple(e)], 0] = c
    rank = A.rank()
    aug = fmpq_mat(len(target), len(cols) + 1)
    for i in range(len(target)):
        for j in range(len(cols)):
            aug[i, j] = A[i, j]
        aug[i, len(cols)] = b[i, 0]
    if aug.rank() > rank:
        raise NoSolution("v_1r v_1s is not congruent to a multiple of v_11 modulo U")
    if rank < len(cols):
        raise NonUniqueSolution(f"kernel of dimension {len(cols) - rank}: v_11 and U are not coprime")
    # full column rank: solve the normal equations exactly
    At = A.transpose()
    sol = (At * A).solve(At * b)
    vals = [as_fraction(sol[j, 0]) for j in range(len(cols))]
    v = TernaryForm(d - 1, {e: vals[j] for j, e in enumerate(mons_v)})
    w = TernaryForm(d - 2, {e: vals[len(mons_v) + j] for j, e in enumerate(mons_w)})
    return v, w


def complete_v_matrix(row: SectionRow, U: TernaryForm) -> VMatrix:
    d = row.d
    v11 = row.forms[0]
    if not _gcd_trivial(v11, U):
        raise NonUniqueSolution("v_11 and U share a factor")
    v = [[None] * d for _ in range(d)]
    for s in range(d):
        v[0][s] = v[s][0] = row.forms[s]
    w = {}
    for r in range(1, d):
        for s in range(r, d):
            vrs, wrs = _solve_entry(row.forms[r], row.forms[s], v11, U, d)
            v[r][s] = v[s][r] = vrs
            w[(r, s)] = wrs
    vm = VMatrix(d, v, w)
    for (r, s), wrs in w.items():
        lhs = v[0][r] * v[0][s]
        rhs = v11 * v[r][s] - U * wrs if d > 2 else v11 * v[r][s]
        if lhs != rhs:
            raise NoSolution(f"identity fails for entry ({r + 1}, {s + 1})")
    return vm


def _det(rows):
    """Determinant of a square matrix of polynomials, by Laplace along the first row."""
    n = len(rows)
    if n == 1:
        return rows[0][0]
    total = rows[0][0] * 0
    for j in range(n):
        if rows[0][j].is_zero():
            continue
        minor = [[rows[i][k] for k in range(n) if k != j] for i in range(1, n)]
        term = rows[0][j] * _det(minor)
        total = total + term if j % 2 == 0 else total - term
    return total


def dixon_matrix(vm: VMatrix, U: TernaryForm) -> LinearMatrix:
    """beta_rs = (algebraic complement of v_rs) / U^(d-2), with exact division."""
    d = vm.d
    P = [[vm.v[i][j].to_mpoly() for j in range(d)] for i in range(d)]
    Upow = U.to_mpoly() ** (d - 2)
    beta = [[None] * d for _ in range(d)]
    for r in range(d):
        for s in range(r, d):
            minor = [[P[i][j] for j in range(d) if j != s] for i in range(d) if i != r]
            A = _det(minor) * (-1) ** (r + s)
            q, rem = divmod(A, Upow)
            if not rem.is_zero():
                raise NonzeroRemainder(f"complement ({r + 1}, {s + 1}) is not divisible by U^{d - 2}")
            beta[r][s] = beta[s][r] = from_mpoly(q, 1)
    detb = _det([[b.to_mpoly() for b in row] for row in beta])
    c = _proportionality(from_mpoly(detb, d), U)
    if c is None or c == 0:
        raise NonzeroRemainder("det beta is not a nonzero constant multiple of U")
    return LinearMatrix(d, beta, c)


def _proportionality(A: TernaryForm, U: TernaryForm):
    if A.is_zero:
        return Fraction(0)
    e0, u0 = next(iter(U.coeffs.items()))
    c = A.coeffs.get(e0, Fraction(0)) / u0
    return c if A == U * c else None


@dataclass
class RoundtripReport:
    c: Fraction
    row: SectionRow
    vmatrix: VMatrix
    beta: LinearMatrix
    identities_ok: bool
    recovers_net: bool = False  # beta is the (basis-changed) net itself

    def to_json(self) -> dict:
        return {
            "kind": "dixon",
            "d": self.row.d,
            "c": fraction_to_json(self.c),
            "identities_ok": self.identities_ok,
            "recovers_net": self.recovers_net,
            "row": self.row.to_json(),
            "beta": self.beta.to_json()["beta"],
        }


def verify_roundtrip(net: Net, seed: int = 0) -> RoundtripReport:
    U = spectral_form(net, seed)
    if certify_nonsingular(U) != NONSINGULAR:
        raise SingularInput("spectral curve is not certified nonsingular", stage="dixon")
    row = adjugate_row(net, U, seed)
    vm = complete_v_matrix(row, U)
    lm = dixon_matrix(vm, U)
    return RoundtripReport(lm.c, row, vm, lm, True, _recovers(net, row.basis, lm))


def _recovers(net: Net, T, lm: LinearMatrix) -> bool:
    moved = _congruent(net, T)
    axes = ((1, 0, 0), (0, 1, 0), (0, 0, 1))
    return all(lm.beta[i][j].coeffs.get(e, Fraction(0)) == m.entries[i][j]
               for e, m in zip(axes, moved.members) for i in range(lm.d) for j in range(lm.d))
