"""The spectral curve det Q_x = 0 of a net and its nonsingularity certificate."""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

import numpy as np
from flint import fmpq, fmpq_mat, fmpq_mpoly_ctx, fmpq_poly

from .errors import IdenticallySingular, InputError
from .forms import Net, as_fraction, corank, evaluate
from .polys import TernaryForm, gradient, monomials

NONSINGULAR, SINGULAR, UNDECIDED = "nonsingular", "singular", "undecided"

_XY = fmpq_mpoly_ctx.get(("x", "y"), "lex")
_XY_HOM = fmpq_mpoly_ctx.get(("x0", "x1"), "lex")

# x-coordinate changes tried in order when certifying; each is applied as X -> M X
CERTIFY_CHARTS = (
    ((1, 0, 0), (0, 1, 0), (0, 0, 1)),
    ((0, 1, 0), (1, 0, 0), (0, 0, 1)),
    ((1, 0, 0), (0, 0, 1), (0, 1, 0)),
    ((1, 1, 0), (0, 1, 0), (0, 0, 1)),
    ((1, 0, 0), (2, 1, 0), (1, 0, 1)),
    ((1, 2, 3), (0, 1, 1), (1, 0, 2)),
)


def spiral_nodes(count: int) -> list[tuple[int, int]]:
    """Integer lattice points along a square spiral around the origin."""
    out = [(0, 0)]
    x = y = 0
    step = 1
    moves = ((1, 0), (0, 1), (-1, 0), (0, -1))
    k = 0
    while len(out) < count:
        for _ in range(2):
            dx, dy = moves[k % 4]
            for _ in range(step):
                x, y = x + dx, y + dy
                out.append((x, y))
            k += 1
        step += 1
    return out[:count]


def interpolate_form(values_at, d: int, seed: int = 0) -> TernaryForm:
    """Recover a degree-d ternary form from exact values at affine nodes (a, b, 1).

    ``values_at(point)`` returns the exact value at a rational 3-vector. Nodes
    follow the lattice spiral; a singular system triggers a seeded redraw.
    """
    mons = monomials(d)
    m = len(mons)
    nodes = [(a, b, 1) for a, b in spiral_nodes(m)]
    rng = np.random.default_rng(seed)
    for _ in range(64):
        A = fmpq_mat(m, m, [a ** i * b ** j * c ** k for (a, b, c) in nodes for (i, j, k) in mons])
        if A.rank() == m:
            break
        nodes = [(int(a), int(b), int(c)) for a, b, c in rng.integers(-3 * d, 3 * d + 1, size=(m, 3))]
    else:
        raise InputError("could not find nonsingular interpolation nodes")
    rhs = fmpq_mat(m, 1, [_fmpq(values_at(p)) for p in nodes])
    sol = A.solve(rhs)
    return TernaryForm(d, {e: as_fraction(sol[i, 0]) for i, e in enumerate(mons)})


def _fmpq(q) -> fmpq:
    q = as_fraction(q)
    return fmpq(q.numerator, q.denominator)


def det_at(net: Net, x: Sequence) -> Fraction:
    return evaluate(net, x).det()


def spectral_form(net: Net, seed: int = 0) -> TernaryForm:
    """U(x) = det Q_x as an exact form of degree N+1."""
    if net.r != 2:
        raise InputError(f"spectral curves are computed for nets (r = 2), got r = {net.r}")
    U = interpolate_form(lambda x: det_at(net, x), net.N + 1, seed)
    if U.is_zero:
        raise IdenticallySingular("det Q_x vanishes identically")
    return U


def corank_at(net: Net, x: Sequence) -> int:
    return corank(evaluate(net, x))


# --- nonsingularity ---------------------------------------------------------


def _affine(form: TernaryForm):
    """Dehomogenise at x2 = 1 into Q[x, y]."""
    acc = {}
    for (a, b, _), c in form.coeffs.items():
        acc[(a, b)] = acc.get((a, b), 0) + fmpq(c.numerator, c.denominator)
    return _XY.from_dict(acc)


def _at_infinity(form: TernaryForm):
    return _XY_HOM.from_dict(
        {(a, b): fmpq(c.numerator, c.denominator) for (a, b, c0), c in form.coeffs.items() if c0 == 0}
    )


def _as_univariate_x(p) -> fmpq_poly:
    coeffs: dict[int, fmpq] = {}
    for (a, b), c in p.to_dict().items():
        assert b == 0
        coeffs[a] = c
    top = max(coeffs, default=-1)
    return fmpq_poly([coeffs.get(i, 0) for i in range(top + 1)])


def _specialise(p, phi: fmpq_poly) -> list[fmpq_poly]:
    """Coefficients in y of p(t, y) with t a root of phi, as residues mod phi."""
    by_y: dict[int, fmpq_poly] = {}
    for (a, b), c in p.to_dict().items():
        by_y.setdefault(b, fmpq_poly([]))
        by_y[b] += fmpq_poly([0] * a + [c])
    top = max(by_y, default=-1)
    out = [divmod(by_y.get(i, fmpq_poly([])), phi)[1] for i in range(top + 1)]
    while out and out[-1].is_zero():
        out.pop()
    return out


def _nf_gcd(f: list, g: list, phi: fmpq_poly) -> list:
    """Monic gcd of two polynomials over the number field Q[t]/phi (phi irreducible)."""

    def inv(a):
        G, s, _ = a.xgcd(phi)
        assert G.degree() == 0
        return s / G.coeffs()[0]

    def strip(h):
        while h and h[-1].is_zero():
            h.pop()
        return h

    f, g = strip(list(f)), strip(list(g))
    while g:
        lead_inv = inv(g[-1])
        r = list(f)
        while len(r) >= len(g):
            q = divmod(r[-1] * lead_inv, phi)[1]
            shift = len(r) - len(g)
            for i, c in enumerate(g):
                r[i + shift] = divmod(r[i + shift] - q * c, phi)[1]
            strip(r)
            if not r:
                break
        f, g = g, r
    if f:
        li = inv(f[-1])
        f = [divmod(c * li, phi)[1] for c in f]
    return f


def _affine_common_zero(parts) -> bool | None:
    """Whether the affine polynomials have a common complex zero; None if elimination degenerates."""
    nonzero = [p for p in parts if not p.is_zero()]
    if not nonzero:
        return True
    if any(p.is_constant() for p in nonzero):
        return False
    resultants = []
    for i in range(len(nonzero)):
        for j in range(i + 1, len(nonzero)):
            if nonzero[i].degrees()[1] == 0 and nonzero[j].degrees()[1] == 0:
                R = nonzero[i].gcd(nonzero[j])
            else:
                R = nonzero[i].resultant(nonzero[j], "y")
            if not R.is_zero():
                resultants.append(_as_univariate_x(R))
    if not resultants:
        if len(nonzero) == 1:
            return True
        return None
    G = resultants[0]
    for R in resultants[1:]:
        G = G.gcd(R)
    if G.degree() <= 0:
        return False
    for phi, _ in G.factor()[1]:
        specialised = [_specialise(p, phi) for p in nonzero]
        h: list = []
        for s in specialised:
            h = _nf_gcd(h, s, phi) if h else s
        if not h or len(h) > 1:
            return True
    return False


def certify_nonsingular(U: TernaryForm) -> str:
    """Decide whether U and its partial derivatives have a common projective zero."""
    if U.d < 2:
        raise InputError("certification requires degree at least 2")
    for M in CERTIFY_CHARTS:
        V = U.transform(M)
        grads = gradient(V)
        affine = _affine_common_zero([_affine(g) for g in grads])
        if affine is None:
            continue
        if affine:
            return SINGULAR
        inf = [_at_infinity(g) for g in grads]
        h = _XY_HOM.from_dict({})
        for b in inf:
            h = b if h.is_zero() else (h.gcd(b) if not b.is_zero() else h)
        if h.is_zero() or h.total_degree() > 0:
            return SINGULAR
        return NONSINGULAR
    return UNDECIDED
