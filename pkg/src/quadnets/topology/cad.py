"""Exact cylindrical decomposition of a real plane curve in a generic chart.

The curve U = 0 is pulled back by a chart change X -> M X and studied in the
affine plane z = 1 with coordinates (x, y). A chart is generic when

* the point (0:1:0) is off the curve (so no vertical asymptotes),
* the real points at infinity are simple roots of U(M(1, t, 0)),
* the discriminant D(x) = Res_y(f, f_y) has only simple real roots.

Under these conditions every real root of D is a single fold (vertical
tangency of order two) and the number of fiber roots changes by exactly two
across it. The fold height is located by horizontal segments that avoid the
curve, so no computation with algebraic x-coordinates is needed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from flint import fmpq, fmpq_poly, fmpz_mpoly_ctx, fmpz_poly

from ..errors import GenericityFailure, InvariantViolation
from ..polys import TernaryForm
from ..roots import (
    bisect_once,
    has_root_closed,
    isolate_real_roots,
    primitive,
    roots_below,
    sign_at,
    simplest_between,
    squarefree_part,
    to_fmpq,
)

_XY = fmpz_mpoly_ctx.get(("x", "y"), "lex")

CHARTS = (
    ((1, 0, 0), (0, 1, 0), (0, 0, 1)),
    ((0, -2, 0), (2, -1, 0), (2, 2, -1)),
    ((-1, 2, -2), (1, 1, -2), (0, -2, 2)),
    ((1, -1, -1), (-2, 1, -1), (0, 1, 2)),
    ((0, -1, 2), (1, 0, -2), (2, -1, 1)),
    ((-1, 2, 2), (0, -2, -1), (-1, 2, 0)),
    ((0, -1, -2), (-2, 0, 1), (0, 0, -1)),
    ((1, -1, -1), (1, 0, 1), (0, 1, 1)),
    ((-1, 0, 0), (0, 2, -2), (2, 1, -2)),
    ((0, 1, 2), (-2, 0, 1), (-2, 0, 0)),
    ((-1, -1, 1), (1, 0, 1), (1, 1, 2)),
    ((-1, -1, 0), (1, 2, -1), (-2, 0, 2)),
    ((-1, 1, 0), (1, 1, -2), (0, 0, 2)),
    ((0, 1, 0), (1, 0, -1), (-1, 0, -2)),
    ((-1, -2, 2), (0, 1, -1), (-2, -1, -2)),
    ((2, -1, 1), (0, 0, 1), (1, -1, 0)),
)

_MAX_FOLD_REFINEMENTS = 400


@dataclass
class Slab:
    """Open vertical strip between consecutive critical x-values."""

    x: Fraction
    fiber: fmpz_poly
    roots: list  # separated isolating intervals of the branches, bottom to top
    gaps: list  # rational y in each sector, bottom to top (len = n + 1)

    @property
    def n(self) -> int:
        return len(self.roots)


@dataclass
class Event:
    """A fold between slab ``index`` and ``index + 1``.

    ``birth`` means two branches appear on the right; ``j`` is the index of
    the lower of the two branches that meet at the fold, counted in the fiber
    with more branches.
    """

    index: int
    x_interval: tuple
    birth: bool
    j: int


@dataclass
class Decomposition:
    chart: tuple
    chart_index: int
    f_cols: list  # coefficients of f in y, as integer polynomials in x
    slabs: list
    events: list
    slopes: list  # isolating intervals of the real points at infinity, t = y/x
    discriminant_roots: list = field(default_factory=list)

    @property
    def n_end(self) -> int:
        return len(self.slopes)


def _fmpz_bivariate(V: TernaryForm):
    Z = V.to_zpoly()
    return _XY.from_dict({(a, b): int(c) for (a, b, _), c in Z.to_dict().items()})


def _columns(f, d: int) -> list:
    cols = [dict() for _ in range(d + 1)]
    for (a, b), c in f.to_dict().items():
        cols[b][a] = int(c)
    return [fmpz_poly([col.get(i, 0) for i in range(max(col, default=-1) + 1)]) for col in cols]


def _univariate_x(p) -> fmpz_poly:
    coeffs = {a: int(c) for (a, b), c in p.to_dict().items()}
    return fmpz_poly([coeffs.get(i, 0) for i in range(max(coeffs, default=-1) + 1)])


def fiber_at(cols: list, x: Fraction) -> fmpz_poly:
    """Integer multiple of f(x, y) as a polynomial in y."""
    q = to_fmpq(x)
    return primitive(fmpq_poly([c(q) for c in cols]).numer())


def horizontal_at(cols: list, y: Fraction) -> fmpz_poly:
    """Integer multiple of f(x, y0) as a polynomial in x."""
    q = to_fmpq(y)
    acc = fmpq_poly([])
    power = fmpq(1)
    for c in cols:
        acc += fmpq_poly(c) * power
        power *= q
    return primitive(acc.numer())


def separate(p: fmpz_poly, intervals: list) -> list:
    """Refine isolating intervals until consecutive ones are strictly disjoint."""
    iv = [tuple(t) for t in intervals]
    changed = True
    while changed:
        changed = False
        for i in range(len(iv) - 1):
            (a1, b1), (a2, b2) = iv[i], iv[i + 1]
            if b1 >= a2:
                if a1 != b1:
                    iv[i] = bisect_once(p, a1, b1)
                if a2 != b2:
                    iv[i + 1] = bisect_once(p, a2, b2)
                changed = True
    return iv


def gap_points(intervals: list) -> list:
    """Simplest rational in each gap below, between and above separated intervals."""
    if not intervals:
        return [Fraction(0)]
    out = [Fraction(math.floor(intervals[0][0]) - 1)]
    for (_, b1), (a2, _) in zip(intervals, intervals[1:]):
        out.append(simplest_between(b1, a2))
    out.append(Fraction(math.floor(intervals[-1][1]) + 1))
    return out


def _fiber_roots(cols: list, x: Fraction):
    p = fiber_at(cols, x)
    return p, separate(p, isolate_real_roots(p))


def _check_chart(V: TernaryForm, d: int):
    """Return (f, cols, D, slopes poly) or a reason string when the chart is not generic."""
    if V.coeffs.get((0, d, 0), 0) == 0:
        return "(0:1:0) lies on the curve"
    h = primitive(fmpq_poly([to_fmpq(V.coeffs.get((d - k, k, 0), 0)) for k in range(d + 1)]).numer())
    if h.degree() != d:
        return "points at infinity degenerate"
    hg = h.gcd(h.derivative())
    if hg.degree() > 0 and isolate_real_roots(hg):
        return "real point at infinity is not simple"
    f = _fmpz_bivariate(V)
    fy = f.derivative(1)
    D = _univariate_x(f.resultant(fy, "y"))
    if D.is_zero():
        return "discriminant vanishes identically"
    Dg = D.gcd(D.derivative())
    if Dg.degree() > 0 and isolate_real_roots(Dg):
        return "discriminant has a multiple real root"
    return f, h, D


def _shrink(D_sq, a, b, exact):
    if exact is not None:
        return (a + exact) / 2, (b + exact) / 2, exact
    a2, b2 = bisect_once(D_sq, a, b)
    if a2 == b2:
        return a, b, a2
    return a2, b2, None


def _locate_fold(cols, D_sq, a, b, n_left, n_right, exact=None):
    """Find the fold index j for the critical value in (a, b).

    ``exact`` is the critical value itself when it is rational.
    """
    for _ in range(_MAX_FOLD_REFINEMENTS):
        left_p, left_roots = _fiber_roots(cols, a)
        right_p, right_roots = _fiber_roots(cols, b)
        if len(left_roots) != n_left or len(right_roots) != n_right:
            raise InvariantViolation("fiber count changed inside an isolating interval", stage="topology")
        birth = n_right > n_left
        big_p, big_roots, small_p, small_roots = (
            (right_p, right_roots, left_p, left_roots) if birth else (left_p, left_roots, right_p, right_roots)
        )
        same, shifted, unknown = [], [], []
        for g, y0 in enumerate(gap_points(big_roots)):
            if sign_at(small_p, y0) == 0 or has_root_closed(horizontal_at(cols, y0), a, b):
                unknown.append(g)
                continue
            h = roots_below(small_p, small_roots, y0)
            if h == g:
                same.append(g)
            elif h == g - 2:
                shifted.append(g)
            else:
                raise InvariantViolation("inconsistent horizontal segment", stage="topology")
        if len(unknown) == 1:
            j = unknown[0] - 1
            if same != list(range(0, j + 1)) or shifted != list(range(j + 2, len(big_roots) + 1)):
                raise InvariantViolation("fold position is inconsistent", stage="topology")
            return birth, j, (a, b)
        a, b, exact = _shrink(D_sq, a, b, exact)
    raise GenericityFailure("could not separate the fold from the other branches")


def decompose_chart(U: TernaryForm, k: int):
    """Decomposition in chart ``k`` or a string saying why the chart is not generic."""
    d = U.d
    M = CHARTS[k]
    V = U.transform(M)
    checked = _check_chart(V, d)
    if isinstance(checked, str):
        return checked
    f, h, D = checked
    cols = _columns(f, d)
    D_sq = squarefree_part(D)
    crit = separate(D_sq, isolate_real_roots(D_sq))
    samples = gap_points(crit) if crit else [Fraction(0)]
    slabs = []
    for x in samples:
        p, roots = _fiber_roots(cols, x)
        slabs.append(Slab(x, p, roots, gap_points(roots)))
    slopes = isolate_real_roots(h)
    if slabs[0].n != len(slopes) or slabs[-1].n != len(slopes):
        raise InvariantViolation("end slabs disagree with the points at infinity", stage="topology")
    events = []
    for i, (a, b) in enumerate(crit):
        nl, nr = slabs[i].n, slabs[i + 1].n
        if abs(nl - nr) != 2:
            return f"fiber count jumps by {nr - nl} at a critical value"
        exact = None
        if a == b:
            # rational critical value: open it up to an interval between the slab samples
            exact = a
            a, b = (a + slabs[i].x) / 2, (b + slabs[i + 1].x) / 2
        birth, j, iv = _locate_fold(cols, D_sq, a, b, nl, nr, exact)
        events.append(Event(i, iv, birth, j))
    return Decomposition(M, k, cols, slabs, events, slopes, crit)


def decompose(U: TernaryForm, start: int = 0) -> Decomposition:
    """Try the chart list in order (starting at ``start``) until one is generic."""
    reasons = []
    for step in range(len(CHARTS)):
        k = (start + step) % len(CHARTS)
        out = decompose_chart(U, k)
        if isinstance(out, Decomposition):
            return out
        reasons.append(f"chart {k}: {out}")
    raise GenericityFailure("no generic chart: " + "; ".join(reasons))
