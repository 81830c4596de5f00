"""Extremal examples: Hilbert-type curves with many deep ovals and the inductive
one-dimensional intersections of quadrics with the maximal number of components.

Small parameters are found by halving from 1/8 until a validation predicate
passes; the predicate always recomputes the relevant topology from scratch.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from fractions import Fraction

import numpy as np

from .errors import InputError, InvariantViolation, QuadnetsError, SearchExhausted
from .forms import SymmetricForm, fraction_to_json
from .polys import TernaryForm, eval_form, linear
from .roots import sign
from .spectral import NONSINGULAR, certify_nonsingular
from .topology.curve import check_bezout, curve_topology
from .oracle.components import count_components_curve
from .oracle.tower import count_components_tower

START = Fraction(1, 8)
FLOOR = Fraction(1, 2 ** 64)
HILBERT_FLOOR = Fraction(1, 2 ** 128)
HARNACK_FLOOR = Fraction(1, 2 ** 256)
HARNACK_CAP = 5
HILBERT_CAP = 8


def harnack_count(N: int) -> int:
    return 2 ** (N - 2) * (N - 3) + 2 if N > 2 else 1


def genus_check(N: int) -> int:
    """Genus of a regular complete intersection of N-1 quadrics in P^N."""
    if N < 2:
        raise InputError("N must be at least 2")
    if N == 2:
        return 0
    return 2 ** (N - 2) * (N - 3) + 1


def _halving(start: Fraction, floor: Fraction):
    e = start
    while e >= floor:
        yield e
        e /= 2


def _exponent(q: Fraction) -> int:
    """Largest k with 2^-k >= q."""
    k = 0
    while Fraction(1, 2 ** (k + 1)) >= q:
        k += 1
    return k


def _bisect_exponent(ok, lo: int, hi: int):
    """Smallest k in [lo, hi] with ok(k), for a predicate that holds from some k on; None if ok(hi) fails."""
    if not ok(hi):
        return None
    while lo < hi:
        mid = (lo + hi) // 2
        if ok(mid):
            hi = mid
        else:
            lo = mid + 1
    return hi


# ---------------------------------------------------------------------------
# Hilbert curves

# the ellipse p_E = x0^2 + x1^2 - x2^2 and its rational parametrisation
P_E = TernaryForm(2, {(2, 0, 0): 1, (0, 2, 0): 1, (0, 0, 2): -1})
ODD_SEED_LINE = (Fraction(1), Fraction(0), Fraction(2))  # x0 + 2 x2 = 0 misses E
BASE_POINTS = {2: (-2, -1, 1, 2), 3: (-3, -2, -1, 1, 2, 3)}


def ellipse_point(t) -> tuple:
    t = Fraction(t)
    return (1 - t * t, 2 * t, 1 + t * t)


def chord(s, t) -> tuple:
    """Line through the points of E with parameters s and t, scaled to max coefficient 1."""
    a, b = ellipse_point(s), ellipse_point(t)
    v = [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
    m = max(abs(c) for c in v)
    return tuple(c / m for c in v)


def hilbert_target(d: int) -> int:
    """Number of ovals of depth [d/2] - 1 in the construction."""
    if d < 4:
        raise InputError("Hilbert curves start at degree 4")
    k = d // 2
    if d == 4:
        return 4
    if d == 5:
        return 6
    return k * (k + 1) - 3 if d % 2 == 0 else k * (k + 2) - 3


def petrovsky_bound(d: int) -> Fraction:
    k = (d + 1) // 2
    return Fraction(3, 2) * k * (k - 1) + 1


def hilbert_lower_bound(d: int) -> Fraction:
    """The quantity (d-2)(d+4)/4 - 2 that Hilbert curves exceed."""
    return Fraction((d - 2) * (d + 4), 4) - 2


def _line_product(lines) -> TernaryForm:
    out = TernaryForm(0, {(0, 0, 0): 1})
    for l in lines:
        out = out * linear(*l)
    return out


def _seed_disjoint(l) -> bool:
    """Exact check that the line l = 0 misses E: restricted to the line, p_E is definite."""
    a, b, c = l
    # parametrise l = 0 by the kernel basis and test the binary quadratic's discriminant
    if c != 0:
        u, v = (c, 0, -a), (0, c, -b)
    elif b != 0:
        u, v = (b, -a, 0), (0, 0, 1)
    else:
        u, v = (0, 1, 0), (0, 0, 1)
    q = lambda x, y: x[0] * y[0] + x[1] * y[1] - x[2] * y[2]  # noqa: E731
    return q(u, v) ** 2 - q(u, u) * q(v, v) < 0


@dataclass
class HilbertStage:
    degree: int
    params: tuple  # parameters on E of the line/E intersection points
    lines: tuple
    epsilon: Fraction
    depth_counts: dict
    arc: tuple | None = None
    arc_signs: list = field(default_factory=list)
    attempts: int = 0

    def to_json(self) -> dict:
        return {
            "degree": self.degree,
            "points": [fraction_to_json(Fraction(t)) for t in self.params],
            "lines": [_lin_json(l) for l in self.lines],
            "epsilon": fraction_to_json(self.epsilon),
            "depth_counts": {str(k): v for k, v in self.depth_counts.items()},
            "arc": None if self.arc is None else [fraction_to_json(Fraction(t)) for t in self.arc],
            "previous_sign_on_points": self.arc_signs,
            "attempts": self.attempts,
        }


@dataclass
class HilbertRecipe:
    d: int
    form: TernaryForm
    stages: list
    seed_line: tuple | None
    count: int
    validation: dict

    def to_json(self) -> dict:
        return {
            "kind": "hilbert",
            "d": self.d,
            "ellipse": P_E.to_json(),
            "seed_line": None if self.seed_line is None else _lin_json(self.seed_line),
            "stages": [s.to_json() for s in self.stages],
            "form": self.form.to_json(),
            "count": self.count,
            "validation": self.validation,
        }


def _submaximal(topo, d: int) -> int:
    return topo.depth_counts().get(d // 2 - 1, 0)


def _stage_ok(p: TernaryForm, d: int):
    try:
        topo = curve_topology(p, certify=False)
    except QuadnetsError:
        return None
    if d <= 3:
        ok = topo.depth_counts() == {1: 1} and topo.has_one_sided == (d == 3)
    else:
        ok = _submaximal(topo, d) == hilbert_target(d)
    return topo if ok else None


@lru_cache(maxsize=None)
def _hilbert_stages(d: int, floor: Fraction):
    if d in BASE_POINTS:
        params = tuple(Fraction(t) for t in BASE_POINTS[d])
        prev = (TernaryForm(0, {(0, 0, 0): 1}) if d == 2 else linear(*ODD_SEED_LINE))
        arc, signs = None, []
    else:
        prev, stages = _hilbert_stages(d - 2, floor)
        last = stages[-1].params
        arc = (last[0], last[1])
        m = 2 * d
        params = tuple(arc[0] + (arc[1] - arc[0]) * Fraction(j, m + 1) for j in range(1, m + 1))
        # the new points sit where the previous curve has one sign: inside a single boundary arc
        signs = [sign(eval_form(prev, ellipse_point(t))) for t in params]
        if len(set(signs)) != 1 or 0 in signs:
            raise SearchExhausted(f"degree {d}: chosen points do not lie on one arc of the previous curve")
    lines = tuple(chord(params[2 * i], params[2 * i + 1]) for i in range(len(params) // 2))
    L = _line_product(lines)
    base = prev * P_E
    tried = {}

    def ok(sgn, k):
        if (sgn, k) not in tried:
            p = base + L * (sgn * Fraction(1, 2 ** k))
            tried[sgn, k] = _stage_ok(p, d) is not None and certify_nonsingular(p) == NONSINGULAR
        return tried[sgn, k]

    found = []
    for sgn in (1, -1):
        k = _bisect_exponent(lambda k: ok(sgn, k), _exponent(START), _exponent(floor))
        if k is not None:
            found.append((k, -sgn, sgn))
    if found:
        k, _, sgn = min(found)
        eps = sgn * Fraction(1, 2 ** k)
        p = base + L * eps
        topo = curve_topology(p)
        stage = HilbertStage(d, params, lines, eps, topo.depth_counts(), arc, signs, len(tried))
        prior = [] if d in BASE_POINTS else list(stages)
        return p, prior + [stage]
    raise SearchExhausted(f"degree {d}: epsilon below floor {floor} (ovals of depth {d // 2 - 1})")


def hilbert_curve(d: int, floor: Fraction = HILBERT_FLOOR, cap: int = HILBERT_CAP) -> HilbertRecipe:
    """Nonsingular curve of degree d with the Hilbert number of ovals of depth [d/2] - 1."""
    if d < 4 or d > cap:
        raise InputError(f"degree must be between 4 and {cap}")
    if not _seed_disjoint(ODD_SEED_LINE):
        raise InvariantViolation("odd seed line meets the ellipse")
    p, stages = _hilbert_stages(d, Fraction(floor))
    topo = curve_topology(p)
    check_bezout(topo)
    count = _submaximal(topo, d)
    validation = {
        "nonsingular": certify_nonsingular(p) == NONSINGULAR,
        "bezout": True,
        "target": hilbert_target(d),
        "petrovsky_bound": fraction_to_json(petrovsky_bound(d)),
        "within_petrovsky": count <= petrovsky_bound(d),
        "lower_bound": fraction_to_json(hilbert_lower_bound(d)),
        "exceeds_lower_bound": count > hilbert_lower_bound(d),
        "depth_counts": {str(k): v for k, v in topo.depth_counts().items()},
    }
    return HilbertRecipe(d, p, list(stages), ODD_SEED_LINE if d % 2 else None, count, validation)


# ---------------------------------------------------------------------------
# inductive intersections of quadrics


def _pad(v, n):
    return tuple(v) + (Fraction(0),) * (n - len(v))


def _sym(l, m) -> SymmetricForm:
    n = len(l)
    return SymmetricForm([[(l[i] * m[j] + l[j] * m[i]) / 2 for j in range(n)] for i in range(n)])


def _add(P: SymmetricForm, Q: SymmetricForm, c=1) -> SymmetricForm:
    return SymmetricForm([[P[i, j] + c * Q[i, j] for j in range(P.n)] for i in range(P.n)])


def _pad_form(Q: SymmetricForm, n) -> SymmetricForm:
    return SymmetricForm([[Q[i, j] if i < Q.n and j < Q.n else 0 for j in range(n)] for i in range(n)])


def _lin_json(l):
    return [fraction_to_json(c) for c in l]


def _combo(a, b, t):
    return tuple(x - t * y for x, y in zip(a, b))


def _distinguished(res, k):
    """Index of the component carrying all 2^{k-1} zeros of both markers in two separate arcs."""
    want = 2 ** (k - 1)
    for idx, comp in enumerate(res.components):
        if comp.crossings("l1") == want and comp.crossings("l2") == want and comp.separated("l1", "l2"):
            return idx
    return None


@dataclass
class HarnackStage:
    k: int
    l1: tuple
    l2: tuple
    count: int
    delta: Fraction | None = None
    epsilon: Fraction | None = None
    distinguished: int | None = None
    attempts: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "l1": _lin_json(self.l1),
            "l2": _lin_json(self.l2),
            "count": self.count,
            "expected": harnack_count(self.k),
            "delta": None if self.delta is None else fraction_to_json(self.delta),
            "epsilon": None if self.epsilon is None else fraction_to_json(self.epsilon),
            "distinguished": self.distinguished,
            "attempts": self.attempts,
        }


@dataclass
class HarnackRecipe:
    N: int
    quadrics: list  # SymmetricForm q^(2), ..., q^(N) in N+1 variables
    stages: list
    oracle: dict = field(default_factory=dict)

    @property
    def count(self) -> int:
        return self.stages[-1].count

    def matrices(self) -> np.ndarray:
        return np.array([q.to_numpy() for q in self.quadrics])

    def to_json(self) -> dict:
        return {
            "kind": "harnack",
            "N": self.N,
            "members": [[[fraction_to_json(c) for c in row] for row in q.entries] for q in self.quadrics],
            "stages": [s.to_json() for s in self.stages],
            "count": self.count,
            "expected_components": harnack_count(self.N),
            "genus": genus_check(self.N),
            "harnack_bound": genus_check(self.N) + 1,
            "oracle": self.oracle,
        }

    def net(self):
        from .forms import Net

        return Net(tuple(self.quadrics))


def _delta_ok(quadrics, l1, l2, k, delta, record) -> bool:
    """Distinguished arcs persist for l2 - t l1, t in [0, delta]; the final section has all points real."""
    want = 2 ** (k - 1)
    for frac in (Fraction(0), Fraction(1, 4), Fraction(1, 2), Fraction(3, 4), Fraction(1)):
        t = delta * frac
        res = count_components_tower(quadrics, {"l1": l1, "l2": _combo(l2, l1, t)})
        if _distinguished(res, k) is None:
            record.append({"delta": fraction_to_json(delta), "t": fraction_to_json(t), "ok": False})
            return False
    real = res.markers["l2"]
    record.append({"delta": fraction_to_json(delta), "section_real_points": real, "ok": real == want})
    return real == want


@lru_cache(maxsize=None)
def _harnack_stages(N: int, floor: Fraction):
    x = lambda i, n: tuple(Fraction(int(j == i)) for j in range(n))  # noqa: E731
    l1 = x(2, 3)
    l2 = _combo(x(2, 3), x(1, 3), 1)
    base = _add(_sym(l1, l2), _sym(_combo(x(1, 3), x(0, 3), 1), _combo(x(1, 3), x(0, 3), 2)))
    if N == 2:
        res = count_components_tower([base], {"l1": l1, "l2": l2})
        return [base], [HarnackStage(2, l1, l2, res.count, distinguished=_distinguished(res, 2))]
    quadrics, stages = (list(v) for v in _harnack_stages(N - 1, floor))
    stages = [HarnackStage(**{**s.__dict__, "attempts": list(s.attempts)}) for s in stages]
    k = N - 1
    stage = stages[-1]
    l1, l2 = stage.l1, stage.l2
    if stage.distinguished is None:
        raise SearchExhausted(f"stage {k}: no component carries both hyperplane sections in separate arcs")
    for delta in _halving(START, floor):
        if _delta_ok(quadrics, l1, l2, k, delta, stage.attempts):
            break
    else:
        raise SearchExhausted(f"stage {k}: delta below floor (arc condition for l2 - t l1)")
    stage.delta = delta
    n = k + 1
    tilde = _combo(l2, l1, delta)
    nl1 = x(n, n + 1)
    nl2 = _combo(nl1, _pad(l1, n + 1), 1)
    padded = [_pad_form(q, n + 1) for q in quadrics]
    bilinear = _sym(_pad(l2, n + 1), _pad(tilde, n + 1))
    want = harnack_count(N)
    attempts = []
    for eps in _halving(START, floor):
        q = _add(_sym(nl1, nl2), bilinear, eps)
        res = count_components_tower(padded + [q], {"l1": nl1, "l2": nl2})
        dist = _distinguished(res, N)
        ok = res.count == want and (N == HARNACK_CAP or dist is not None)
        attempts.append({"epsilon": fraction_to_json(eps), "count": res.count, "ok": ok})
        if ok:
            break
    else:
        raise SearchExhausted(f"stage {N}: epsilon below floor (component recount)")
    stages.append(HarnackStage(N, nl1, nl2, res.count, epsilon=eps, distinguished=dist, attempts=attempts))
    return padded + [q], stages


def harnack_intersection(N: int, floor: Fraction = HARNACK_FLOOR, cap: int = HARNACK_CAP,
                         seed: int = 0, cross_check: bool = False) -> HarnackRecipe:
    """N-1 quadrics in P^N whose real part has 2^{N-2}(N-3)+2 components.

    Every candidate parameter is validated with the exact tower oracle. With
    ``cross_check`` the final system is also counted by the tracking oracle.
    """
    if N < 2 or N > cap:
        raise InputError(f"dimension must be between 2 and {cap}")
    quadrics, stages = _harnack_stages(N, Fraction(floor))
    stages = [HarnackStage(**{**s.__dict__, "attempts": list(s.attempts)}) for s in stages]
    oracle = {"tower": stages[-1].count}
    if cross_check:
        oracle["tracking"] = count_components_curve(np.array([q.to_numpy() for q in quadrics]), seed=seed).count
        oracle["seed"] = seed
    return HarnackRecipe(N, list(quadrics), stages, oracle)
