"""Exact component count for triangular towers of quadrics over a conic.

A system q_2, ..., q_N in x_0, ..., x_N is a tower when q_2 is a conic in
(x_0, x_1, x_2) and, for k >= 3, q_k = a_k x_k^2 + b_k x_k + c_k with a_k a
nonzero constant and b_k, c_k forms in x_0, ..., x_{k-1} only. Over a
rational parametrisation X(t) of the conic the real curve is a tower of
branched double covers of the circle RP^1: above each point the sheets are
sign sequences choosing (-b_k +- sqrt(Delta_k)) / (2 a_k) at every level.

Fold points are real roots of eliminants R_k(t) (the product of Delta_k over
all sheets, obtained by resultants); sheet existence on each arc is read off
at a rational sample with certified ball arithmetic. No step size or
tolerance is involved, so arbitrarily small perturbation parameters are
handled exactly.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

from flint import arb, ctx, fmpq, fmpq_mpoly_ctx, fmpq_poly

from ..errors import DegenerateSystem, GenericityFailure
from ..forms import SymmetricForm, as_fraction, inertia
from ..roots import isolate_real_roots, primitive, simplest_between, squarefree_part, to_fmpq
from ..topology.cad import separate

_MAX_PREC = 1 << 15


def _entries(q):
    return q.entries if isinstance(q, SymmetricForm) else [[as_fraction(v) for v in row] for row in q]


def _top_variable(Q) -> int:
    n = len(Q)
    return max((i for i in range(n) for j in range(n) if Q[i][j] != 0), default=-1)


def tower_order(quadrics) -> list | None:
    """Quadrics sorted as q_2, ..., q_N when they form a tower, else None."""
    mats = [_entries(q) for q in quadrics]
    n = len(mats[0])
    tops = {}
    for Q in mats:
        k = _top_variable(Q)
        if k in tops or k < 2 or Q[k][k] == 0:
            return None
        tops[k] = Q
    if sorted(tops) != list(range(2, n)):
        return None
    return [tops[k] for k in range(2, n)]


def _rational_point(Q, bound: int = 10):
    rng = range(-bound, bound + 1)
    for v in sorted(itertools.product(rng, repeat=3), key=lambda p: (sum(map(abs, p)), p)):
        if v == (0, 0, 0):
            continue
        if sum(Q[i][j] * v[i] * v[j] for i in range(3) for j in range(3)) == 0:
            return v
    return None


@dataclass
class Marker:
    """Zero of a linear form g on a sheet, crossed when moving from arc L to arc R."""

    name: str
    event: int


@dataclass
class TowerComponent:
    nodes: list  # (arc, sheet) in traversal order
    markers: list  # marker names in traversal order

    def crossings(self, name: str) -> int:
        return sum(1 for m in self.markers if m == name)

    def separated(self, a: str, b: str) -> bool:
        """All a-crossings and all b-crossings fill two disjoint arcs of the loop."""
        labels = [m for m in self.markers if m in (a, b)]
        changes = sum(1 for i in range(len(labels)) if labels[i] != labels[i - 1])
        return changes == 2


@dataclass
class TowerResult:
    count: int
    components: list
    events: int
    sheets_per_arc: list
    markers: dict = field(default_factory=dict)  # name -> total real zeros on V

    def to_json(self) -> dict:
        return {
            "kind": "tower",
            "count": self.count,
            "events": self.events,
            "sheets_per_arc": self.sheets_per_arc,
            "components": [{"arcs": len(c.nodes), "markers": c.markers} for c in self.components],
            "marker_zeros": self.markers,
        }


class _Tower:
    def __init__(self, mats, shift: int):
        self.mats = mats
        self.N = len(mats[0]) - 1
        names = ("t",) + tuple(f"x{k}" for k in range(3, self.N + 1))
        self.R = fmpq_mpoly_ctx.get(names, "lex")
        gens = self.R.gens()
        self.t = gens[0]
        self.xs = {k: gens[k - 2] for k in range(3, self.N + 1)}
        C = mats[0]
        conic = [[C[i][j] for j in range(3)] for i in range(3)]
        p0 = _rational_point(conic)
        if p0 is None:
            raise DegenerateSystem("no rational point of small height on the base conic")
        basis = [e for e in ((1, 0, 0), (0, 1, 0), (0, 0, 1))]
        ea, eb = None, None
        for a, b in itertools.combinations(basis, 2):
            det = (p0[0] * (a[1] * b[2] - a[2] * b[1]) - p0[1] * (a[0] * b[2] - a[2] * b[0])
                   + p0[2] * (a[0] * b[1] - a[1] * b[0]))
            if det != 0:
                ea, eb = a, b
                break
        eb = tuple(y + shift * x for x, y in zip(ea, eb))
        self.p0, self.ea, self.eb = p0, ea, eb

        def B(u, v):
            return sum(conic[i][j] * u[i] * v[j] for i in range(3) for j in range(3))

        self.B = B
        # X(u, v) = Q(w) p0 - 2 B(p0, w) w with w = u ea + v eb; here u = 1, v = t
        t = self.t
        w = [self.R.constant(ea[i]) + t * eb[i] for i in range(3)]
        F = [[to_fmpq(conic[i][j]) for j in range(3)] for i in range(3)]
        Qw = sum(F[i][j] * w[i] * w[j] for i in range(3) for j in range(3))
        Bpw = sum(F[i][j] * p0[i] * w[j] for i in range(3) for j in range(3))
        self.X = [Qw * p0[i] - 2 * Bpw * w[i] for i in range(3)]
        if all(x.is_zero() for x in self.X):
            raise DegenerateSystem("degenerate base conic")
        self.coords = self.X + [self.xs[k] for k in range(3, self.N + 1)]

    def homog_point(self, u, v):
        """Exact point of the conic at the parameter (u : v)."""
        w = [u * self.ea[i] + v * self.eb[i] for i in range(3)]
        Qw = self.B(w, w)
        Bpw = self.B(self.p0, w)
        return [Qw * self.p0[i] - 2 * Bpw * w[i] for i in range(3)]

    def level_parts(self, k):
        """(a_k, b_k, c_k) with b_k, c_k as polynomials in the coordinates below x_k."""
        Q = [[to_fmpq(v) for v in row] for row in self.mats[k - 2]]
        a = Q[k][k]
        b = sum((2 * Q[k][j] * self.coords[j] for j in range(k) if Q[k][j] != 0), self.R.constant(0))
        c = sum((Q[i][j] * self.coords[i] * self.coords[j] for i in range(k) for j in range(k) if Q[i][j] != 0),
                self.R.constant(0))
        return a, b, c

    def q_poly(self, k):
        a, b, c = self.level_parts(k)
        x = self.xs[k]
        return a * x * x + b * x + c

    def discriminant(self, k):
        a, b, c = self.level_parts(k)
        return b * b - 4 * a * c

    def eliminate(self, p, below: int) -> fmpq_poly:
        """Product of p over all sheets of levels 3..below: a polynomial in t."""
        for i in range(below, 2, -1):
            if p.degrees()[i - 2] > 0:
                p = p.resultant(self.q_poly(i), f"x{i}")
        coeffs = {}
        for exps, c in p.to_dict().items():
            if any(exps[1:]):
                raise DegenerateSystem("elimination left a coordinate behind")
            coeffs[exps[0]] = c
        return fmpq_poly([coeffs.get(i, 0) for i in range(max(coeffs, default=-1) + 1)])

    def linear_poly(self, g):
        return sum(self.R.constant(to_fmpq(g[j])) * self.coords[j] for j in range(len(g)) if g[j] != 0)


def _arb_from(q) -> arb:
    q = Fraction(q)
    return arb(fmpq(q.numerator, q.denominator))


def _sign(x: arb):
    if x > 0:
        return 1
    if x < 0:
        return -1
    return None


def _evaluate(tower: _Tower, base, markers, prec):
    """Real sheets above a base point: {label: (coords, [sign Delta_k]) } and marker signs."""
    ctx.prec = prec
    mats = tower.mats
    N = tower.N
    partial = {(): [_arb_from(v) for v in base]}
    disc_signs = {}
    for k in range(3, N + 1):
        Q = mats[k - 2]
        a = _arb_from(Q[k][k])
        nxt = {}
        for label, xs in partial.items():
            b = sum((2 * _arb_from(Q[k][j]) * xs[j] for j in range(k) if Q[k][j] != 0), arb(0))
            c = sum((_arb_from(Q[i][j]) * xs[i] * xs[j] for i in range(k) for j in range(k) if Q[i][j] != 0),
                    arb(0))
            D = b * b - 4 * a * c
            s = _sign(D)
            if s is None:
                return None
            disc_signs[label] = s
            if s > 0:
                r = D.sqrt()
                for choice, sgn in ((0, 1), (1, -1)):
                    nxt[label + (choice,)] = xs + [(-b + sgn * r) / (2 * a)]
        partial = nxt
    msigns = {}
    for label, xs in partial.items():
        for name, g in markers.items():
            v = sum((_arb_from(g[j]) * xs[j] for j in range(N + 1) if g[j] != 0), arb(0))
            s = _sign(v)
            if s is None:
                return None
            msigns[(label, name)] = s
    return set(partial), disc_signs, msigns


def _evaluate_certified(tower, base, markers):
    prec = 128
    while prec <= _MAX_PREC:
        out = _evaluate(tower, base, markers, prec)
        if out is not None:
            return out
        prec *= 2
    raise GenericityFailure("sample point lies on a fold or marker within working precision")


def _tower_once(mats, markers, shift):
    tw = _Tower(mats, shift)
    N = tw.N
    polys = []
    for k in range(3, N + 1):
        R = tw.eliminate(tw.discriminant(k), k - 1)
        expected = 4 * 2 ** (k - 3)
        if R.is_zero():
            raise DegenerateSystem(f"level {k} discriminant vanishes identically on the tower")
        if R.degree() < expected:
            return None  # the parameter value at infinity is a fold; change chart
        polys.append(R)
    mpolys = {}
    for name, g in markers.items():
        G = tw.eliminate(tw.linear_poly(g), N)
        if G.is_zero():
            raise DegenerateSystem(f"marker {name} vanishes on a whole sheet")
        if G.degree() < 2 * 2 ** (N - 2):
            return None
        mpolys[name] = G
    prod = fmpq_poly([1])
    for p in polys + list(mpolys.values()):
        prod *= p
    Z = squarefree_part(primitive(prod.numer()))
    events = separate(Z, isolate_real_roots(Z)) if Z.degree() > 0 else []
    E = len(events)
    # samples: arc 0 contains the parameter at infinity; arc i lies between events i-1 and i
    samples = [None]
    for (_, b1), (a2, _) in zip(events, events[1:]):
        samples.append(simplest_between(b1, a2))
    data = []
    for s in samples:
        base = tw.homog_point(0, 1) if s is None else tw.homog_point(1, s)
        data.append(_evaluate_certified(tw, base, markers))
    arcs = max(E, 1)
    nodes = [(a, lab) for a in range(arcs) for lab in sorted(data[a][0])]
    # (node, end) -> (node', end'), end 1 being the end with larger parameter
    link, crossing = {}, {}
    for e in range(E):
        L, R = e, (e + 1) % E
        dl, dr = data[L], data[R]
        for arc, end, here, there in ((L, 1, dl, dr), (R, 0, dr, dl)):
            for lab in here[0]:
                k = _first_change(lab, here[1], there[1])
                if k is None:
                    continue
                partner = lab[:k] + (1 - lab[k],) + lab[k + 1:]
                if partner not in here[0]:
                    raise GenericityFailure("fold partner sheet missing")
                link[((arc, lab), end)] = ((arc, partner), end)
                crossing[((arc, lab), end)] = []
        for lab in dl[0]:
            if _first_change(lab, dl[1], dr[1]) is not None:
                continue
            if lab not in dr[0]:
                raise GenericityFailure("sheet disappears without a fold")
            flips = [n for n in markers if dl[2][(lab, n)] != dr[2][(lab, n)]]
            if len(flips) > 1:
                raise GenericityFailure("two marker zeros over one parameter value")
            link[((L, lab), 1)] = ((R, lab), 0)
            link[((R, lab), 0)] = ((L, lab), 1)
            crossing[((L, lab), 1)] = crossing[((R, lab), 0)] = flips
    if E == 0:
        for lab in data[0][0]:
            link[((0, lab), 1)] = ((0, lab), 0)
            crossing[((0, lab), 1)] = []
    seen, comps = set(), []
    for start in nodes:
        if start in seen:
            continue
        path, marks = [], []
        node, end = start, 1
        for _ in range(2 * len(nodes) + 2):
            seen.add(node)
            path.append(node)
            key = (node, end)
            if key not in link:
                raise GenericityFailure("open end in the sheet graph")
            marks.extend(crossing[key])
            node, arrive = link[key]
            end = 1 - arrive
            if node == start and end == 1:
                break
        else:
            raise GenericityFailure("sheet graph traversal did not close")
        comps.append(TowerComponent(path, marks))
    totals = {}
    for name, G in mpolys.items():
        Gs = squarefree_part(primitive(G.numer()))
        totals[name] = len(isolate_real_roots(Gs)) if Gs.degree() > 0 else 0
    return TowerResult(len(comps), comps, E, [len(d[0]) for d in data], totals)


def _first_change(label, signs_a, signs_b):
    """Lowest level index (into label) where the discriminant sign differs between two samples."""
    for k in range(len(label)):
        rho = label[:k]
        if signs_a.get(rho) != signs_b.get(rho):
            return k
    return None


def count_components_tower(quadrics, markers: dict | None = None) -> TowerResult:
    """Connected components of the real part of a tower of quadrics in RP^N."""
    ordered = tower_order(quadrics)
    if ordered is None:
        raise DegenerateSystem("system is not a triangular tower over a conic")
    markers = {k: tuple(as_fraction(c) for c in v) for k, v in (markers or {}).items()}
    conic = SymmetricForm([row[:3] for row in ordered[0][:3]])
    sig = inertia(conic)
    if sig.zero:
        raise DegenerateSystem("base conic is degenerate")
    if sig.positive == 0 or sig.negative == 0:
        return TowerResult(0, [], 0, [0], {name: 0 for name in markers})
    for shift in range(0, 12):
        out = _tower_once(ordered, markers, shift)
        if out is not None:
            return out
    raise GenericityFailure("every tried conic parametrisation has a fold at infinity")
