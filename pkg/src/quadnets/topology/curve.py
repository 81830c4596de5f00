"""Ovals, nests and the spherical arrangement of a nonsingular real plane curve.

The sweep in :mod:`cad` cuts each of the two open hemispheres {±z > 0} of the
sphere (in chart coordinates) into sectors and branch segments. Gluing them
across folds, across the equator z = 0 and through the poles ±(0, 1, 0)
gives the regions of S^2 minus the lifted curve and its circles. Regions and
circles form a tree (every circle on S^2 separates), and the antipodal map
acts on that tree; its fixed vertex (even degree) or fixed edge (odd degree,
the equator) is the root from which interiors, depths and nests are read off.
"""

from __future__ import annotations

from collections import defaultdict, deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from ..errors import InvariantViolation, SingularInput
from ..forms import fraction_to_json
from ..polys import TernaryForm
from ..roots import RealAlgebraic
from ..spectral import SINGULAR, certify_nonsingular
from .cad import Decomposition, decompose


class _UnionFind:
    def __init__(self):
        self.parent = {}

    def add(self, a):
        self.parent.setdefault(a, a)

    def find(self, a):
        root = a
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[a] != root:
            self.parent[a], a = root, self.parent[a]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            if rb < ra:
                ra, rb = rb, ra
            self.parent[rb] = ra


@dataclass
class Oval:
    id: int
    parent: Optional[int]
    depth: int
    lifts: tuple = ()


@dataclass
class CurveTopology:
    d: int
    ovals: list
    has_one_sided: bool
    decomposition: Optional[Decomposition] = field(default=None, repr=False, compare=False)
    _lifted: object = field(default=None, repr=False, compare=False)

    @property
    def D_max(self) -> int:
        return self.d // 2

    def depth_counts(self) -> dict:
        out: dict = defaultdict(int)
        for o in self.ovals:
            out[o.depth] += 1
        return dict(sorted(out.items()))

    def children(self, oval_id: int) -> list:
        return [o.id for o in self.ovals if o.parent == oval_id]

    def shape(self):
        """Canonical nested-tuple description of the forest, independent of ids."""

        def encode(i):
            return tuple(sorted(encode(c) for c in self.children(i)))

        roots = tuple(sorted(encode(o.id) for o in self.ovals if o.parent is None))
        return (self.has_one_sided, roots)

    def to_json(self) -> dict:
        return {
            "d": self.d,
            "has_one_sided": self.has_one_sided,
            "ovals": [{"id": o.id, "parent": o.parent, "depth": o.depth} for o in self.ovals],
            "depth_counts": {str(k): v for k, v in self.depth_counts().items()},
        }


@dataclass
class Region:
    id: int
    sample: tuple  # exact rational direction in the original coordinates
    antipode: int
    tropical: bool
    sectors: list = field(repr=False, default_factory=list)


@dataclass
class Circle:
    id: int
    kind: str  # "oval" or "equator"
    antipode: int
    oval: Optional[int]
    inner: int  # region on the cap side (for the equator: an arbitrary side)
    outer: int
    parent: Optional[int] = None  # enclosing oval circle on the sphere
    depth: Optional[int] = None
    branches: list = field(repr=False, default_factory=list)


@dataclass
class SphericalArrangement:
    d: int
    chart: tuple
    regions: list
    circles: list
    equator: Optional[int]
    tropical: list
    cells: dict
    decomposition: Decomposition = field(repr=False)

    @property
    def euler(self) -> int:
        return self.cells["vertices"] - self.cells["edges"] + self.cells["faces"]

    def oval_circles(self) -> list:
        return [c for c in self.circles if c.kind == "oval"]

    def neighbours(self, region: int) -> list:
        out = []
        for c in self.circles:
            if c.inner == region:
                out.append((c.id, c.outer))
            elif c.outer == region:
                out.append((c.id, c.inner))
        return out

    def arc_point(self, circle: int):
        """An exact point on a circle: (sign, x, fiber polynomial, isolating interval)."""
        sigma, s, k = self.circles[circle].branches[0]
        slab = self.decomposition.slabs[s]
        a, b = slab.roots[k]
        return sigma, slab.x, slab.fiber, (a, b)

    def arc_algebraic(self, circle: int):
        """The point returned by :meth:`arc_point` as (sigma, M, x, y) with y a RealAlgebraic."""
        sigma, x, fiber, (a, b) = self.arc_point(circle)
        return sigma, self.chart, x, RealAlgebraic(fiber, a, b)

    def to_json(self) -> dict:
        return {
            "d": self.d,
            "chart": [list(r) for r in self.chart],
            "cells": dict(self.cells, euler=self.euler),
            "regions": [
                {
                    "id": r.id,
                    "sample": [fraction_to_json(v) for v in r.sample],
                    "antipode": r.antipode,
                    "tropical": r.tropical,
                }
                for r in self.regions
            ],
            "circles": [
                {
                    "id": c.id,
                    "kind": c.kind,
                    "antipode": c.antipode,
                    "oval": c.oval,
                    "inner": c.inner,
                    "outer": c.outer,
                    "parent": c.parent,
                    "depth": c.depth,
                }
                for c in self.circles
            ],
            "equator": self.equator,
            "tropical": self.tropical,
        }


def _glue(dcp: Decomposition):
    """Union-find classes of sectors (regions) and of branch segments (circles)."""
    sectors, branches = _UnionFind(), _UnionFind()
    slabs = dcp.slabs
    for sigma in (1, -1):
        for s, slab in enumerate(slabs):
            for i in range(slab.n + 1):
                sectors.add((sigma, s, i))
            for k in range(slab.n):
                branches.add((sigma, s, k))
    for sigma in (1, -1):
        for s, slab in enumerate(slabs):
            # through the poles +-(0, 1, 0)
            sectors.union((sigma, s, slab.n), (-sigma, s, 0))
        for ev in dcp.events:
            L, R = ev.index, ev.index + 1
            if ev.birth:
                small, big = L, R
            else:
                small, big = R, L
            j, n_small = ev.j, slabs[small].n
            for k in range(n_small + 1):
                sectors.union((sigma, small, k), (sigma, big, k if k <= j else k + 2))
            sectors.union((sigma, small, j), (sigma, big, j + 2))
            for k in range(n_small):
                branches.union((sigma, small, k), (sigma, big, k if k < j else k + 2))
            branches.union((sigma, big, j), (sigma, big, j + 1))
        # across the equator: x -> +inf on one sheet continues as x -> -inf on the other
        n, m = dcp.n_end, len(slabs) - 1
        for k in range(n + 1):
            sectors.union((sigma, m, k), (-sigma, 0, n - k))
        for k in range(n):
            branches.union((sigma, m, k), (-sigma, 0, n - 1 - k))
    return sectors, branches


def _cell_counts(dcp: Decomposition) -> dict:
    slabs, n_end = dcp.slabs, dcp.n_end
    pts = [min(slabs[e.index].n, slabs[e.index + 1].n) + 1 for e in dcp.events]
    return {
        "vertices": 2 + 2 * n_end + 2 * sum(pts),
        "edges": 2 + 2 * n_end + 2 * sum(s.n for s in slabs) + 2 * sum(p + 1 for p in pts),
        "faces": 2 * sum(s.n + 1 for s in slabs),
    }


def _mat_vec(M, v):
    return tuple(sum(Fraction(M[i][j]) * v[j] for j in range(3)) for i in range(3))


def _build(U: TernaryForm, dcp: Decomposition):
    sectors, branches = _glue(dcp)
    d = U.d
    region_of = {}
    region_keys: dict = defaultdict(list)
    for key in sorted(sectors.parent):
        region_keys[sectors.find(key)].append(key)
    circle_keys: dict = defaultdict(list)
    for key in sorted(branches.parent):
        circle_keys[branches.find(key)].append(key)

    # deterministic numbering: regions by their smallest sector, circles by smallest branch
    rroots = sorted(region_keys, key=lambda r: min(region_keys[r]))
    for idx, r in enumerate(rroots):
        region_of[r] = idx
    croots = sorted(circle_keys, key=lambda c: min(circle_keys[c]))
    circle_of = {c: idx for idx, c in enumerate(croots)}

    def sector_region(key):
        return region_of[sectors.find(key)]

    def flip(key):
        return (-key[0],) + tuple(key[1:])

    sides = []
    for c in croots:
        pair = None
        for sigma, s, k in circle_keys[c]:
            here = frozenset((sector_region((sigma, s, k)), sector_region((sigma, s, k + 1))))
            if len(here) != 2:
                raise InvariantViolation("a circle has the same region on both sides", stage="topology")
            if pair is None:
                pair = here
            elif pair != here:
                raise InvariantViolation("circle sides disagree along the circle", stage="topology")
        sides.append(tuple(sorted(pair)))

    n_regions, n_circles = len(rroots), len(croots)
    if n_regions != n_circles + 1:
        raise InvariantViolation(
            f"regions and circles do not form a tree ({n_regions} regions, {n_circles} circles)", stage="topology"
        )
    r_antipode = [sector_region(flip(region_keys[r][0])) for r in rroots]
    c_antipode = [circle_of[branches.find(flip(circle_keys[c][0]))] for c in croots]

    invariant_circles = [i for i in range(n_circles) if c_antipode[i] == i]
    invariant_regions = [i for i in range(n_regions) if r_antipode[i] == i]
    if d % 2 == 1 and (len(invariant_circles) != 1 or invariant_regions):
        raise InvariantViolation("odd degree needs exactly one one-sided component", stage="topology")
    if d % 2 == 0 and (invariant_circles or len(invariant_regions) != 1):
        raise InvariantViolation("even degree needs exactly one invariant region", stage="topology")

    adj: dict = defaultdict(list)
    for i, (a, b) in enumerate(sides):
        adj[a].append((i, b))
        adj[b].append((i, a))

    inner, outer = [None] * n_circles, [None] * n_circles
    parent_circle: list = [None] * n_circles
    depth: list = [None] * n_circles
    entry = {}  # region -> circle through which it was reached (None at the root)
    queue: deque = deque()
    if d % 2 == 0:
        root = invariant_regions[0]
        entry[root] = None
        queue.append(root)
        tropical = [root]
        equator = None
    else:
        equator = invariant_circles[0]
        a, b = sides[equator]
        inner[equator], outer[equator] = a, b
        entry[a] = entry[b] = equator
        queue.extend([a, b])
        tropical = [a, b]
    while queue:
        r = queue.popleft()
        via = entry[r]
        for c, other in adj[r]:
            if c == via or other in entry:
                continue
            inner[c], outer[c] = other, r
            enclosing = via if via is not None and via != equator else None
            parent_circle[c] = enclosing
            depth[c] = 1 if enclosing is None else depth[enclosing] + 1
            entry[other] = c
            queue.append(other)
    if len(entry) != n_regions:
        raise InvariantViolation("region graph is disconnected", stage="topology")

    # planar ovals: antipodal pairs of circles, numbered by depth then circle id
    pairs = sorted(
        {tuple(sorted((i, c_antipode[i]))) for i in range(n_circles) if i != equator},
        key=lambda p: (depth[p[0]], p[0]),
    )
    oval_of = {}
    for idx, p in enumerate(pairs):
        for c in p:
            oval_of[c] = idx
    ovals = []
    for idx, (c1, c2) in enumerate(pairs):
        if depth[c1] != depth[c2]:
            raise InvariantViolation("antipodal lifts have different depths", stage="topology")
        p1, p2 = parent_circle[c1], parent_circle[c2]
        par1 = None if p1 is None else oval_of[p1]
        par2 = None if p2 is None else oval_of[p2]
        if par1 != par2:
            raise InvariantViolation("antipodal map does not preserve the nesting", stage="topology")
        ovals.append(Oval(idx, par1, depth[c1], (c1, c2)))

    circles = [
        Circle(
            id=i,
            kind="equator" if i == equator else "oval",
            antipode=c_antipode[i],
            oval=oval_of.get(i),
            inner=inner[i],
            outer=outer[i],
            parent=parent_circle[i],
            depth=depth[i],
            branches=circle_keys[croots[i]],
        )
        for i in range(n_circles)
    ]

    # samples: a sector of each region; antipodal regions use the mirrored sector
    slabs = dcp.slabs
    chosen: dict = {}
    for idx, r in enumerate(rroots):
        if idx in chosen:
            continue
        key = region_keys[r][0]
        chosen[idx] = key
        chosen.setdefault(r_antipode[idx], flip(key))
    regions = []
    for idx, r in enumerate(rroots):
        sigma, s, i = chosen[idx]
        X = (sigma * slabs[s].x, sigma * slabs[s].gaps[i], Fraction(sigma))
        regions.append(
            Region(idx, _mat_vec(dcp.chart, X), r_antipode[idx], idx in tropical, region_keys[r])
        )
    cells = _cell_counts(dcp)
    arr = SphericalArrangement(d, dcp.chart, regions, circles, equator, tropical, cells, dcp)
    topo = CurveTopology(d, ovals, equator is not None, dcp, arr)
    return topo, arr


def curve_topology(U: TernaryForm, chart_start: int = 0, certify: bool = True) -> CurveTopology:
    """Oval forest of the real curve U = 0.

    With ``certify`` the curve must pass :func:`certify_nonsingular`; without
    it only real smoothness is needed, which the chart genericity conditions
    enforce (a real singular point makes every chart fail).
    """
    if certify and certify_nonsingular(U) == SINGULAR:
        raise SingularInput("the curve is singular", stage="topology")
    dcp = decompose(U, chart_start)
    topo, _ = _build(U, dcp)
    return topo


def lift_to_sphere(topo: CurveTopology, U: TernaryForm) -> SphericalArrangement:
    if topo._lifted is not None and topo.decomposition is not None:
        return topo._lifted
    dcp = decompose(U)
    _, arr = _build(U, dcp)
    return arr


def nest_queries(topo: CurveTopology) -> dict:
    counts = topo.depth_counts()
    D_max = topo.D_max
    return {
        "D_max": D_max,
        "max_depth": max(counts, default=0),
        "depth_counts": counts,
        "beta": counts.get(D_max - 1, 0) if D_max >= 2 else 0,
    }


def check_bezout(topo: CurveTopology) -> bool:
    """Assert the three nest restrictions coming from Bezout's theorem."""
    D_max = topo.D_max
    depth = {o.id: o.depth for o in topo.ovals}
    for o in topo.ovals:
        expected = 1 if o.parent is None else depth[o.parent] + 1
        if o.depth != expected:
            raise InvariantViolation(f"oval {o.id} has inconsistent depth", stage="topology")
    max_depth = max(depth.values(), default=0)
    if max_depth > D_max:
        raise InvariantViolation(f"nest of depth {max_depth} exceeds {D_max}", stage="topology")
    if max_depth == D_max and D_max >= 1:
        if len(topo.ovals) != D_max:
            raise InvariantViolation("a maximal nest coexists with other ovals", stage="topology")
    elif D_max >= 2 and max_depth == D_max - 1:
        # every submaximal nest o_1 < ... < o_k leaves only empty ovals besides o_1..o_{k-1}
        allowed = None
        for o in topo.ovals:
            if o.depth != max_depth:
                continue
            ancestors, node = set(), o
            while node.parent is not None:
                node = topo.ovals[node.parent]
                ancestors.add(node.id)
            allowed = ancestors if allowed is None else allowed & ancestors
        for o in topo.ovals:
            if topo.children(o.id) and o.id not in allowed:
                raise InvariantViolation(f"non-empty oval {o.id} outside the submaximal nest", stage="topology")
    return True
