"""Index function of a net on S^2, its sublevel filtration and b0 predictions.

For a net x -> Q_x the index ind(x) is the negative inertia index of Q_x. It is
constant on each region of S^2 minus the lifted spectral curve, so it is
computed once per region at an exact rational sample point.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from flint import fmpq, fmpq_poly

from .errors import InvariantViolation, SampleOnCurve
from .forms import Inertia, Net, _symmetric_inertia, as_fraction, evaluate, inertia
from .roots import AlgElem
from .topology.curve import CurveTopology, SphericalArrangement, nest_queries

CASES = ("definite_member", "imax_small", "imax_Nminus1", "imax_N", "exceptional_nest", "out_of_lemma_range")


@dataclass
class IndexMap:
    N: int
    values: list  # region id -> ind
    inner: dict  # oval circle id -> ind immediately inside
    arr: SphericalArrangement = field(repr=False)

    @property
    def i_max(self) -> int:
        return max(self.values)

    @property
    def i_min(self) -> int:
        return min(self.values)

    def attained(self) -> list:
        return sorted(set(self.values))

    def to_json(self) -> dict:
        return {
            "N": self.N,
            "values": self.values,
            "inner": {str(k): v for k, v in sorted(self.inner.items())},
            "i_max": self.i_max,
            "i_min": self.i_min,
        }


def _sample_index(net: Net, point) -> int:
    Q = evaluate(net, point)
    inert = inertia(Q)
    if inert.zero:
        raise SampleOnCurve(f"sample {point} lies on the spectral curve")
    return inert.negative


def _sector_point(arr: SphericalArrangement, key):
    sigma, s, i = key
    slab = arr.decomposition.slabs[s]
    X = (sigma * slab.x, sigma * slab.gaps[i], Fraction(sigma))
    M = arr.chart
    return tuple(sum(Fraction(M[r][c]) * X[c] for c in range(3)) for r in range(3))


def index_map(net: Net, arr: SphericalArrangement) -> IndexMap:
    values = []
    for region in arr.regions:
        try:
            values.append(_sample_index(net, region.sample))
        except SampleOnCurve:
            # fall back to the other sectors of the region, in order
            for key in region.sectors:
                try:
                    values.append(_sample_index(net, _sector_point(arr, key)))
                    break
                except SampleOnCurve:
                    continue
            else:
                raise
    inner = {c.id: values[c.inner] for c in arr.circles if c.kind == "oval"}
    return IndexMap(net.N, values, inner, arr)


def arc_inertia(net: Net, arr: SphericalArrangement, circle: int) -> Inertia:
    """Exact inertia of Q_x at an algebraic point of the given circle."""
    sigma, M, x, alpha = arr.arc_algebraic(circle)
    n = net.N + 1
    # Q(sigma M (x, t, 1)) = sigma (x R0 + t R1 + R2) with R_j = sum_i M_ij Q_i
    R = [[[sum(Fraction(M[i][j]) * net.members[i][a, b] for i in range(3)) for b in range(n)] for a in range(n)]
         for j in range(3)]
    rows = []
    for a in range(n):
        row = []
        for b in range(n):
            c0 = sigma * (x * R[0][a][b] + R[2][a][b])
            c1 = sigma * R[1][a][b]
            row.append(AlgElem(fmpq_poly([_q(c0), _q(c1)]), alpha))
        rows.append(row)
    return _symmetric_inertia(rows, lambda e: e.sign())


def _q(v) -> fmpq:
    v = as_fraction(v)
    return fmpq(v.numerator, v.denominator)


@dataclass
class AxiomReport:
    ok: bool
    violations: list
    checked: dict

    def to_json(self) -> dict:
        return {"ok": self.ok, "violations": self.violations, "checked": self.checked}


def verify_axioms(imap: IndexMap, arr: SphericalArrangement, net: Optional[Net] = None,
                  strict: bool = True, all_sectors: bool = True) -> AxiomReport:
    """Check the jump, antipodal, locality and semicontinuity properties of ind.

    Without ``net`` only the combinatorial checks (jumps, antipodal law on
    region values) are performed. With ``strict`` any violation raises.
    """
    N = imap.N
    v = imap.values
    bad = []
    checked = {"jumps": 0, "antipodal": 0, "locality": 0, "semicontinuity": 0}
    for c in arr.circles:
        checked["jumps"] += 1
        if abs(v[c.inner] - v[c.outer]) != 1:
            bad.append(f"circle {c.id}: index jumps from {v[c.outer]} to {v[c.inner]}")
    for r in arr.regions:
        checked["antipodal"] += 1
        if v[r.antipode] != N + 1 - v[r.id]:
            bad.append(f"region {r.id}: ind {v[r.id]} but antipode has {v[r.antipode]}")
    if net is not None:
        if all_sectors:
            for r in arr.regions:
                for key in r.sectors:
                    checked["locality"] += 1
                    val = _sample_index(net, _sector_point(arr, key))
                    if val != v[r.id]:
                        bad.append(f"region {r.id}: sector {key} has ind {val}, expected {v[r.id]}")
        for c in arr.circles:
            checked["semicontinuity"] += 1
            inert = arc_inertia(net, arr, c.id)
            low = min(v[c.inner], v[c.outer])
            if inert.zero != 1:
                bad.append(f"circle {c.id}: corank {inert.zero} at a smooth point")
            if inert.negative != low:
                bad.append(f"circle {c.id}: ind {inert.negative} on the arc, sides {v[c.inner]}, {v[c.outer]}")
            if inert.positive != N + 1 - inert.negative - inert.zero:
                bad.append(f"circle {c.id}: antipodal law fails on the arc")
    report = AxiomReport(not bad, bad, checked)
    if strict and bad:
        raise InvariantViolation("index axioms violated: " + "; ".join(bad[:5]), stage="index")
    return report


def inner_index_violations(imap: IndexMap, arr: SphericalArrangement) -> list:
    """Tropical range, inner-index bound and (for odd N) parity congruence, per oval circle."""
    N = imap.N
    D_max = (N + 1) // 2
    bad = []
    for t in arr.tropical:
        if not (N <= 2 * imap.values[t] <= N + 2):
            bad.append(f"tropical region {t}: ind {imap.values[t]} outside [N/2, N/2 + 1]")
    for c in arr.oval_circles():
        i = imap.inner[c.id]
        bound = N + 1 - (D_max - c.depth)
        if i > bound:
            bad.append(f"oval circle {c.id}: i = {i} exceeds {bound}")
        if N % 2 == 1 and (i - bound) % 2:
            bad.append(f"oval circle {c.id}: i = {i} breaks the parity congruence")
    return bad


def deep_nest_witness(imap: IndexMap, arr: SphericalArrangement, filt: "Filtration") -> dict:
    """For each q > N/2 with b0(Omega_q) > 1, a nest o < o' with i(o) = q + 1 and i(o') = q."""
    N = imap.N
    out = {}
    for q in range(N // 2 + 1, N + 1):
        if filt.betti(q)[0] <= 1:
            continue
        pair = None
        for c in arr.oval_circles():
            if c.parent is not None and imap.inner[c.id] == q and imap.inner[c.parent] == q + 1:
                pair = (c.parent, c.id)
                break
        if pair is None:
            raise InvariantViolation(f"b0(Omega_{q}) > 1 without a nest of inner indices {q + 1}, {q}",
                                     stage="index")
        out[q] = pair
    return out


@dataclass
class Level:
    i: int
    regions: list
    b0: int
    b1: int
    b2: int
    chi: int

    @property
    def is_sphere(self) -> bool:
        return self.b2 == 1


@dataclass
class Filtration:
    N: int
    levels: dict  # i -> Level, for i = -1 .. N+1

    def betti(self, i: int) -> tuple:
        if i < -1:
            return (0, 0, 0)
        i = min(i, self.N + 1)
        lv = self.levels[i]
        return (lv.b0, lv.b1, lv.b2)

    def to_json(self) -> list:
        return [
            {"i": lv.i, "b0": lv.b0, "b1": lv.b1, "b2": lv.b2, "chi": lv.chi, "regions": lv.regions}
            for lv in sorted(self.levels.values(), key=lambda t: t.i)
        ]


def filtration(imap: IndexMap, arr: SphericalArrangement) -> Filtration:
    """Sublevel sets Omega_i = closure{ind <= i} as unions of closed regions.

    Closed regions meet only along whole circles, so b0 is the number of
    components of the induced subforest, chi(Omega) = sum over regions of
    (2 - number of boundary circles), b2 = 1 exactly when Omega = S^2, and
    b1 = b0 + b2 - chi (so b1(S^2) = 0).
    """
    N = imap.N
    v = imap.values
    boundary = [0] * len(arr.regions)
    for c in arr.circles:
        boundary[c.inner] += 1
        boundary[c.outer] += 1
    levels = {}
    for i in range(-1, N + 2):
        inside = [r.id for r in arr.regions if v[r.id] <= i]
        s = set(inside)
        edges = sum(1 for c in arr.circles if c.inner in s and c.outer in s)
        b0 = len(inside) - edges
        chi = sum(2 - boundary[r] for r in inside)
        b2 = 1 if len(inside) == len(arr.regions) else 0
        b1 = b0 + b2 - chi
        if b1 < 0:
            raise InvariantViolation(f"negative b1 for Omega_{i}", stage="index")
        levels[i] = Level(i, inside, b0, b1, b2, chi)
    for i in range(-1, N + 1):
        if not set(levels[i].regions) <= set(levels[i + 1].regions):
            raise InvariantViolation("filtration is not increasing", stage="index")
    if levels[-1].regions or not levels[N + 1].is_sphere:
        raise InvariantViolation("filtration must run from the empty set to S^2", stage="index")
    return Filtration(N, levels)


@dataclass
class E2Table:
    N: int
    i_max: int
    dims: list  # dims[q][p] = dim H^p(Omega_{N-q}), q = 0 .. N+1

    def __getitem__(self, pq):
        p, q = pq
        if q < 0 or q > self.N + 1 or p < 0 or p > 2:
            return 0
        return self.dims[q][p]

    def to_json(self) -> list:
        return self.dims


def e2_table(filt: Filtration, i_max: Optional[int] = None) -> E2Table:
    N = filt.N
    dims = [list(filt.betti(N - q)) for q in range(N + 2)]
    if i_max is None:
        i_max = N + 1
        while i_max > 0 and filt.levels[i_max - 1].is_sphere:
            i_max -= 1
    table = E2Table(N, i_max, dims)
    check_e2_patterns(table)
    return table


def check_e2_patterns(table: E2Table) -> bool:
    N, i_max = table.N, table.i_max
    for q in range(N + 2):
        row = table.dims[q]
        if q <= N - i_max and row != [1, 0, 1]:
            raise InvariantViolation(f"E2 row {q} should be (1, 0, 1), got {row}", stage="index")
        if q >= i_max and row != [0, 0, 0]:
            raise InvariantViolation(f"E2 row {q} should vanish, got {row}", stage="index")
        if q > N - i_max and row[2] != 0:
            raise InvariantViolation(f"E2^(2,{q}) should vanish", stage="index")
    return True


def chi_Lplus(e2: E2Table) -> int:
    return sum((-1) ** (p + q) * e2.dims[q][p] for q in range(len(e2.dims)) for p in range(3))


@dataclass
class PredictionReport:
    case: str
    b0_lower: int
    b0_upper: int
    beta: int
    i_max: int
    omega_betti: list
    e2: list
    notes: list = field(default_factory=list)
    lemma_bounds: Optional[tuple] = None
    bookkeeping_bounds: Optional[tuple] = None
    flags: list = field(default_factory=list)

    def contains(self, count: int) -> bool:
        return self.b0_lower <= count <= self.b0_upper

    @property
    def width(self) -> int:
        return self.b0_upper - self.b0_lower

    def to_json(self) -> dict:
        return {
            "case": self.case,
            "b0_lower": self.b0_lower,
            "b0_upper": self.b0_upper,
            "beta": self.beta,
            "i_max": self.i_max,
            "omega_betti": self.omega_betti,
            "e2": self.e2,
            "notes": self.notes,
            "lemma_bounds": list(self.lemma_bounds) if self.lemma_bounds else None,
            "bookkeeping_bounds": list(self.bookkeeping_bounds) if self.bookkeeping_bounds else None,
            "flags": self.flags,
        }


def _exceptional_nest(imap: IndexMap, arr: SphericalArrangement, topo: CurveTopology) -> bool:
    """A maximal nest o_1 < ... < o_k, k = D_max, with i(o_k) = N-1 and i(o_{k-1}) = N."""
    k = topo.D_max
    if k < 2:
        return False
    N = imap.N
    for c in arr.circles:
        if c.kind == "oval" and c.depth == k and c.parent is not None:
            if imap.inner[c.id] == N - 1 and imap.inner[c.parent] == N:
                return True
    return False


def bookkeeping_bounds(filt: Filtration, e2: E2Table) -> tuple:
    """Bounds on b0 from the degree-one and degree-two terms of the spectral sequence.

    Uses b0(L+) = b1(L+) = 1 and b2(L+) = b0(V) + 1 (N >= 4): the only unknown is
    the rank r2 of d2: E2^(0,2) -> E2^(2,1).
    """
    N = filt.N
    b0_1, b1_1, _ = filt.betti(N - 1)
    b0_2 = filt.betti(N - 2)[0]
    h2_1 = e2[2, 1]
    if b0_1 > 2:
        raise InvariantViolation(f"b0(Omega_(N-1)) = {b0_1} > 2 contradicts b1(L+) = 1", stage="index")
    base = b1_1 + b0_2 - (b0_1 - 1)
    return base - min(b0_2, h2_1), base


def predict_b0(imap: IndexMap, arr: SphericalArrangement, topo: CurveTopology,
               filt: Optional[Filtration] = None, e2: Optional[E2Table] = None) -> PredictionReport:
    N = imap.N
    if filt is None:
        filt = filtration(imap, arr)
    if e2 is None:
        e2 = e2_table(filt, max(imap.values))
    i_min, i_max = imap.i_min, imap.i_max
    beta = nest_queries(topo)["beta"]
    betti = [list(filt.betti(i)) for i in range(-1, N + 2)]
    notes, flags = [], []

    def report(case, lo, hi, lemma=None, book=None):
        return PredictionReport(case, lo, hi, beta, i_max, betti, e2.dims, notes, lemma, book, flags)

    if i_min == 0 or i_max == N + 1:
        notes.append("the net contains a definite member, so the common zero set is empty")
        return report("definite_member", 0, 0)
    if N <= 2:
        notes.append("a regular intersection of three quadrics in P^N with N <= 2 is empty")
        return report("out_of_lemma_range", 0, 0)

    if N == 3:
        chi = chi_Lplus(e2)
        book = (chi, chi)
        notes.append("N = 3: b0(V) equals the Euler characteristic of the E2 page")
    else:
        book = bookkeeping_bounds(filt, e2)

    lemma = None
    case = "out_of_lemma_range"
    b0_Nm2 = filt.betti(N - 2)[0]
    if _exceptional_nest(imap, arr, topo):
        case, lemma = "exceptional_nest", (1, 1)
        notes.append("maximal nest with inner indices N-1, N: the exceptional d2 case")
        if N == 3:
            flags.append("exceptional_nest_at_N3")
            notes.append("at N = 3 the point count is even, which conflicts with b0 = 1; both reported")
    elif i_max <= N - 2:
        case, lemma = "imax_small", (0, 1)
    elif i_max == N - 1:
        case = "imax_Nminus1"
        lemma = (b0_Nm2 - 1, b0_Nm2)
        notes.append("i_max = N-1 >= 2 gives b0(Omega_(N-2)) - 1 <= b0 <= b0(Omega_(N-2))")
        if N - 1 >= 4 and b0_Nm2 > 1:
            lemma = (max(lemma[0], beta), min(lemma[1], beta + 1))
            notes.append("i_max = N-1 >= 4 with b0(Omega_(N-2)) > 1 gives beta <= b0 <= beta + 1")
    elif i_max == N and N >= 5:
        case, lemma = "imax_N", (beta, beta)
    else:
        notes.append(f"i_max = {i_max} with N = {N} lies outside the lemma thresholds")

    lo, hi = book
    if lemma is not None:
        lo2, hi2 = max(lo, lemma[0]), min(hi, lemma[1])
        if lo2 > hi2:
            flags.append("lemma_and_bookkeeping_disagree")
            notes.append(f"lemma bounds {lemma} and bookkeeping bounds {book} do not intersect")
            lo2, hi2 = lemma
        lo, hi = lo2, hi2
    lo = max(lo, 0)
    return report(case, lo, hi, lemma, book)


@dataclass
class OrientationTable:
    flags: dict  # oval circle id -> True if ind increases into its cap
    ovals: dict  # planar oval id -> flag of its chosen lift
    nested_pairs: list  # (outer oval, inner oval, coherent)
    consistent: bool

    def to_json(self) -> dict:
        return {
            "flags": {str(k): v for k, v in sorted(self.flags.items())},
            "ovals": {str(k): v for k, v in sorted(self.ovals.items())},
            "nested_pairs": [list(p) for p in self.nested_pairs],
            "consistent": self.consistent,
        }


def index_orientation(imap: IndexMap, arr: SphericalArrangement) -> OrientationTable:
    """Semi-orientation of the real spectral curve given by increasing index.

    Each oval circle is cooriented towards increasing ind; with the boundary
    orientation of its cap this is encoded by one flag. The antipodal map
    reverses the orientation of S^2, so the orientation descends to the plane
    exactly when antipodal lifts carry opposite flags. Two nested ovals are
    coherently oriented when, on lifts in the same cap, their flags agree.
    """
    v = imap.values
    flags = {c.id: v[c.inner] > v[c.outer] for c in arr.circles if c.kind == "oval"}
    consistent = all(flags[c.id] != flags[c.antipode] for c in arr.circles if c.kind == "oval")
    chosen, pairs = {}, []
    for c in sorted(arr.oval_circles(), key=lambda t: (t.depth, t.id)):
        if c.oval in chosen:
            continue
        if c.parent is not None and arr.circles[c.parent].oval in chosen:
            # keep the lift that sits inside the chosen lift of the enclosing oval
            if chosen[arr.circles[c.parent].oval] != c.parent:
                continue
        chosen[c.oval] = c.id
    for oval, cid in chosen.items():
        c = arr.circles[cid]
        if c.parent is not None:
            outer = arr.circles[c.parent].oval
            pairs.append((outer, oval, flags[c.parent] == flags[cid]))
    return OrientationTable(flags, {o: flags[c] for o, c in chosen.items()}, sorted(pairs), consistent)
