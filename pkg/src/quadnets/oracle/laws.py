"""Cross-checks between the spectral quartic and the real points of a net in P^3."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import InputError, SingularInput
from ..forms import Net
from ..spectral import NONSINGULAR, certify_nonsingular, spectral_form
from ..topology.curve import curve_topology
from .zerodim import solve_zero_dim


@dataclass
class LawVerdict:
    verdict: str  # "holds", "violated" or "skipped"
    real_points: int
    empty_ovals: int
    ovals: int
    max_depth: int
    notes: list = field(default_factory=list)

    @property
    def holds(self) -> bool:
        return self.verdict != "violated"

    def to_json(self) -> dict:
        return dict(self.__dict__)


def empty_oval_law_check(net: Net, seed: int = 0) -> LawVerdict:
    """Number of empty ovals of the spectral quartic against half the number of real points of V."""
    if net.N != 3 or net.r != 2:
        raise InputError("the empty-oval law concerns nets of quadrics in P^3")
    U = spectral_form(net)
    if certify_nonsingular(U) != NONSINGULAR:
        raise SingularInput("spectral quartic is not certified nonsingular", stage="oracle")
    topo = curve_topology(U)
    empty = sum(1 for o in topo.ovals if not topo.children(o.id))
    depth = max((o.depth for o in topo.ovals), default=0)
    pts = solve_zero_dim(net.matrices_float(), seed=seed).count
    notes = []
    if pts == 0:
        shape_ok = not topo.ovals or (len(topo.ovals) == 2 and depth == 2)
        notes.append("V_R is empty: the law does not apply")
        if not shape_ok:
            notes.append("spectral curve is neither empty nor a nest of depth two")
        verdict = "skipped" if shape_ok else "violated"
    else:
        verdict = "holds" if 2 * empty == pts else "violated"
    return LawVerdict(verdict, pts, empty, len(topo.ovals), depth, notes)
