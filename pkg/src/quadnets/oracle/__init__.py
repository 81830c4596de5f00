"""Ground truth for intersections of quadrics, independent of the spectral pipeline."""

from __future__ import annotations

from ..errors import DegenerateSystem, InputError
from .components import Tolerances, count_components_curve
from .tower import count_components_tower, tower_order


def count_components(quadrics, seed: int = 0, method: str = "auto", tolerances: Tolerances | None = None):
    """Real components of the curve cut out by N-1 quadrics in RP^N.

    ``auto`` uses the exact tower count when the system is triangular and the
    tracker otherwise.
    """
    if method not in ("auto", "tower", "tracking"):
        raise InputError(f"unknown oracle method {method!r}")
    if method != "tracking" and tower_order(quadrics) is not None:
        try:
            return count_components_tower(quadrics)
        except DegenerateSystem:
            if method == "tower":
                raise
    elif method == "tower":
        raise DegenerateSystem("system is not a triangular tower")
    mats = [[[float(v) for v in row] for row in (q.entries if hasattr(q, "entries") else q)] for q in quadrics]
    return count_components_curve(mats, seed=seed, tolerances=tolerances)


def euler_complement(N: int, codim: int, chi_V: int) -> int:
    """Euler characteristic of RP^N minus a closed submanifold V of codimension ``codim``.

    Removing a tubular neighbourhood: chi(M \\ V) = chi(M) - chi(V) + chi(V) chi(S^(codim-1)).
    """
    chi_M = 1 if N % 2 == 0 else 0
    sphere = 2 if (codim - 1) % 2 == 0 else 0
    return chi_M + chi_V * (sphere - 1)
