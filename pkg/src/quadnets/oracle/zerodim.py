"""Real points of a zero-dimensional intersection of N quadrics in RP^N."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import mpmath
import numpy as np

from ..errors import SeedSaturationWarning
from .homotopy import quadrics_system, real_representatives, solve_projective


@dataclass
class SolutionSet:
    points: np.ndarray  # (k, N+1) unit representatives, one per projective point
    paths: int
    failed_paths: int
    max_residual: float
    warnings: list = field(default_factory=list)
    seed: int = 0

    @property
    def count(self) -> int:
        return int(len(self.points))

    def to_json(self, dump_points: bool = True) -> dict:
        out = {"kind": "points", "count": self.count, "paths": self.paths, "failed_paths": self.failed_paths,
               "max_residual": self.max_residual, "warnings": list(self.warnings), "seed": self.seed}
        if dump_points:
            out["points"] = self.points.tolist()
        return out


def _unit_sign(v):
    v = v / np.linalg.norm(v)
    k = np.argmax(np.abs(v))
    return v if v[k] > 0 else -v


def _dedup(points, tol):
    kept = []
    for p in points:
        if all(1 - abs(p @ q) > tol * tol / 2 and np.linalg.norm(p - q) > tol and np.linalg.norm(p + q) > tol
               for q in kept):
            kept.append(p)
    return kept


def _newton_sphere(A, x, iters=40):
    x = x / np.linalg.norm(x)
    for _ in range(iters):
        F = np.append(np.einsum("i,kij,j->k", x, A, x), 0.5 * (x @ x - 1))
        J = np.vstack([2 * A @ x, x[None, :]])
        try:
            dx = np.linalg.solve(J, F)
        except np.linalg.LinAlgError:
            return None
        n = np.linalg.norm(dx)
        if n > 0.25:
            dx *= 0.25 / n
        x = x - dx
        if n < 1e-15:
            break
    return x / np.linalg.norm(x)


def _polish(A, x, digits=40):
    """Newton in extended precision; returns the point and its residual."""
    with mpmath.workdps(digits):
        n = len(x)
        Am = [mpmath.matrix(a.tolist()) for a in A]
        v = mpmath.matrix(x.tolist())
        for _ in range(8):
            F = mpmath.matrix([(v.T * a * v)[0] for a in Am] + [((v.T * v)[0] - 1) / 2])
            J = mpmath.matrix(n, n)
            for k, a in enumerate(Am):
                row = 2 * a * v
                for j in range(n):
                    J[k, j] = row[j]
            for j in range(n):
                J[n - 1, j] = v[j]
            try:
                v = v - mpmath.lu_solve(J, F)
            except ZeroDivisionError:
                break
        res = max(abs((v.T * a * v)[0]) for a in Am)
        return np.array([float(t) for t in v]), float(res)


def solve_zero_dim(mats, seed: int = 0, multistart: int = 64, dedup: float = 1e-6,
                   residual: float = 1e-10) -> SolutionSet:
    """All real solutions of N quadrics in RP^N, deduplicated up to sign."""
    A = np.asarray(mats, dtype=float)
    m, n = A.shape[0], A.shape[1]
    if m != n - 1:
        raise ValueError("expected N quadrics in N+1 variables")
    A = A / np.abs(A).max(axis=(1, 2))[:, None, None]
    rng = np.random.default_rng(seed)
    res = solve_projective(quadrics_system(A), [2] * m, n, rng)
    cands = [_newton_sphere(A, x) for x in real_representatives(res.points, tol=1e-6)]
    from_homotopy = _dedup([_unit_sign(p) for p in cands if p is not None and
                            np.abs(np.einsum("i,kij,j->k", p, A, p)).max() < 1e-8], dedup)
    starts = rng.normal(size=(multistart, n))
    extra = [_newton_sphere(A, x) for x in starts]
    extra = [_unit_sign(p) for p in extra if p is not None and np.abs(np.einsum("i,kij,j->k", p, A, p)).max() < 1e-8]
    pts = _dedup(from_homotopy + extra, dedup)
    notes = []
    if len(pts) > len(from_homotopy):
        notes.append(f"multistart found {len(pts) - len(from_homotopy)} point(s) missed by homotopy")
    if res.failed:
        notes.append(f"{res.failed} of {res.paths} homotopy paths failed")
    polished, worst = [], 0.0
    for p in pts:
        q, r = _polish(A, p)
        worst = max(worst, r)
        if r > residual:
            notes.append(f"point with residual {r:.3g} after polish dropped")
            continue
        polished.append(_unit_sign(q))
    if len(polished) > 2 ** m:
        raise ValueError(f"{len(polished)} points exceed the Bezout bound {2 ** m}")
    for msg in notes:
        warnings.warn(msg, SeedSaturationWarning)
    out = np.array(sorted(polished, key=lambda v: tuple(np.round(v, 9)))).reshape(-1, n)
    return SolutionSet(out, res.paths, res.failed, worst, notes, seed)
