"""Counting real components of a one-dimensional intersection of quadrics.

V is cut out by N-1 quadrics in RP^N and is studied on the unit sphere of
R^{N+1}. Seeds come from two sources:

* a Sobol start set projected onto V by damped Gauss-Newton,
* the real critical points of a random linear height c.x on V. These are
  the solutions of the quadrics together with det[c, x, A_1 x, ...] = 0 and
  every circle of V on the sphere carries at least two of them.

From each seed not yet covered, the curve is traced with a predictor-corrector
along the Jacobian null direction until it returns to the seed or its antipode.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import qmc

from ..errors import NonClosure, SeedSaturationWarning, SuspectedSingularity
from .homotopy import quadrics_system, real_representatives, solve_projective


@dataclass
class Tolerances:
    residual: float = 1e-10
    dedup: float = 1e-6
    step: float = 1e-2
    min_step: float = 1e-14
    safety: float = 0.1
    max_turn: float = 0.15  # radians of tangent rotation per step
    rank: float = 1e-9

    def to_json(self) -> dict:
        return dict(self.__dict__)


@dataclass
class TrackedLoop:
    points: np.ndarray  # (k, N+1) unit vectors, in tracking order
    closed: bool
    length: float
    one_sided: bool  # returned to the antipode of its start

    def to_json(self, dump_points: bool = False) -> dict:
        out = {"closed": self.closed, "length": self.length, "one_sided": self.one_sided,
               "n_points": int(len(self.points))}
        if dump_points:
            out["points"] = self.points.tolist()
        return out


@dataclass
class ComponentCount:
    count: int
    loops: list
    seeds: dict
    warnings: list = field(default_factory=list)
    stability: dict = field(default_factory=dict)
    tolerances: Tolerances = field(default_factory=Tolerances)
    seed: int = 0

    def to_json(self, dump_points: bool = False) -> dict:
        return {
            "kind": "curve",
            "count": self.count,
            "loops": [lp.to_json(dump_points) for lp in self.loops],
            "seeds": self.seeds,
            "warnings": list(self.warnings),
            "stability": self.stability,
            "tolerances": self.tolerances.to_json(),
            "seed": self.seed,
        }


class _Curve:
    """V on the unit sphere: value, Jacobian, projection and tangent."""

    def __init__(self, mats, tol: Tolerances):
        self.A = np.asarray(mats, dtype=float)
        self.m, self.n = self.A.shape[0], self.A.shape[1]
        scale = np.abs(self.A).max(axis=(1, 2))
        self.A = self.A / scale[:, None, None]
        self.tol = tol
        self.hess = 2 * max(np.linalg.norm(a, 2) for a in self.A)

    def values(self, x):
        return np.einsum("i,kij,j->k", x, self.A, x)

    def jacobian(self, x):
        return np.vstack([2 * self.A @ x, x[None, :]])

    def project(self, x, iters: int = 30, damped: bool = False):
        """Gauss-Newton onto V and the sphere; None when it does not converge."""
        # stop on the step size, not the residual: near a tight turn the
        # position error is residual / sigma_min
        x = x / np.linalg.norm(x)
        for _ in range(iters):
            F = np.append(self.values(x), 0.5 * (x @ x - 1))
            J = self.jacobian(x)
            dx = np.linalg.lstsq(J, F, rcond=None)[0]
            norm = np.linalg.norm(dx)
            if damped and norm > 0.2:
                dx *= 0.2 / norm
            x = x - dx
            if norm < 1e-15:
                break
        x = x / np.linalg.norm(x)
        if np.abs(self.values(x)).max() < self.tol.residual:
            return x
        return None

    def tangent(self, x):
        """Unit tangent and the smallest singular value of the Jacobian."""
        J = self.jacobian(x)
        _, s, vt = np.linalg.svd(J)
        if s[-1] < self.tol.rank * s[0]:
            raise SuspectedSingularity(f"Jacobian rank drop at {x.tolist()} (sigma_min={s[-1]:.3g})")
        return vt[-1], s[-1]

    def slice_project(self, x, anchor, normal, iters: int = 20):
        """Point of V on the sphere near x inside the hyperplane normal.(y - anchor) = 0."""
        for _ in range(iters):
            F = np.concatenate([self.values(x), [0.5 * (x @ x - 1), normal @ (x - anchor)]])
            if np.abs(F).max() < 1e-14:
                break
            J = np.vstack([self.jacobian(x), normal[None, :]])
            try:
                x = x - np.linalg.solve(J, F)
            except np.linalg.LinAlgError:
                return None
        return x


def critical_point_seeds(mats, rng: np.random.Generator) -> tuple:
    """Real critical points of a random linear height on V, via homotopy."""
    A = np.asarray(mats, dtype=float)
    m, n = A.shape[0], A.shape[1]
    c = rng.normal(size=n)
    quad = quadrics_system(A)

    def system(X):
        F, J = quad(X)
        P = X.shape[0]
        M = np.empty((P, n, n), dtype=complex)
        M[:, :, 0] = c
        M[:, :, 1] = X
        M[:, :, 2:] = np.einsum("kij,pj->pik", A, X)
        cof = np.empty_like(M)
        for r in range(n):
            rows = [i for i in range(n) if i != r]
            for s in range(n):
                cols = [j for j in range(n) if j != s]
                cof[:, r, s] = (-1) ** (r + s) * np.linalg.det(M[:, rows][:, :, cols])
        det = np.einsum("pr,pr->p", M[:, :, 0], cof[:, :, 0])
        grad = cof[:, :, 1] + np.einsum("kri,prk->pi", A, cof[:, :, 2:])
        return np.concatenate([F, det[:, None]], axis=1), np.concatenate([J, grad[:, None, :]], axis=1)

    res = solve_projective(system, [2] * m + [n - 1], n, rng)
    return real_representatives(res.points, tol=1e-6), res


def sobol_seeds(n: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """Low-discrepancy directions: scrambled Sobol points pushed to the sphere."""
    sampler = qmc.Sobol(d=n, scramble=True, seed=rng)
    pts = qmc.scale(sampler.random(count), -1, 1)
    return pts / np.linalg.norm(pts, axis=1, keepdims=True)


def _trace(curve: _Curve, x0, max_length: float, max_steps: int = 400000) -> TrackedLoop:
    tol = curve.tol
    t0, sigma = curve.tangent(x0)
    x, t = x0, t0
    # steps stay well inside the Newton basin: near a tight turn sigma_min is
    # comparable to the gap to the neighbouring branch
    h_safe = lambda sig: min(tol.step, tol.safety * sig / curve.hess)  # noqa: E731
    h = h_safe(sigma)
    pts = [x0]
    length = 0.0
    cos_turn = np.cos(tol.max_turn)
    for _ in range(max_steps):
        xp = x + h * t
        xc = curve.project(xp, iters=6)
        ok = xc is not None
        if ok:
            tn, sig_n = curve.tangent(xc)
            if tn @ t < 0:
                tn = -tn
            move = np.linalg.norm(xc - x)
            ok = (tn @ t > cos_turn and np.linalg.norm(xc - xp) < 0.25 * h and move > 0.5 * h
                  and h <= 2 * h_safe(sig_n))
        if not ok:
            h *= 0.5
            if h < tol.min_step:
                raise NonClosure(f"step below {tol.min_step} while tracking from {x0.tolist()}")
            continue
        # closure: does the accepted chord pass through +-x0?
        if length > 2 * tol.step:
            for s in (1.0, -1.0):
                target = s * x0
                seg = xc - x
                u = np.clip((target - x) @ seg / (seg @ seg), 0.0, 1.0)
                if np.linalg.norm(x + u * seg - target) < 0.05 * h and (s * t0) @ tn > 0.5:
                    length += u * np.linalg.norm(seg)
                    return TrackedLoop(np.array(pts), True, length, s < 0)
        length += move
        if length > max_length:
            break
        pts.append(xc)
        x, t = xc, tn
        h = min(h * 1.5, h_safe(sig_n))
    raise NonClosure(f"step budget exhausted while tracking from {x0.tolist()}")


def _covered(loops: list, x, rel: float = 0.05) -> bool:
    """x (or -x) lies on one of the chords of a traced loop, within ``rel`` of its length."""
    for lp in loops:
        P = lp.points
        Q = np.vstack([P[1:], (-P[0] if lp.one_sided else P[0])[None, :]])
        seg = Q - P
        ss = np.einsum("ij,ij->i", seg, seg)
        for s in (1.0, -1.0):
            y = s * x
            u = np.clip(np.einsum("ij,ij->i", y - P, seg) / ss, 0.0, 1.0)
            dist = np.linalg.norm(P + u[:, None] * seg - y, axis=1)
            if np.any(dist < rel * np.sqrt(ss)):
                return True
    return False


def _count(curve: _Curve, seeds, max_length: float):
    loops = []
    used = 0
    for x in seeds:
        if _covered(loops, x):
            continue
        used += 1
        loops.append(_trace(curve, x, max_length))
    return loops, used


def count_components_curve(mats, seed: int = 0, n_sobol: int = 64, tolerances: Tolerances | None = None,
                           stability: bool = True) -> ComponentCount:
    """Number of connected components of the real curve cut out by ``mats`` in RP^N."""
    tol = tolerances or Tolerances()
    A = np.asarray(mats, dtype=float)
    m, n = A.shape[0], A.shape[1]
    if m != n - 2:
        raise ValueError("expected N-1 quadrics in N+1 variables")
    curve = _Curve(A, tol)
    rng = np.random.default_rng(seed)
    crit, hres = critical_point_seeds(curve.A, rng)
    crit_pts = [p for p in (curve.project(x) for x in crit) if p is not None]
    sob = [p for p in (curve.project(x, iters=60, damped=True) for x in sobol_seeds(n, n_sobol, rng)) if p is not None]
    max_length = np.pi * 2 ** m * 1.5 + 10
    loops, used = _count(curve, crit_pts + sob, max_length)
    notes = []
    if hres.failed:
        notes.append(f"{hres.failed} of {hres.paths} critical-point paths failed")
    for lp in loops:
        res = np.abs(np.einsum("pi,kij,pj->pk", lp.points, curve.A, lp.points)).max()
        if res > tol.residual:
            raise NonClosure(f"tracked point residual {res:.3g} above tolerance")
    stab = {}
    if stability:
        # independent second pass: fresh height direction and twice the Sobol seeds
        rng2 = np.random.default_rng(seed + 1)
        crit2, _ = critical_point_seeds(curve.A, rng2)
        more = [p for p in (curve.project(x) for x in crit2) if p is not None]
        more += [p for p in (curve.project(x, iters=60, damped=True)
                             for x in sobol_seeds(n, 2 * n_sobol, rng2)) if p is not None]
        extra, _ = _count_more(curve, loops, more, max_length)
        stab = {"count": len(loops), "count_with_more_seeds": len(loops) + len(extra)}
        if extra:
            notes.append(f"{len(extra)} component(s) found only with the second seed set")
            loops = loops + extra
    for msg in notes:
        warnings.warn(msg, SeedSaturationWarning)
    seeds = {"critical_points": len(crit_pts), "sobol": len(sob), "homotopy_paths": hres.paths, "traced": used}
    return ComponentCount(len(loops), loops, seeds, notes, stab, tol, seed)


def _count_more(curve, loops, seeds, max_length):
    extra = []
    for x in seeds:
        if _covered(loops + extra, x):
            continue
        extra.append(_trace(curve, x, max_length))
    return extra, len(extra)
