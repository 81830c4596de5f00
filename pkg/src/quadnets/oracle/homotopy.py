"""Total-degree homotopy continuation for square systems of homogeneous forms.

Projective solutions are computed in a random complex affine patch
x = R (1, z), so that no solution lies at infinity with probability one. All
paths are tracked together in numpy with per-path adaptive steps.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np


@dataclass
class HomotopyResult:
    points: np.ndarray  # (P, n+1) complex homogeneous coordinates of converged endpoints
    failed: int
    paths: int
    residuals: np.ndarray


def _start_roots(degrees):
    roots = [np.exp(2j * np.pi * np.arange(d) / d) for d in degrees]
    return np.array(list(product(*roots)), dtype=complex)


def solve_projective(system, degrees, n_vars: int, rng: np.random.Generator,
                     tol: float = 1e-10, max_steps: int = 20000) -> HomotopyResult:
    """Solve ``system`` (n_vars - 1 homogeneous forms in n_vars unknowns).

    ``system(X)`` maps a (P, n_vars) complex array to a pair (values (P, m),
    jacobian (P, m, n_vars)) with m = n_vars - 1.
    """
    m = n_vars - 1
    assert len(degrees) == m
    R = rng.normal(size=(n_vars, n_vars)) + 1j * rng.normal(size=(n_vars, n_vars))
    R /= np.linalg.norm(R, axis=0, keepdims=True)
    gamma = np.exp(2j * np.pi * rng.random())
    deg = np.array(degrees)

    def lift(z):
        return np.concatenate([np.ones((z.shape[0], 1), dtype=complex), z], axis=1) @ R.T

    def target(z):
        F, J = system(lift(z))
        return F, J @ R[:, 1:]

    def start(z):
        G = z ** deg - 1
        JG = np.zeros((z.shape[0], m, m), dtype=complex)
        idx = np.arange(m)
        JG[:, idx, idx] = deg * z ** (deg - 1)
        return G, JG

    def H(z, t):
        F, JF = target(z)
        G, JG = start(z)
        tt = t[:, None]
        return (1 - tt) * gamma * G + tt * F, (1 - tt)[:, :, None] * gamma * JG + t[:, None, None] * JF, F - gamma * G

    z = _start_roots(degrees)
    P = z.shape[0]
    t = np.zeros(P)
    dt = np.full(P, 0.02)
    active = np.ones(P, dtype=bool)
    failed = np.zeros(P, dtype=bool)
    steps = 0
    while active.any() and steps < max_steps:
        steps += 1
        ia = np.flatnonzero(active)
        za, ta, ha = z[ia], t[ia], np.minimum(dt[ia], 1 - t[ia])
        # RK4 predictor for dz/dt = -H_z^{-1} H_t
        def velocity(zz, tt):
            _, Hz, Ht = H(zz, tt)
            try:
                return -np.linalg.solve(Hz, Ht[:, :, None])[:, :, 0]
            except np.linalg.LinAlgError:
                return np.full_like(zz, np.nan)

        k1 = velocity(za, ta)
        k2 = velocity(za + 0.5 * ha[:, None] * k1, ta + 0.5 * ha)
        k3 = velocity(za + 0.5 * ha[:, None] * k2, ta + 0.5 * ha)
        k4 = velocity(za + ha[:, None] * k3, ta + ha)
        zp = za + ha[:, None] * (k1 + 2 * k2 + 2 * k3 + k4) / 6
        tn = ta + ha
        ok = np.isfinite(zp).all(axis=1)
        zc = np.where(ok[:, None], zp, za)
        for _ in range(3):
            Hv, Hz, _ = H(zc, tn)
            try:
                delta = np.linalg.solve(Hz, Hv[:, :, None])[:, :, 0]
            except np.linalg.LinAlgError:
                delta = np.full_like(zc, np.nan)
            zc = zc - delta
        Hv, _, _ = H(zc, tn)
        scale = 1 + np.abs(zc).max(axis=1)
        good = ok & np.isfinite(zc).all(axis=1) & (np.abs(delta).max(axis=1) < 1e-7 * scale)
        good &= np.abs(zc - zp).max(axis=1) < 0.1 * scale
        accepted = ia[good]
        z[accepted] = zc[good]
        t[accepted] = tn[good]
        dt[accepted] = np.minimum(dt[accepted] * 1.6, 0.1)
        rejected = ia[~good]
        dt[rejected] *= 0.5
        finished = accepted[t[accepted] >= 1 - 1e-15]
        active[finished] = False
        dead = rejected[dt[rejected] < 1e-13]
        failed[dead] = True
        active[dead] = False
        huge = ia[np.abs(z[ia]).max(axis=1) > 1e8]
        failed[huge] = True
        active[huge] = False
    failed |= active
    # Newton polish at t = 1
    zf = z[~failed]
    for _ in range(8):
        if not len(zf):
            break
        F, J = target(zf)
        try:
            zf = zf - np.linalg.solve(J, F[:, :, None])[:, :, 0]
        except np.linalg.LinAlgError:
            break
    X = lift(zf) if len(zf) else np.zeros((0, n_vars), dtype=complex)
    if len(X):
        X = X / np.linalg.norm(X, axis=1, keepdims=True)
        res = np.abs(system(X)[0]).max(axis=1)
    else:
        res = np.zeros(0)
    return HomotopyResult(X, int(failed.sum()), P, res)


def real_representatives(X: np.ndarray, tol: float = 1e-7) -> np.ndarray:
    """Real unit vectors for the nearly real projective points among the rows of X."""
    out = []
    for x in X:
        k = np.argmax(np.abs(x))
        y = x / x[k]
        if np.abs(y.imag).max() < tol * max(1.0, np.abs(y).max()):
            v = y.real
            out.append(v / np.linalg.norm(v))
    return np.array(out).reshape(-1, X.shape[1] if len(X.shape) == 2 else 0)


def quadrics_system(mats):
    """Evaluator for the forms x^T A_i x."""
    A = np.asarray(mats, dtype=complex)

    def system(X):
        AX = np.einsum("kij,pj->pki", A, X)
        F = np.einsum("pi,pki->pk", X, AX)
        return F, 2 * AX

    return system
