"""Jacobi eigensolver for small dense symmetric matrices."""
from __future__ import annotations

from functools import lru_cache

import numpy as np


@lru_cache(maxsize=64)
def _round_robin(n: int):
    """Pairings covering every index pair once per sweep, ``n // 2`` disjoint pairs per round."""
    m = n + (n % 2)
    players = list(range(m))
    rounds = []
    for _ in range(m - 1):
        pairs = [(players[i], players[m - 1 - i]) for i in range(m // 2)]
        pairs = [(min(p), max(p)) for p in pairs if max(p) < n]
        rounds.append((np.array([p for p, _ in pairs], dtype=int), np.array([q for _, q in pairs], dtype=int)))
        players = [players[0], players[-1]] + players[1:-1]
    return rounds


def jacobi_eigh(a, *, tol: float = 1e-14, max_sweeps: int = 60):
    """Eigen-decomposition of a real symmetric matrix.

    Returns ``(w, v)`` with eigenvalues ``w`` ascending and orthonormal
    eigenvectors in the columns of ``v``, like :func:`numpy.linalg.eigh`.

    Each sweep visits every off-diagonal pair once in round-robin order;
    the pairs of one round are disjoint, so their rotations are applied
    together as one orthogonal matrix. Iteration stops once the
    off-diagonal Frobenius mass is below ``tol * ||a||_F``.
    """
    a = np.array(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("jacobi_eigh needs a square matrix")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    scale = np.linalg.norm(a)
    if not np.allclose(a, a.T, rtol=0, atol=1e-12 * max(scale, 1.0)):
        raise ValueError("matrix is not symmetric")
    a = (a + a.T) / 2
    n = a.shape[0]
    v = np.eye(n)
    rounds = _round_robin(n) if n > 1 else []
    for _ in range(max_sweeps):
        if np.sqrt(2 * np.sum(np.triu(a, 1) ** 2)) <= tol * scale:
            break
        for p, q in rounds:
            apq = a[p, q]
            diff = a[q, q] - a[p, p]
            # rotations whose angle is below rounding just annihilate a[p, q]
            active = np.abs(apq) >= 1e-18 * np.abs(diff)
            safe = np.where(active, apq, 1.0)
            theta = np.where(active, diff / (2 * safe), 0.0)
            t = np.where(active, np.copysign(1.0, theta) / (np.abs(theta) + np.hypot(theta, 1.0)), 0.0)
            c = 1 / np.hypot(t, 1.0)
            s = t * c
            rot = np.eye(n)
            rot[p, p] = c
            rot[q, q] = c
            rot[p, q] = s
            rot[q, p] = -s
            a = rot.T @ a @ rot
            a[p, q] = a[q, p] = 0.0
            v = v @ rot
    else:
        raise RuntimeError("Jacobi iteration did not converge")
    w = np.diag(a).copy()
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]
