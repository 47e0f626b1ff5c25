"""Small dense reference computations used to check the iterative solvers.

Nothing in the solve path imports this module.
"""
from __future__ import annotations

import numpy as np

from .linalg import SparseRowMatrix, as_vector

RANK_CUTOFF = 1e-10
"""Eigenvalues at or below ``RANK_CUTOFF * lambda_max`` are treated as zero."""


class InconsistentSystemError(ValueError):
    def __init__(self, residual_norm: float, b_norm: float):
        super().__init__(
            f"system is not consistent: ||b - A x|| = {residual_norm:.3e} (||b|| = {b_norm:.3e})"
        )
        self.residual_norm = residual_norm


def _dense(A) -> np.ndarray:
    if isinstance(A, SparseRowMatrix):
        return A.to_dense()
    a = np.asarray(A, dtype=np.float64)
    if a.ndim != 2 or not np.all(np.isfinite(a)):
        raise ValueError("expected a finite 2-D array")
    return a


def _round_robin(n: int):
    """Yield n-1 (or n, for odd n) rounds of disjoint index pairs covering all pairs once."""
    players = list(range(n)) + ([-1] if n % 2 else [])
    size = len(players)
    for _ in range(size - 1):
        pairs = [(players[k], players[size - 1 - k]) for k in range(size // 2)]
        pairs = [(min(p, q), max(p, q)) for p, q in pairs if p >= 0 and q >= 0]
        if pairs:
            p, q = np.array(pairs).T
            yield p, q
        players = [players[0], players[-1]] + players[1:-1]


def dense_sym_eig(M, tol: float = 1e-12, max_sweeps: int = 60) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.

    Each sweep visits every off-diagonal pair once in round-robin order; the
    rotations of one round act on disjoint index pairs and are applied together.

    Parameters
    ----------
    M : array_like, shape (n, n)
        Symmetric to relative 1e-10.
    tol : float
        Stop once the off-diagonal Frobenius norm is below ``tol * ||M||_F``.

    Returns
    -------
    eigenvalues : ndarray, shape (n,)
        Ascending.
    eigenvectors : ndarray, shape (n, n)
        Orthonormal columns, ``M V = V diag(eigenvalues)``.
    """
    a = np.array(M, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    n = a.shape[0]
    scale = np.linalg.norm(a)
    if np.linalg.norm(a - a.T) > 1e-10 * max(scale, np.finfo(float).tiny):
        raise ValueError("matrix is not symmetric")
    a = 0.5 * (a + a.T)
    v = np.eye(n)
    rounds = list(_round_robin(n)) if n > 1 else []

    off_mask = ~np.eye(n, dtype=bool)

    def off_norm():
        # summed directly: subtracting the diagonal from ||a||_F cancels badly
        return float(np.linalg.norm(a[off_mask]))

    for _ in range(max_sweeps):
        if off_norm() <= tol * scale:
            break
        for p, q in rounds:
            apq = a[p, q]
            active = apq != 0.0
            if not np.any(active):
                continue
            p, q, apq = p[active], q[active], apq[active]
            theta = (a[q, q] - a[p, p]) / (2.0 * apq)
            t = np.where(theta >= 0, 1.0, -1.0) / (np.abs(theta) + np.hypot(theta, 1.0))
            c = 1.0 / np.sqrt(t * t + 1.0)
            s = t * c
            ap, aq = a[p, :].copy(), a[q, :].copy()
            a[p, :] = c[:, None] * ap - s[:, None] * aq
            a[q, :] = s[:, None] * ap + c[:, None] * aq
            ap, aq = a[:, p].copy(), a[:, q].copy()
            a[:, p] = ap * c - aq * s
            a[:, q] = ap * s + aq * c
            vp, vq = v[:, p].copy(), v[:, q].copy()
            v[:, p] = vp * c - vq * s
            v[:, q] = vp * s + vq * c
    else:
        if off_norm() > tol * scale:
            raise RuntimeError("Jacobi iteration did not converge")

    w = np.diag(a).copy()
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]


def _pinv_apply(G: np.ndarray):
    """Return a function applying the pseudoinverse of the PSD Gram matrix `G`."""
    lam, V = dense_sym_eig(G)
    cut = RANK_CUTOFF * max(lam[-1], 0.0)
    keep = lam > cut
    Vk, inv = V[:, keep], 1.0 / lam[keep]
    return lambda y: Vk @ (inv * (Vk.T @ y))


def least_norm_solution(A, b, refine: int = 2, check: bool = True) -> np.ndarray:
    """Minimum Euclidean norm solution ``A^+ b`` of a consistent system.

    Works on the smaller Gram matrix: ``x = A^T (A A^T)^+ b`` when m <= n and
    ``x = (A^T A)^+ A^T b`` otherwise. `refine` extra correction passes are
    applied to the residual. Raises :class:`InconsistentSystemError` if the
    result leaves ``||b - A x|| > 1e-8 ||b||``.
    """
    a = _dense(A)
    m, n = a.shape
    b = as_vector(b, m, "b")
    if m <= n:
        apply = _pinv_apply(a @ a.T)
        solve = lambda rhs: a.T @ apply(rhs)
    else:
        apply = _pinv_apply(a.T @ a)
        solve = lambda rhs: apply(a.T @ rhs)
    x = solve(b)
    for _ in range(refine):
        x = x + solve(b - a @ x)
    if check:
        res = float(np.linalg.norm(b - a @ x))
        bn = float(np.linalg.norm(b))
        if res > 1e-8 * bn:
            raise InconsistentSystemError(res, bn)
    return x
