"""Convergence constants of the oblique greedy methods and their per-step factors.

With ``F = ||A||_F^2`` and ``lam`` the smallest nonzero eigenvalue of ``A^T A``:

* ``gamma1`` is the largest sum of squared row norms leaving one row out,
  ``gamma2`` the same leaving two rows out;
* ``delta`` is the largest squared sine of the angle between two distinct rows;
* GRKO contracts in expectation by ``zeta0`` (first step), ``zeta1``, then ``zeta_k``;
* MWRKO contracts deterministically by ``rho0``, ``rho1``, then ``rho_k``.
"""
from __future__ import annotations

import warnings
from dataclasses import asdict, dataclass

import numpy as np

from .linalg import SparseRowMatrix
from .oracle import RANK_CUTOFF, dense_sym_eig

DELTA_SCAN_LIMIT = 5000


@dataclass(frozen=True)
class ConvergenceConstants:
    lambda_min_nz: float
    gamma1: float
    gamma2: float | None
    delta: float | None
    frob_sq: float
    m: int


@dataclass(frozen=True)
class BoundFactors:
    zeta0: float
    zeta1: float | None
    zeta_k: float | None
    rho0: float
    rho1: float | None
    rho_k: float | None
    # orthogonal-projection baselines, for comparison only
    grk_zeta_k: float
    mwrk_rho0: float
    mwrk_rho_k: float
    negative: tuple[str, ...] = ()

    def as_dict(self) -> dict:
        d = asdict(self)
        d["negative"] = list(self.negative)
        return d

    def rho(self, step: int) -> float | None:
        """MWRKO factor for the step taking iterate `step` to `step + 1`."""
        return self.rho0 if step == 0 else self.rho1 if step == 1 else self.rho_k

    def zeta(self, step: int) -> float | None:
        return self.zeta0 if step == 0 else self.zeta1 if step == 1 else self.zeta_k


def smallest_nonzero_eigenvalue(A: SparseRowMatrix) -> float:
    """Smallest eigenvalue of the smaller Gram matrix above the shared rank cutoff."""
    a = A.to_dense()
    G = a.T @ a if A.n_cols <= A.n_rows else a @ a.T
    lam, _ = dense_sym_eig(G)
    return float(lam[lam > RANK_CUTOFF * lam[-1]][0])


def max_squared_sine(A: SparseRowMatrix, block: int = 512) -> float:
    """``max_{j != k} 1 - cos^2(a_j, a_k)`` by a blockwise pairwise scan."""
    a = A.to_dense() / np.sqrt(A.row_norms_sq)[:, None]
    m = a.shape[0]
    best = -np.inf
    for lo in range(0, m, block):
        cos = a[lo:lo + block] @ a.T
        sin2 = 1.0 - cos * cos
        rows = np.arange(lo, min(lo + block, m))
        sin2[rows - lo, rows] = -np.inf
        best = max(best, float(sin2.max()))
    return min(max(best, 0.0), 1.0)


def compute_constants(A: SparseRowMatrix, delta_limit: int = DELTA_SCAN_LIMIT) -> ConvergenceConstants:
    """Constants for `A`. ``gamma2`` is None when m < 3; ``delta`` is None when
    m < 2 or m exceeds `delta_limit`."""
    M = np.sort(A.row_norms_sq)
    F = A.frob_sq
    m = A.n_rows
    gamma1 = F - M[0]
    gamma2 = F - (M[0] + M[1]) if m >= 3 else None
    if m < 2:
        delta = None
    elif m > delta_limit:
        warnings.warn(f"{m} rows exceeds the pairwise scan limit {delta_limit}; delta unavailable")
        delta = None
    else:
        delta = max_squared_sine(A)
    return ConvergenceConstants(smallest_nonzero_eigenvalue(A), float(gamma1),
                                None if gamma2 is None else float(gamma2), delta, F, m)


def bound_factors(c: ConvergenceConstants) -> BoundFactors:
    """Per-step contraction factors. Negative factors are reported in ``negative``, not clamped."""
    lam, F, m = c.lambda_min_nz, c.frob_sq, c.m
    g1, g2, d = c.gamma1, c.gamma2, c.delta

    def defined(*xs):
        return all(x is not None for x in xs) and all(x > 0 for x in xs)

    f = dict(
        zeta0=1.0 - lam / (m * F),
        zeta1=1.0 - 0.5 * (F / g1 + 1.0) * lam / (d * F) if defined(g1, d) else None,
        zeta_k=1.0 - 0.5 * (F / g2 + 1.0) * lam / (d * F) if defined(g2, d) else None,
        rho0=1.0 - lam / F,
        rho1=1.0 - lam / (d * g1) if defined(g1, d) else None,
        rho_k=1.0 - lam / (d * g2) if defined(g2, d) else None,
        grk_zeta_k=1.0 - 0.5 * (F / g1 + 1.0) * lam / F if g1 > 0 else 1.0 - lam / F,
        mwrk_rho0=1.0 - lam / F,
        mwrk_rho_k=1.0 - lam / g1 if g1 > 0 else 1.0 - lam / F,
    )
    negative = tuple(k for k, v in f.items() if v is not None and v < 0)
    return BoundFactors(**f, negative=negative)


@dataclass
class ContractionReport:
    violations: list[int]
    ratios: list[float | None]

    @property
    def ok(self) -> bool:
        return not self.violations


def check_contraction(errors_sq, factors: BoundFactors, mode: str = "per-step",
                      rtol: float = 1e-8, atol: float = 0.0) -> ContractionReport:
    """Check a history of squared errors ``||x^(k) - x~||^2`` against the factors.

    ``mode="per-step"`` (MWRKO): step ``k -> k+1`` is flagged when
    ``e[k+1] > rho(k) * e[k] * (1 + rtol) + atol``.

    ``mode="expected"`` (GRKO): `errors_sq` is an averaged history and each
    entry is compared with the cumulative product ``prod_{s<k} zeta(s) * e[0]``.
    Steps whose factor is undefined are skipped.
    """
    e = [float(v) for v in errors_sq]
    violations, ratios = [], []
    if mode == "per-step":
        for k in range(len(e) - 1):
            rho = factors.rho(k)
            ratios.append(e[k + 1] / e[k] if e[k] > 0 else None)
            if rho is not None and e[k + 1] > rho * e[k] * (1 + rtol) + atol:
                violations.append(k)
    elif mode == "expected":
        bound = e[0] if e else 0.0
        for k in range(len(e) - 1):
            zeta = factors.zeta(k)
            if zeta is None:
                break
            bound *= zeta
            ratios.append(e[k + 1] / e[0] if e[0] > 0 else None)
            if e[k + 1] > bound * (1 + rtol) + atol:
                violations.append(k)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return ContractionReport(violations, ratios)
