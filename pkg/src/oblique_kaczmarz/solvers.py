"""Orthogonal and oblique projection steps and the Kaczmarz-type solve loops.

Methods
-------
``cyclic``  classic Kaczmarz, row ``k mod m``, orthogonal steps.
``grk``     greedy randomized selection, orthogonal steps.
``grko``    greedy randomized selection, oblique steps after the first.
``mwrk``    maximal weighted residual selection, orthogonal steps.
``mwrko``   maximal weighted residual selection, oblique steps after the first.

The oblique step moves along ``w = a_j - (<a_i, a_j> / ||a_i||^2) a_i`` where
``i`` is the previously projected row, so the new iterate lies on both
hyperplanes ``i`` and ``j``.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .linalg import SparseRowMatrix, as_vector, row_pair_dot
from .selection import (
    AlreadyConverged,
    RngStream,
    build_greedy_set,
    make_rng,
    sample_from_greedy_set,
    select_cyclic,
    select_first_index_uniform,
    select_max_weighted_residual,
)

METHODS = ("cyclic", "grk", "grko", "mwrk", "mwrko")
OBLIQUE_METHODS = frozenset({"grko", "mwrko"})


@dataclass
class SolverConfig:
    method: str = "grko"
    omega: float = 0.5e-8
    max_iters: int = 100_000
    seed: int = 0
    history_stride: int | None = None
    degenerate_h_rel_tol: float = 1e-14

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}; choose from {', '.join(METHODS)}")
        if not self.omega > 0:
            raise ValueError("omega must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")
        if self.history_stride is not None and self.history_stride < 1:
            raise ValueError("history_stride must be at least 1")

    def stride_for(self, A: SparseRowMatrix) -> int:
        """History stride, defaulting to 10 for systems with more than 1e6 entries."""
        if self.history_stride is not None:
            return self.history_stride
        return 10 if A.n_rows * A.n_cols > 1_000_000 else 1


@dataclass
class SolverState:
    """Iterate, its residual ``b - A x``, and the last projected row."""

    x: np.ndarray
    r: np.ndarray
    prev_index: int | None = None
    k: int = 0
    degenerate_h_events: int = 0

    @classmethod
    def initial(cls, A: SparseRowMatrix, b, x0=None) -> "SolverState":
        b = as_vector(b, A.n_rows, "b")
        x = np.zeros(A.n_cols) if x0 is None else as_vector(x0, A.n_cols, "x0").copy()
        return cls(x=x, r=b - A._csr @ x)

    def copy(self) -> "SolverState":
        return SolverState(self.x.copy(), self.r.copy(), self.prev_index, self.k, self.degenerate_h_events)


@dataclass
class ObliqueStepScratch:
    D: float
    w: np.ndarray
    h: float
    alpha: float
    fallback: bool = False


@dataclass
class StepInfo:
    """Passed to the optional per-iteration callback of :func:`solve`."""

    k: int
    index: int
    prev_index: int | None
    kind: str  # "orthogonal", "oblique" or "fallback"
    x_before: np.ndarray
    state: SolverState
    scratch: ObliqueStepScratch | None = None


@dataclass
class SolveReport:
    final_x: np.ndarray
    iterations: int
    converged: bool
    rre_history: list[tuple[int, float]]
    wall_time: float
    method: str
    final_rre: float
    degenerate_h_events: int = 0
    history_wall_ns: list[int] = field(default_factory=list)

    def summary(self) -> dict:
        return {
            "method": self.method,
            "iterations": self.iterations,
            "converged": self.converged,
            "final_rre": self.final_rre,
            "degenerate_h_events": self.degenerate_h_events,
        }


def _refresh_residual(state: SolverState, A: SparseRowMatrix, b: np.ndarray):
    state.r = b - A._csr @ state.x


def orthogonal_step(state: SolverState, A: SparseRowMatrix, b, i: int) -> SolverState:
    """Project ``state.x`` orthogonally onto hyperplane `i`, in place."""
    cols, vals = A.row(i)
    step = state.r[i] / A.row_norms_sq[i]
    if step != 0.0:
        state.x[cols] += step * vals
    _refresh_residual(state, A, b)
    state.prev_index = i
    state.k += 1
    return state


def oblique_step(
    state: SolverState, A: SparseRowMatrix, b, i_next: int, degenerate_h_rel_tol: float = 1e-14
) -> tuple[SolverState, ObliqueStepScratch]:
    """Project onto hyperplane `i_next` along ``w``, staying on hyperplane ``state.prev_index``.

    When ``h = ||w||^2`` falls below ``degenerate_h_rel_tol * M(i_next)`` the
    two rows are numerically parallel; the step then falls back to an
    orthogonal projection and increments ``state.degenerate_h_events``.
    """
    i = state.prev_index
    if i is None:
        raise ValueError("oblique_step needs a previous row index")
    M_i = A.row_norms_sq[i]
    M_j = A.row_norms_sq[i_next]
    D = row_pair_dot(A, i, i_next)
    h = M_j - D * D / M_i
    ci, vi = A.row(i)
    cj, vj = A.row(i_next)
    w = np.zeros(A.n_cols)
    w[cj] += vj
    w[ci] -= (D / M_i) * vi

    if h <= degenerate_h_rel_tol * M_j:
        state.degenerate_h_events += 1
        alpha = state.r[i_next] / M_j
        orthogonal_step(state, A, b, i_next)
        return state, ObliqueStepScratch(D, w, h, alpha, fallback=True)

    alpha = state.r[i_next] / h
    if alpha != 0.0:
        state.x += alpha * w
    _refresh_residual(state, A, b)
    state.prev_index = i_next
    state.k += 1
    return state, ObliqueStepScratch(D, w, h, alpha)


def select_next(state: SolverState, A: SparseRowMatrix, method: str, rng: RngStream) -> int:
    """Row index the given method projects onto from `state`."""
    if method == "cyclic":
        return select_cyclic(state.k, A.n_rows)
    if method in ("mwrk", "mwrko"):
        return select_max_weighted_residual(state.r, A.row_norms_sq)
    if method == "grko" and state.k == 0:
        if not np.any(state.r):
            raise AlreadyConverged("residual is zero")
        return select_first_index_uniform(A.n_rows, rng)
    sel = build_greedy_set(state.r, A.row_norms_sq, A.frob_sq)
    return sample_from_greedy_set(sel, state.r, rng)


def advance(
    state: SolverState, A: SparseRowMatrix, b, method: str, rng: RngStream,
    degenerate_h_rel_tol: float = 1e-14,
) -> tuple[int, str, ObliqueStepScratch | None]:
    """Perform one iteration of `method` in place.

    Returns the projected row, the step kind and the oblique scratch values
    (``None`` for orthogonal steps). Raises :class:`AlreadyConverged` when the
    residual is exactly zero.
    """
    i = select_next(state, A, method, rng)
    if method in OBLIQUE_METHODS and state.prev_index is not None:
        _, scratch = oblique_step(state, A, b, i, degenerate_h_rel_tol)
        return i, ("fallback" if scratch.fallback else "oblique"), scratch
    orthogonal_step(state, A, b, i)
    return i, "orthogonal", None


def rre(A: SparseRowMatrix, b, x) -> float:
    """Relative residual error ``||b - A x||^2 / ||b||^2``."""
    b = as_vector(b, A.n_rows, "b")
    r = b - A.matvec(x)
    return _rre(r, float(b @ b))


def _rre(r: np.ndarray, bnorm_sq: float) -> float:
    rn = float(r @ r)
    if bnorm_sq == 0.0:
        if rn == 0.0:
            return 0.0
        raise ValueError("RRE undefined for zero b")
    return rn / bnorm_sq


def solve(
    problem, config: SolverConfig, x0=None, callback: Callable[[StepInfo], None] | None = None
) -> SolveReport:
    """Run `config.method` on ``problem.A x = problem.b`` until RRE < omega or the cap.

    The iterate starts at zero unless `x0` is given. Convergence is tested
    every ``history_stride`` iterations; the cap is tested every iteration.
    """
    A, b = problem.A, as_vector(problem.b, problem.A.n_rows, "b")
    rng = make_rng(config.seed)
    stride = config.stride_for(A)
    bnorm_sq = float(b @ b)

    t0 = time.perf_counter_ns()
    state = SolverState.initial(A, b, x0)
    value = _rre(state.r, bnorm_sq)
    history = [(0, value)]
    walls = [0]
    converged = value < config.omega

    while not converged and state.k < config.max_iters:
        x_before = state.x.copy() if callback is not None else None
        prev = state.prev_index
        try:
            i, kind, scratch = advance(state, A, b, config.method, rng, config.degenerate_h_rel_tol)
        except AlreadyConverged:
            if history[-1][0] != state.k:
                history.append((state.k, 0.0))
                walls.append(time.perf_counter_ns() - t0)
            converged = True
            break
        if callback is not None:
            callback(StepInfo(state.k, i, prev, kind, x_before, state, scratch))
        if state.k % stride == 0 or state.k == config.max_iters:
            value = _rre(state.r, bnorm_sq)
            history.append((state.k, value))
            walls.append(time.perf_counter_ns() - t0)
            converged = value < config.omega

    elapsed = (time.perf_counter_ns() - t0) / 1e9
    return SolveReport(
        final_x=state.x,
        iterations=state.k,
        converged=converged,
        rre_history=history,
        wall_time=elapsed,
        method=config.method,
        final_rre=_rre(state.r, bnorm_sq),
        degenerate_h_events=state.degenerate_h_events,
        history_wall_ns=walls,
    )
