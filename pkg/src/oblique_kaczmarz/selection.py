"""Row-index selection rules.

Random draws come from :class:`numpy.random.Generator` seeded through
:func:`make_rng` (PCG64). Streams are deterministic per seed within one
numpy version; no cross-implementation bit compatibility is promised.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

RngStream = np.random.Generator


class AlreadyConverged(Exception):
    """The residual is exactly zero, so there is no row left to select."""


def make_rng(seed: int | np.random.SeedSequence | None) -> RngStream:
    return np.random.Generator(np.random.PCG64(seed))


@dataclass
class GreedySelection:
    """Thresholded candidate set of the greedy randomized rule.

    Attributes
    ----------
    epsilon : float
        Threshold factor for the current iterate.
    index_set : ndarray of int
        Sorted row indices ``i`` with ``r_i^2 >= epsilon * ||r||^2 * M(i)``.
    truncated_residual_sq_sum : float
        Sum of ``r_i^2`` over `index_set`.
    chosen : int or None
        Filled in by :func:`sample_from_greedy_set`.
    """

    epsilon: float
    index_set: np.ndarray
    truncated_residual_sq_sum: float
    chosen: int | None = None


def select_max_weighted_residual(r, norms_sq) -> int:
    """Index maximizing ``|r_i| / ||a_i||``; ties go to the lowest index."""
    r = np.asarray(r, dtype=np.float64)
    weights = r * r / np.asarray(norms_sq, dtype=np.float64)
    i = int(np.argmax(weights))
    if weights[i] == 0.0:
        raise AlreadyConverged("residual is zero")
    return i


def build_greedy_set(r, norms_sq, frob_sq: float) -> GreedySelection:
    r = np.asarray(r, dtype=np.float64)
    norms_sq = np.asarray(norms_sq, dtype=np.float64)
    r2 = r * r
    rnorm_sq = float(r2.sum())
    if rnorm_sq == 0.0:
        raise AlreadyConverged("residual is zero")
    ratios = r2 / norms_sq
    top = int(np.argmax(ratios))
    eps = 0.5 * (ratios[top] / rnorm_sq + 1.0 / frob_sq)
    member = r2 >= eps * rnorm_sq * norms_sq
    # the maximizer satisfies the inequality in exact arithmetic; keep it under rounding
    member[top] = True
    idx = np.flatnonzero(member)
    return GreedySelection(float(eps), idx, float(r2[idx].sum()))


def sample_from_greedy_set(sel: GreedySelection, r, rng: RngStream) -> int:
    """Draw ``i`` from ``sel.index_set`` with probability ``r_i^2 / sum_U r_j^2``.

    One uniform draw is inverted through the cumulative weights. The result is
    also stored in ``sel.chosen``.
    """
    idx = sel.index_set
    if idx.size == 0:
        raise RuntimeError("greedy index set is empty")
    if idx.size == 1:
        sel.chosen = int(idx[0])
        return sel.chosen
    r = np.asarray(r, dtype=np.float64)
    cum = np.cumsum(r[idx] ** 2)
    u = rng.random() * cum[-1]
    pos = min(int(np.searchsorted(cum, u, side="right")), idx.size - 1)
    sel.chosen = int(idx[pos])
    return sel.chosen


def select_first_index_uniform(m: int, rng: RngStream) -> int:
    if m < 1:
        raise ValueError("cannot select a row from an empty system")
    return int(rng.integers(m))


def select_cyclic(k: int, m: int) -> int:
    return k % m
