"""Kaczmarz-type row-action solvers with oblique projection (GRKO, MWRKO) and
their orthogonal baselines (cyclic Kaczmarz, GRK, MWRK)."""

__version__ = "0.1.0"

from .linalg import (SparseRowMatrix, ShapeError, ZeroRowError, normalize_rows, residual,
                     row_dot, row_pair_dot)
from .selection import (AlreadyConverged, GreedySelection, build_greedy_set, make_rng,
                        sample_from_greedy_set, select_cyclic, select_first_index_uniform,
                        select_max_weighted_residual)
from .solvers import (METHODS, SolveReport, SolverConfig, SolverState, advance, oblique_step,
                      orthogonal_step, rre, solve)
from .analysis import (BoundFactors, ConvergenceConstants, bound_factors, check_contraction,
                       compute_constants)
from .problems import (Problem, density, gen_uniform, generate_problem, load_matrix_market,
                       load_problem, make_consistent)
from .oracle import dense_sym_eig, least_norm_solution
