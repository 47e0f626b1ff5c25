"""Row-oriented sparse storage and the row-level kernels used by the solvers.

All scalars are float64. Dense inputs are stored in the same CSR layout, so
dense random experiments and sparse file-based experiments share one path.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp


class ShapeError(ValueError):
    """Raised when operand dimensions do not agree."""


class ZeroRowError(ValueError):
    """Raised when a matrix row has no nonzero stored value."""

    def __init__(self, row: int):
        super().__init__(f"row {row} is identically zero; drop it before constructing the matrix")
        self.row = row


def as_vector(x, length: int | None = None, name: str = "vector") -> np.ndarray:
    """Return `x` as a finite 1-D float64 array, optionally checking its length."""
    v = np.asarray(x, dtype=np.float64)
    if v.ndim != 1:
        raise ShapeError(f"{name} must be one-dimensional, got shape {v.shape}")
    if length is not None and v.shape[0] != length:
        raise ShapeError(f"{name} has length {v.shape[0]}, expected {length}")
    if not np.all(np.isfinite(v)):
        raise ValueError(f"{name} contains NaN or Inf")
    return v


@dataclass(frozen=True, eq=False)
class SparseRowMatrix:
    """Immutable CSR matrix with cached squared row norms.

    Use :meth:`from_triplets` or :meth:`from_dense` rather than the raw
    constructor; they sort columns and merge duplicates.

    Attributes
    ----------
    n_rows, n_cols : int
    row_offsets : ndarray of int64, shape (n_rows + 1,)
    col_indices : ndarray of int64, shape (nnz,)
    values : ndarray of float64, shape (nnz,)
    row_norms_sq : ndarray of float64, shape (n_rows,)
        ``M(i) = ||a_i||^2``.
    frob_sq : float
        ``||A||_F^2``.
    """

    n_rows: int
    n_cols: int
    row_offsets: np.ndarray
    col_indices: np.ndarray
    values: np.ndarray
    row_norms_sq: np.ndarray = field(init=False)
    frob_sq: float = field(init=False)
    _csr: sp.csr_matrix = field(init=False, repr=False)
    _full_rows: bool = field(init=False, repr=False)

    def __post_init__(self):
        offsets = np.asarray(self.row_offsets, dtype=np.int64)
        cols = np.asarray(self.col_indices, dtype=np.int64)
        vals = np.asarray(self.values, dtype=np.float64)
        if self.n_rows < 1 or self.n_cols < 1:
            raise ShapeError(f"empty matrix shape ({self.n_rows}, {self.n_cols})")
        if offsets.shape != (self.n_rows + 1,) or offsets[0] != 0 or offsets[-1] != cols.shape[0]:
            raise ShapeError("row_offsets inconsistent with stored entries")
        if np.any(np.diff(offsets) < 0):
            raise ValueError("row_offsets must be non-decreasing")
        if cols.shape != vals.shape:
            raise ShapeError("col_indices and values differ in length")
        if cols.size and (cols.min() < 0 or cols.max() >= self.n_cols):
            raise IndexError("column index out of range")
        if not np.all(np.isfinite(vals)):
            raise ValueError("matrix contains NaN or Inf")
        # strictly increasing columns within each row
        if cols.size > 1:
            step = np.diff(cols)
            row_start = np.zeros(cols.size, dtype=bool)
            row_start[offsets[1:-1][offsets[1:-1] < cols.size]] = True
            if np.any((step <= 0) & ~row_start[1:]):
                raise ValueError("column indices must be strictly increasing within each row")

        sq = vals * vals
        counts = np.diff(offsets)
        norms = np.zeros(self.n_rows)
        nonempty = counts > 0
        norms[nonempty] = np.add.reduceat(sq, offsets[:-1][nonempty])
        zero_rows = np.flatnonzero(norms == 0.0)
        if zero_rows.size:
            raise ZeroRowError(int(zero_rows[0]))

        for name, arr in (("row_offsets", offsets), ("col_indices", cols), ("values", vals)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        norms.setflags(write=False)
        object.__setattr__(self, "row_norms_sq", norms)
        object.__setattr__(self, "frob_sq", float(norms.sum()))
        object.__setattr__(
            self, "_csr", sp.csr_matrix((vals, cols, offsets), shape=(self.n_rows, self.n_cols))
        )
        object.__setattr__(self, "_full_rows", bool(np.all(counts == self.n_cols)))

    @classmethod
    def from_triplets(cls, rows, cols, vals, shape: tuple[int, int]) -> "SparseRowMatrix":
        """Build from coordinate triplets (0-based); duplicate entries are summed."""
        m, n = int(shape[0]), int(shape[1])
        rows = np.asarray(rows, dtype=np.int64).ravel()
        cols = np.asarray(cols, dtype=np.int64).ravel()
        vals = np.asarray(vals, dtype=np.float64).ravel()
        if not (rows.shape == cols.shape == vals.shape):
            raise ShapeError("triplet arrays differ in length")
        if rows.size and (rows.min() < 0 or rows.max() >= m):
            raise IndexError("row index out of range")
        if cols.size and (cols.min() < 0 or cols.max() >= n):
            raise IndexError("column index out of range")
        keys = rows * n + cols
        uniq, inverse = np.unique(keys, return_inverse=True)
        summed = np.zeros(uniq.size)
        np.add.at(summed, inverse, vals)
        r = uniq // n
        offsets = np.zeros(m + 1, dtype=np.int64)
        np.cumsum(np.bincount(r, minlength=m), out=offsets[1:])
        return cls(m, n, offsets, uniq % n, summed)

    @classmethod
    def from_dense(cls, dense) -> "SparseRowMatrix":
        """Build from a dense 2-D array, storing every nonzero entry."""
        a = np.asarray(dense, dtype=np.float64)
        if a.ndim != 2:
            raise ShapeError(f"expected a 2-D array, got shape {a.shape}")
        r, c = np.nonzero(a)
        return cls.from_triplets(r, c, a[r, c], a.shape)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n_rows, self.n_cols)

    @property
    def nnz(self) -> int:
        """Number of stored entries with a nonzero value."""
        return int(np.count_nonzero(self.values))

    def row(self, i: int) -> tuple[np.ndarray, np.ndarray]:
        """Column indices and values of row `i` (read-only views)."""
        self._check_row(i)
        lo, hi = self.row_offsets[i], self.row_offsets[i + 1]
        return self.col_indices[lo:hi], self.values[lo:hi]

    def triplets(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        rows = np.repeat(np.arange(self.n_rows), np.diff(self.row_offsets))
        return rows, self.col_indices.copy(), self.values.copy()

    def matvec(self, x) -> np.ndarray:
        x = as_vector(x, self.n_cols, "x")
        return self._csr @ x

    def rmatvec(self, y) -> np.ndarray:
        y = as_vector(y, self.n_rows, "y")
        return self._csr.T @ y

    def to_dense(self) -> np.ndarray:
        return self._csr.toarray()

    def _check_row(self, i):
        if not 0 <= i < self.n_rows:
            raise IndexError(f"row index {i} out of range for {self.n_rows} rows")


def row_dot(A: SparseRowMatrix, i: int, x) -> float:
    """Inner product of row `i` of `A` with `x`."""
    cols, vals = A.row(i)
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (A.n_cols,):
        raise ShapeError(f"x has shape {x.shape}, expected ({A.n_cols},)")
    return float(vals @ x[cols])


def row_pair_dot(A: SparseRowMatrix, i: int, j: int) -> float:
    """Inner product of rows `i` and `j`, merging their sorted column lists."""
    ci, vi = A.row(i)
    cj, vj = A.row(j)
    if A._full_rows:
        return float(vi @ vj)
    _, ii, jj = np.intersect1d(ci, cj, assume_unique=True, return_indices=True)
    return float(vi[ii] @ vj[jj])


def residual(A: SparseRowMatrix, b, x) -> np.ndarray:
    """Return ``b - A x``."""
    b = as_vector(b, A.n_rows, "b")
    return b - A.matvec(x)


def normalize_rows(A: SparseRowMatrix, b) -> tuple[SparseRowMatrix, np.ndarray]:
    """Scale every row of `A` and entry of `b` by ``1/||a_i||``.

    The solution set of ``Ax = b`` is unchanged.
    """
    b = as_vector(b, A.n_rows, "b")
    scale = 1.0 / np.sqrt(A.row_norms_sq)
    per_entry = np.repeat(scale, np.diff(A.row_offsets))
    An = SparseRowMatrix(A.n_rows, A.n_cols, A.row_offsets, A.col_indices, A.values * per_entry)
    return An, b * scale
