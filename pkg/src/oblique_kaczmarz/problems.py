"""Test problems: seeded uniform random matrices, consistent right-hand sides
and Matrix Market ingestion."""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.io
import scipy.sparse as sp

from .linalg import SparseRowMatrix, as_vector, normalize_rows
from .selection import make_rng


class MatrixMarketError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        super().__init__(f"line {line}: {message}" if line is not None else message)
        self.line = line


class UnsupportedFormatError(MatrixMarketError):
    pass


@dataclass
class Problem:
    """A consistent system ``A x = b``; `x_star` is a known generator solution."""

    A: SparseRowMatrix
    b: np.ndarray
    x_star: np.ndarray | None = None
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        self.b = as_vector(self.b, self.A.n_rows, "b")
        if self.x_star is not None:
            self.x_star = as_vector(self.x_star, self.A.n_cols, "x_star")

    def normalized(self) -> "Problem":
        """Row-unitized copy; the solution set, hence `x_star`, is unchanged."""
        A, b = normalize_rows(self.A, self.b)
        return Problem(A, b, self.x_star, {**self.provenance, "normalized": True})


def gen_uniform(m: int, n: int, c: float = 0.0, seed=None) -> SparseRowMatrix:
    """Dense ``m x n`` matrix with i.i.d. entries uniform on ``[c, 1]``."""
    if m < 1 or n < 1:
        raise ValueError("m and n must be positive")
    if not 0.0 <= c < 1.0:
        raise ValueError("c must lie in [0, 1)")
    rng = make_rng(seed)
    return SparseRowMatrix.from_dense(c + (1.0 - c) * rng.random((m, n)))


def make_consistent(A: SparseRowMatrix, seed=None) -> Problem:
    """Draw ``x*`` uniform on ``[0, 1]^n`` and set ``b = A x*``.

    The solvers converge to ``A^+ b``, which equals ``x*`` only when `A` has
    full column rank.
    """
    x_star = make_rng(seed).random(A.n_cols)
    return Problem(A, A.matvec(x_star), x_star, {"source": "generated"})


def generate_problem(m: int, n: int, c: float = 0.0, seed=0) -> Problem:
    """Uniform matrix and consistent right-hand side from one seed (an int or
    a sequence of ints, as accepted by :class:`numpy.random.SeedSequence`)."""
    mat_seed, x_seed = np.random.SeedSequence(seed).spawn(2)
    p = make_consistent(gen_uniform(m, n, c, mat_seed), x_seed)
    p.provenance = {"source": "generated", "m": m, "n": n, "c": c, "seed": seed}
    return p


def density(A: SparseRowMatrix) -> float:
    """Nonzero count divided by ``m * n``."""
    return A.nnz / (A.n_rows * A.n_cols)


def _read_header(path: Path) -> dict:
    with open(path, "r") as fh:
        first = fh.readline()
        tokens = first.split()
        if len(tokens) != 5 or tokens[0].lower() != "%%matrixmarket":
            raise MatrixMarketError("missing or malformed %%MatrixMarket banner", 1)
        obj, fmt, fld, sym = (t.lower() for t in tokens[1:])
        if obj != "matrix":
            raise UnsupportedFormatError(f"object {obj!r} is not supported", 1)
        if fmt not in ("coordinate", "array"):
            raise MatrixMarketError(f"unknown format {fmt!r}", 1)
        if fld not in ("real", "integer", "double", "pattern", "complex"):
            raise MatrixMarketError(f"unknown field {fld!r}", 1)
        if fld == "complex":
            raise UnsupportedFormatError("complex matrices are not supported", 1)
        if sym not in ("general", "symmetric"):
            raise UnsupportedFormatError(f"symmetry {sym!r} is not supported", 1)
        lineno = 1
        for line in fh:
            lineno += 1
            s = line.strip()
            if not s or s.startswith("%"):
                continue
            parts = s.split()
            want = 3 if fmt == "coordinate" else 2
            try:
                dims = [int(p) for p in parts]
            except ValueError:
                raise MatrixMarketError(f"malformed size line {s!r}", lineno) from None
            if len(dims) != want or min(dims) < 0:
                raise MatrixMarketError(f"size line needs {want} non-negative integers", lineno)
            return {"format": fmt, "field": fld, "symmetry": sym, "dims": dims, "size_line": lineno}
    raise MatrixMarketError("file ends before the size line", lineno)


def _read_coo(path, allow_pattern: bool) -> sp.coo_matrix:
    path = Path(path)
    header = _read_header(path)
    if header["field"] == "pattern" and not allow_pattern:
        raise UnsupportedFormatError("pattern matrices are not supported (pass allow_pattern=True to read them as ones)", 1)
    try:
        data = scipy.io.mmread(path)
    except Exception as exc:  # body errors from the scipy reader
        raise MatrixMarketError(f"cannot parse entries after line {header['size_line']}: {exc}") from exc
    coo = sp.coo_matrix(data, dtype=np.float64)
    if not np.all(np.isfinite(coo.data)):
        raise MatrixMarketError("non-finite matrix entry")
    return coo


def _nonzero_rows(coo: sp.coo_matrix) -> np.ndarray:
    csr = coo.tocsr()
    csr.sum_duplicates()
    return np.flatnonzero(np.asarray(csr.multiply(csr).sum(axis=1)).ravel() > 0)


def load_matrix_market(path, drop_zero_rows: bool = False, allow_pattern: bool = False) -> SparseRowMatrix:
    """Read a real Matrix Market file (coordinate or array, general or symmetric).

    Symmetric files are expanded to full storage and duplicate entries summed.
    With `drop_zero_rows`, all-zero rows are removed; otherwise they raise
    :class:`~oblique_kaczmarz.linalg.ZeroRowError`.
    """
    A, _, _ = _load_with_rows(path, drop_zero_rows, allow_pattern)
    return A


def _load_with_rows(path, drop_zero_rows, allow_pattern):
    coo = _read_coo(path, allow_pattern)
    m, n = coo.shape
    rows = np.arange(m)
    if drop_zero_rows:
        rows = _nonzero_rows(coo)
        remap = np.full(m, -1)
        remap[rows] = np.arange(rows.size)
        keep = remap[coo.row] >= 0
        coo = sp.coo_matrix((coo.data[keep], (remap[coo.row[keep]], coo.col[keep])), shape=(rows.size, n))
    A = SparseRowMatrix.from_triplets(coo.row, coo.col, coo.data, coo.shape)
    return A, rows, m


def write_matrix_market(path, A: SparseRowMatrix, comment: str | None = None):
    """Write `A` as ``coordinate real general`` with 1-based indices."""
    r, c, v = A.triplets()
    with open(path, "w") as fh:
        fh.write("%%MatrixMarket matrix coordinate real general\n")
        if comment:
            for line in comment.splitlines():
                fh.write(f"% {line}\n")
        fh.write(f"{A.n_rows} {A.n_cols} {v.size}\n")
        for i, j, x in zip(r, c, v):
            fh.write(f"{i + 1} {j + 1} {float(x)!r}\n")


def read_vector(path) -> np.ndarray:
    """Plain-text vector, one scalar per line; blank lines and ``%``/``#`` comments skipped."""
    vals = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            s = line.strip()
            if not s or s[0] in "%#":
                continue
            try:
                vals.append(float(s))
            except ValueError:
                raise ValueError(f"{path}:{lineno}: not a number: {s!r}") from None
    return as_vector(vals, name=str(path))


def write_vector(path, v):
    with open(path, "w") as fh:
        for x in np.asarray(v, dtype=np.float64):
            fh.write(f"{float(x)!r}\n")


def load_problem(matrix_path, b_path=None, drop_zero_rows: bool = False, normalize: bool = False,
                 seed: int = 0, allow_pattern: bool = False) -> Problem:
    """Problem from a Matrix Market file plus optional b sidecar.

    Without a sidecar the right-hand side is made consistent from a seeded
    ``x*``. Dropped rows are removed from `b` as well.
    """
    A, rows, m = _load_with_rows(matrix_path, drop_zero_rows, allow_pattern)
    if b_path is None:
        p = make_consistent(A, seed)
    else:
        b = read_vector(b_path)
        if b.size != m:
            raise ValueError(f"b has {b.size} entries but the matrix has {m} rows")
        p = Problem(A, b[rows])
    p.provenance = {"source": "file", "path": str(matrix_path), "drop_zero_rows": drop_zero_rows}
    return p.normalized() if normalize else p
