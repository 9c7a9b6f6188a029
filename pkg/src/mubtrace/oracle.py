"""Matrix-free access to quadratic forms ``x^H A x`` for real symmetric ``A``.

Every oracle accepts either a single vector of shape ``(n,)`` or a batch of
column vectors of shape ``(n, k)``; for a batch, one value per column is
returned.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp


class DimensionMismatch(ValueError):
    pass


def _check_dim(x: np.ndarray, n: int) -> None:
    if x.shape[0] != n:
        raise DimensionMismatch(f"vector of length {x.shape[0]} for dimension {n}")


def _real_part(values, x, fro_norm: float):
    """Drop the imaginary part of a quadratic form, which is pure roundoff."""
    values = np.asarray(values)
    if np.iscomplexobj(values):
        norm2 = np.sum(np.abs(x) ** 2, axis=0)
        bound = 1e-8 * norm2 * fro_norm
        if np.any(np.abs(values.imag) > bound):
            raise ValueError("quadratic form has a non-negligible imaginary part; "
                             "is the matrix symmetric?")
        values = values.real
    return values[()] if values.ndim == 0 else values


class QuadraticFormOracle:
    """Base class: subclasses set ``dim`` and implement ``quad_form``.

    ``matvec`` is optional; oracles without it raise ``NotImplementedError``.
    """

    dim: int

    def quad_form(self, x):
        raise NotImplementedError

    def matvec(self, x):
        raise NotImplementedError(f"{type(self).__name__} has no matvec")

    @property
    def has_matvec(self) -> bool:
        return type(self).matvec is not QuadraticFormOracle.matvec

    def frobenius_norm(self) -> float:
        return float("inf")

    def __repr__(self):
        return f"{type(self).__name__}(dim={self.dim})"


class DenseOracle(QuadraticFormOracle):
    def __init__(self, matrix):
        m = np.asarray(matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {m.shape}")
        scale = float(np.max(np.abs(m))) if m.size else 0.0
        if not np.allclose(m, m.T, rtol=0.0, atol=1e-12 * scale):
            raise ValueError("matrix is not symmetric")
        self.matrix = (m + m.T) / 2
        self.dim = m.shape[0]
        self._fro = float(np.linalg.norm(m))

    def matvec(self, x):
        x = np.asarray(x)
        _check_dim(x, self.dim)
        return self.matrix @ x

    def quad_form(self, x):
        x = np.asarray(x)
        _check_dim(x, self.dim)
        return _real_part(np.sum(x.conj() * (self.matrix @ x), axis=0), x, self._fro)

    def frobenius_norm(self):
        return self._fro

    def trace(self) -> float:
        return float(np.trace(self.matrix))


class SparseOracle(QuadraticFormOracle):
    """Sparse symmetric matrix held in CSR form.

    Built from the upper-triangle coordinate list ``(i, j, value)``, ``i <= j``,
    or from any scipy sparse matrix that is already symmetric.
    """

    def __init__(self, matrix):
        m = sp.csr_array(matrix, dtype=float)
        if m.shape[0] != m.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {m.shape}")
        if (m != m.T).nnz:
            raise ValueError("matrix is not symmetric")
        m.sum_duplicates()
        m.sort_indices()
        self.matrix = m
        self.dim = m.shape[0]
        self._fro = float(np.sqrt(np.sum(m.data ** 2)))

    @classmethod
    def from_upper_coo(cls, n: int, rows, cols, values):
        rows = np.asarray(rows, dtype=np.int64)
        cols = np.asarray(cols, dtype=np.int64)
        values = np.asarray(values, dtype=float)
        if np.any(rows > cols):
            raise ValueError("coordinates must satisfy i <= j")
        off = rows != cols
        r = np.concatenate([rows, cols[off]])
        c = np.concatenate([cols, rows[off]])
        v = np.concatenate([values, values[off]])
        return cls(sp.coo_array((v, (r, c)), shape=(n, n)))

    def upper_coo(self):
        """Deduplicated, sorted ``(i, j, value)`` triples with ``i <= j``."""
        u = sp.triu(self.matrix, format="coo")
        order = np.lexsort((u.col, u.row))
        return u.row[order], u.col[order], u.data[order]

    def matvec(self, x):
        x = np.asarray(x)
        _check_dim(x, self.dim)
        return self.matrix @ x

    def quad_form(self, x):
        x = np.asarray(x)
        _check_dim(x, self.dim)
        return _real_part(np.sum(x.conj() * (self.matrix @ x), axis=0), x, self._fro)

    def frobenius_norm(self):
        return self._fro

    def trace(self) -> float:
        return float(self.matrix.diagonal().sum())


class PowerOracle(QuadraticFormOracle):
    """``x^H A^k x`` using ``k // 2`` matvecs and one quadratic form.

    For odd ``k`` this is ``y^H A y`` with ``y = A^((k-1)/2) x``; for even ``k``
    it is ``||A^(k/2) x||^2``.  ``A^k`` is never formed.
    """

    def __init__(self, base: QuadraticFormOracle, k: int):
        if k < 1:
            raise ValueError("power must be at least 1")
        if k > 1 and not base.has_matvec:
            raise NotImplementedError("power oracle needs a base with matvec")
        self.base = base
        self.k = int(k)
        self.dim = base.dim

    def matvec(self, x):
        for _ in range(self.k):
            x = self.base.matvec(x)
        return x

    def quad_form(self, x):
        x = np.asarray(x)
        _check_dim(x, self.dim)
        y = x
        for _ in range(self.k // 2):
            y = self.base.matvec(y)
        if self.k % 2:
            return self.base.quad_form(y)
        out = np.sum(np.abs(y) ** 2, axis=0)
        return out[()] if out.ndim == 0 else out


class PaddedOracle(QuadraticFormOracle):
    """Embed ``base`` in a larger space by appending zero rows and columns."""

    def __init__(self, base: QuadraticFormOracle, padded_dim: int):
        if padded_dim < base.dim:
            raise DimensionMismatch(
                f"cannot pad dimension {base.dim} down to {padded_dim}")
        self.base = base
        self.dim = int(padded_dim)

    def quad_form(self, x):
        x = np.asarray(x)
        _check_dim(x, self.dim)
        return self.base.quad_form(x[: self.base.dim])

    def matvec(self, x):
        x = np.asarray(x)
        _check_dim(x, self.dim)
        y = self.base.matvec(x[: self.base.dim])
        out = np.zeros(x.shape, dtype=np.result_type(y, x))
        out[: self.base.dim] = y
        return out

    @property
    def has_matvec(self):
        return self.base.has_matvec


def as_oracle(a) -> QuadraticFormOracle:
    """Wrap a dense array or scipy sparse matrix; oracles pass through."""
    if isinstance(a, QuadraticFormOracle):
        return a
    if sp.issparse(a):
        return SparseOracle(a)
    return DenseOracle(a)


def dense_quad_form(matrix, x) -> float:
    return DenseOracle(matrix).quad_form(x)


def sparse_quad_form(matrix, x) -> float:
    return SparseOracle(matrix).quad_form(x)


def power_oracle(base, k: int) -> PowerOracle:
    return PowerOracle(as_oracle(base), k)


def padded_oracle(base, padded_dim: int) -> PaddedOracle:
    return PaddedOracle(as_oracle(base), padded_dim)
