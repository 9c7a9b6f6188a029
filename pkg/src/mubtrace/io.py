"""Matrix Market loading for dense (array) and sparse (coordinate) inputs."""

from __future__ import annotations

import scipy.io
import scipy.sparse as sp

from .oracle import DenseOracle, QuadraticFormOracle, SparseOracle


def load_matrix_market(path) -> QuadraticFormOracle:
    """Array files give a :class:`DenseOracle`, coordinate files a :class:`SparseOracle`.

    The ``symmetric`` qualifier is honoured by the reader; anything that is
    not symmetric after reading is rejected.
    """
    m = scipy.io.mmread(path)
    if sp.issparse(m):
        return SparseOracle(m)
    return DenseOracle(m)


def write_matrix_market(path, matrix, symmetric: bool = True) -> None:
    scipy.io.mmwrite(path, matrix, symmetry="symmetric" if symmetric else "general")
