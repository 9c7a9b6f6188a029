"""Undirected graphs from SNAP edge lists and triangle counting.

The number of triangles equals ``Tr(A^3) / 6`` for the adjacency matrix
``A``; :func:`estimate_triangles` feeds a cubed adjacency oracle to the trace
estimators, :func:`exact_triangle_count` is the combinatorial reference.
"""

from __future__ import annotations

import io
import os
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
import scipy.sparse as sp

from .estimators import estimate_trace
from .oracle import SparseOracle, power_oracle


class ParseError(ValueError):
    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph; ``edges`` is an ``(m, 2)`` array of ``u < v`` rows, sorted."""

    num_vertices: int
    edges: np.ndarray
    labels: Optional[tuple] = None

    def __post_init__(self):
        e = np.asarray(self.edges, dtype=np.int64).reshape(-1, 2)
        object.__setattr__(self, "edges", e)

    @classmethod
    def from_edges(cls, num_vertices: int, pairs, labels=None) -> "Graph":
        e = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
        if e.size and (e.min() < 0 or e.max() >= num_vertices):
            raise ValueError("edge endpoint outside [0, num_vertices)")
        e = e[e[:, 0] != e[:, 1]]
        e = np.sort(e, axis=1)
        e = np.unique(e, axis=0)
        return cls(int(num_vertices), e, labels)

    @property
    def num_edges(self) -> int:
        return self.edges.shape[0]

    def __eq__(self, other):
        return (isinstance(other, Graph)
                and self.num_vertices == other.num_vertices
                and np.array_equal(self.edges, other.edges))

    def __hash__(self):
        return hash((self.num_vertices, self.edges.tobytes()))

    def adjacency(self) -> sp.csr_array:
        n = self.num_vertices
        u, v = self.edges[:, 0], self.edges[:, 1]
        data = np.ones(2 * self.num_edges)
        a = sp.coo_array((data, (np.concatenate([u, v]), np.concatenate([v, u]))),
                         shape=(n, n))
        return a.tocsr()


def parse_snap_edge_list(source: Union[str, bytes, os.PathLike, io.IOBase]) -> Graph:
    """Parse a SNAP-style whitespace-separated edge list.

    ``#`` lines and blank lines are skipped; direction, duplicates and
    self-loops are discarded.  Vertex ids are relabelled ``0..V-1`` in order
    of first appearance; the original ids are kept in ``Graph.labels``.
    """
    if isinstance(source, bytes):
        lines = io.StringIO(source.decode("utf-8"))
    elif isinstance(source, str) and ("\n" in source or not os.path.exists(source)):
        lines = io.StringIO(source)
    elif isinstance(source, (str, os.PathLike)):
        with open(source, "r", encoding="utf-8") as fh:
            return parse_snap_edge_list(fh)
    else:
        lines = source

    ids: dict[int, int] = {}
    pairs = []
    for lineno, line in enumerate(lines, start=1):
        if isinstance(line, bytes):
            line = line.decode("utf-8")
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        tokens = stripped.split()
        if len(tokens) < 2:
            raise ParseError(lineno, f"expected two vertex ids, got {stripped!r}")
        try:
            a, b = int(tokens[0]), int(tokens[1])
        except ValueError:
            raise ParseError(lineno, f"non-integer vertex id in {stripped!r}") from None
        u = ids.setdefault(a, len(ids))
        v = ids.setdefault(b, len(ids))
        pairs.append((u, v))
    return Graph.from_edges(len(ids), pairs, tuple(ids))


def serialize_edge_list(g: Graph) -> str:
    """Write ``g`` so that :func:`parse_snap_edge_list` gives back the same graph.

    Edges are grouped by their larger endpoint.  A vertex without a
    lower-numbered neighbour is announced by a self-loop line, which the
    parser drops after registering the vertex, so first-appearance
    relabelling reproduces the original ids.
    """
    order = np.lexsort((g.edges[:, 0], g.edges[:, 1]))
    edges = g.edges[order]
    bounds = np.searchsorted(edges[:, 1], np.arange(g.num_vertices + 1))
    out = []
    for k in range(g.num_vertices):
        lower = edges[bounds[k]:bounds[k + 1], 0]
        if lower.size == 0:
            out.append(f"{k}\t{k}\n")
        out.extend(f"{u}\t{k}\n" for u in lower.tolist())
    return "".join(out)


def adjacency_oracle(g: Graph) -> SparseOracle:
    return SparseOracle(g.adjacency())


def exact_triangle_count(g: Graph) -> int:
    """Forward algorithm: orient edges from lower to higher (degree, id) rank
    and intersect out-neighbourhoods along every oriented edge."""
    n = g.num_vertices
    if g.num_edges == 0:
        return 0
    deg = np.bincount(g.edges.ravel(), minlength=n)
    rank = np.empty(n, dtype=np.int64)
    rank[np.lexsort((np.arange(n), deg))] = np.arange(n)
    u, v = g.edges[:, 0], g.edges[:, 1]
    swap = rank[u] > rank[v]
    src = np.where(swap, v, u)
    dst = np.where(swap, u, v)
    order = np.argsort(src, kind="stable")
    src, dst = src[order], dst[order]
    bounds = np.searchsorted(src, np.arange(n + 1))
    out = [set(dst[bounds[i]:bounds[i + 1]].tolist()) for i in range(n)]
    count = 0
    for a, b in zip(src.tolist(), dst.tolist()):
        count += len(out[a] & out[b])
    return count


@dataclass(frozen=True)
class TriangleEstimate:
    estimate: float
    samples: int
    total_bits: int
    exact: Optional[int] = None

    @property
    def abs_rel_error(self) -> Optional[float]:
        if self.exact is None or self.exact == 0:
            return None
        return abs(self.estimate - self.exact) / self.exact


def triangle_oracle(g: Graph):
    return power_oracle(adjacency_oracle(g), 3)


def estimate_triangles(g: Graph, kind, samples: int, seed: int = 0,
                       exact: Optional[int] = None, stream_prefix=()) -> TriangleEstimate:
    if g.num_vertices == 0:
        return TriangleEstimate(0.0, samples, 0, exact)
    est = estimate_trace(triangle_oracle(g), kind, samples, seed, stream_prefix)
    return TriangleEstimate(est.mean / 6.0, samples, est.total_bits, exact)
