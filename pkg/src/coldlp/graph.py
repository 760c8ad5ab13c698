"""Immutable undirected graphs in CSR form, node degrees, and degree buckets.

Edges are exchanged as ``(M, 2)`` int64 arrays of canonical pairs
(``u < v``, or ``u == v`` for the self-loops that augmentation may add).
The adjacency is stored as offsets plus sorted neighbor lists so that
neighbor intersection and membership tests are cheap.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import IntEnum

import numpy as np

DEFAULT_DELTA = 2


class GraphError(ValueError):
    """Invalid graph construction input."""


class Bucket(IntEnum):
    """Degree bucket of a node. Order is coldest first."""

    ISOLATED = 0
    LOW_DEGREE = 1
    WARM = 2


COLD_BUCKETS = (Bucket.ISOLATED, Bucket.LOW_DEGREE)


def canonical_edges(edges: np.ndarray | list, *, allow_self_loops: bool = False) -> np.ndarray:
    """Normalize an edge collection to unique, sorted, canonical pairs.

    Each undirected pair is stored once as (min, max); duplicates and
    reversed copies collapse. Self-loops are rejected unless allowed.
    """
    arr = np.asarray(edges, dtype=np.int64)
    if arr.size == 0:
        return np.empty((0, 2), dtype=np.int64)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise GraphError(f"edge array must have shape (M, 2), got {arr.shape}")
    loops = arr[:, 0] == arr[:, 1]
    if loops.any() and not allow_self_loops:
        bad = arr[loops][0]
        raise GraphError(f"self-loop ({bad[0]}, {bad[0]}) is not allowed")
    lo = np.minimum(arr[:, 0], arr[:, 1])
    hi = np.maximum(arr[:, 0], arr[:, 1])
    return np.unique(np.stack([lo, hi], axis=1), axis=0)


@dataclass(frozen=True)
class Graph:
    """Undirected graph over nodes 0..N-1 with dense float64 features.

    ``indptr``/``indices`` form a symmetric CSR adjacency: v appears in u's
    sorted neighbor list iff u appears in v's. A self-loop contributes a
    single entry (v in its own list) and counts 1 toward the degree.
    """

    num_nodes: int
    indptr: np.ndarray
    indices: np.ndarray
    features: np.ndarray
    edges: np.ndarray = field(repr=False)  # canonical (M, 2), u <= v

    @property
    def feature_dim(self) -> int:
        return self.features.shape[1]

    @property
    def num_edges(self) -> int:
        return self.edges.shape[0]

    @property
    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def neighbors(self, v: int) -> np.ndarray:
        return self.indices[self.indptr[v] : self.indptr[v + 1]]

    def has_edge(self, u: int, v: int) -> bool:
        row = self.neighbors(u)
        i = np.searchsorted(row, v)
        return bool(i < row.shape[0] and row[i] == v)


def _csr_from_canonical(edges: np.ndarray, num_nodes: int) -> tuple[np.ndarray, np.ndarray]:
    loops = edges[:, 0] == edges[:, 1]
    src = np.concatenate([edges[:, 0], edges[~loops, 1]])
    dst = np.concatenate([edges[:, 1], edges[~loops, 0]])
    order = np.lexsort((dst, src))
    src, dst = src[order], dst[order]
    indptr = np.zeros(num_nodes + 1, dtype=np.int64)
    np.add.at(indptr, src + 1, 1)
    np.cumsum(indptr, out=indptr)
    return indptr, np.ascontiguousarray(dst)


def build_graph(
    edge_list: np.ndarray | list,
    features: np.ndarray,
    *,
    num_nodes: int | None = None,
    allow_self_loops: bool = False,
) -> Graph:
    """Build an immutable Graph from an edge collection and a feature matrix.

    The adjacency is deduplicated and symmetrized; neighbor lists come out
    sorted. Node count is taken from the feature row count unless given
    explicitly (they must then agree).
    """
    features = np.ascontiguousarray(features, dtype=np.float64)
    if features.ndim != 2:
        raise GraphError(f"features must be 2-D, got shape {features.shape}")
    n = features.shape[0]
    if num_nodes is not None and num_nodes != n:
        raise GraphError(f"num_nodes={num_nodes} but features have {n} rows")
    edges = canonical_edges(edge_list, allow_self_loops=allow_self_loops)
    if edges.size and (edges.min() < 0 or edges.max() >= n):
        raise GraphError(
            f"edge endpoint out of range: max index {edges.max()}, N={n}"
        )
    indptr, indices = _csr_from_canonical(edges, n)
    g = Graph(num_nodes=n, indptr=indptr, indices=indices, features=features, edges=edges)
    for a in (g.indptr, g.indices, g.features, g.edges):
        a.setflags(write=False)
    return g


def degrees_from_edges(edges: np.ndarray, num_nodes: int) -> np.ndarray:
    """Per-node degree induced by an edge array (self-loop counts 1)."""
    edges = np.asarray(edges, dtype=np.int64)
    deg = np.zeros(num_nodes, dtype=np.int64)
    if edges.size:
        loops = edges[:, 0] == edges[:, 1]
        np.add.at(deg, edges[:, 0], 1)
        np.add.at(deg, edges[~loops, 1], 1)
    return deg


@dataclass(frozen=True)
class DegreeBuckets:
    """Isolated / low-degree / warm partition of the node set.

    ``labels[v]`` is Bucket.ISOLATED iff degree 0, LOW_DEGREE iff
    0 < degree <= delta, WARM otherwise. ``degree_source`` records which
    edge set the degrees came from (e.g. "message", "train_plus_valid").
    """

    degrees: np.ndarray
    delta: int
    labels: np.ndarray
    degree_source: str

    def nodes_in(self, bucket: Bucket) -> np.ndarray:
        return np.flatnonzero(self.labels == bucket)

    @property
    def cold_nodes(self) -> np.ndarray:
        return np.flatnonzero(self.labels <= Bucket.LOW_DEGREE)


def compute_buckets(
    source: Graph | np.ndarray,
    delta: int = DEFAULT_DELTA,
    *,
    num_nodes: int | None = None,
    degree_source: str = "message",
) -> DegreeBuckets:
    """Bucket every node by its degree in ``source``.

    ``source`` is either a Graph or an edge array (then ``num_nodes`` is
    required). ``delta`` is the cold threshold; the default of 2 matches
    the usual experimental setting.
    """
    if delta < 0:
        raise ValueError(f"delta must be >= 0, got {delta}")
    if isinstance(source, Graph):
        deg = np.asarray(source.degrees)
    else:
        if num_nodes is None:
            raise ValueError("num_nodes is required when bucketing an edge array")
        deg = degrees_from_edges(source, num_nodes)
    labels = np.full(deg.shape[0], Bucket.WARM, dtype=np.int8)
    labels[deg <= delta] = Bucket.LOW_DEGREE
    labels[deg == 0] = Bucket.ISOLATED
    deg = deg.copy()
    deg.setflags(write=False)
    labels.setflags(write=False)
    return DegreeBuckets(degrees=deg, delta=delta, labels=labels, degree_source=degree_source)


def bucket_edge(edge, buckets: DegreeBuckets, policy: str = "min_degree_endpoint"):
    """Assign an edge to a reporting bucket.

    ``min_degree_endpoint`` (default): the edge inherits the bucket of its
    lower-degree endpoint, i.e. a test edge counts toward its colder side.
    ``both_endpoints``: returns a pairwise category label among
    "warm-warm", "warm-cold", "cold-cold".
    """
    u, v = int(edge[0]), int(edge[1])
    bu = Bucket(buckets.labels[u])
    bv = Bucket(buckets.labels[v])
    if policy == "min_degree_endpoint":
        if buckets.degrees[u] == buckets.degrees[v]:
            return min(bu, bv)
        return bu if buckets.degrees[u] < buckets.degrees[v] else bv
    if policy == "both_endpoints":
        warm_u = bu == Bucket.WARM
        warm_v = bv == Bucket.WARM
        if warm_u and warm_v:
            return "warm-warm"
        if warm_u or warm_v:
            return "warm-cold"
        return "cold-cold"
    raise ValueError(f"unknown edge bucket policy {policy!r}")


def bucket_edges(edges: np.ndarray, buckets: DegreeBuckets) -> np.ndarray:
    """Vectorized min_degree_endpoint bucketing for an (M, 2) edge array."""
    du = buckets.degrees[edges[:, 0]]
    dv = buckets.degrees[edges[:, 1]]
    lu = buckets.labels[edges[:, 0]]
    lv = buckets.labels[edges[:, 1]]
    out = np.where(du < dv, lu, lv)
    ties = du == dv
    out[ties] = np.minimum(lu[ties], lv[ties])
    return out
