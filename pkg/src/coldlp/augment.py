"""Node-duplication augmentation.

Three modes: ``full`` clones each selected node (features copied bit for
bit) and wires clone to original; ``light`` adds a self-loop per selected
node instead of new nodes; ``whole_graph`` is the full mode applied to
every node once. The original-to-clone edge can enter the aggregation
graph, the positive training labels, or both; the two flags toggle those
roles independently for ablations.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .graph import Bucket, DegreeBuckets, Graph, build_graph

SELECTORS = ("isolated", "cold", "mid_warm", "warm", "random", "all", "none")
MODES = ("full", "light", "whole_graph")


class AugmentError(ValueError):
    """Invalid augmentation plan or selection."""


@dataclass(frozen=True)
class AugmentPlan:
    """What to duplicate and how the new edges are used.

    ``times`` is the duplication count per selected node (full mode);
    ``random_k`` sizes the random selector and defaults to the number of
    cold nodes, which keeps its cost comparable to cold duplication.
    """

    selector: str = "cold"
    times: int = 1
    mode: str = "full"
    use_in_aggregation: bool = True
    use_in_supervision: bool = True
    random_k: int | None = None
    seed: int = 0

    def validate(self) -> None:
        if self.selector not in SELECTORS:
            raise AugmentError(f"unknown selector {self.selector!r} (one of {SELECTORS})")
        if self.mode not in MODES:
            raise AugmentError(f"unknown mode {self.mode!r} (one of {MODES})")
        if self.times < 0:
            raise AugmentError(f"times must be >= 0, got {self.times}")
        if self.selector == "none" and self.times > 0:
            raise AugmentError("selector 'none' requires times=0")
        if self.selector != "none" and self.times == 0:
            raise AugmentError(f"selector {self.selector!r} requires times >= 1")


@dataclass(frozen=True)
class AugmentedGraph:
    """Graph after duplication plus provenance and the added edge sets.

    ``origin_of[i]`` is the original node behind index i (identity for
    i < num_original). ``added_supervision`` are the positive pairs that
    augmentation injects into the training labels; ``added_message_edges``
    the edges injected into the aggregation graph.
    """

    graph: Graph
    num_original: int
    origin_of: np.ndarray
    added_supervision: np.ndarray
    added_message_edges: np.ndarray

    @property
    def num_duplicates(self) -> int:
        return self.graph.num_nodes - self.num_original


def _empty_pairs() -> np.ndarray:
    return np.empty((0, 2), dtype=np.int64)


def select_nodes(
    buckets: DegreeBuckets,
    selector: str,
    seed: int = 0,
    k: int | None = None,
) -> np.ndarray:
    """Resolve a selector name to a sorted array of node ids."""
    n = buckets.labels.shape[0]
    deg = buckets.degrees
    delta = buckets.delta
    if selector == "isolated":
        return buckets.nodes_in(Bucket.ISOLATED)
    if selector == "cold":
        return buckets.cold_nodes
    if selector == "mid_warm":
        # No standard definition exists; use the symmetric band just above
        # the cold threshold.
        return np.flatnonzero((deg > delta) & (deg <= 2 * delta))
    if selector == "warm":
        return buckets.nodes_in(Bucket.WARM)
    if selector == "all":
        return np.arange(n, dtype=np.int64)
    if selector == "none":
        return np.empty(0, dtype=np.int64)
    if selector == "random":
        if k is None:
            k = int(buckets.cold_nodes.shape[0])
        if k < 0 or k > n:
            raise AugmentError(f"random selector needs 0 <= k <= {n}, got {k}")
        rng = np.random.default_rng(np.random.SeedSequence([seed, 0x53454C]))
        return np.sort(rng.choice(n, size=k, replace=False))
    raise AugmentError(f"unknown selector {selector!r}")


def _identity_augmentation(graph: Graph) -> AugmentedGraph:
    return AugmentedGraph(
        graph=graph,
        num_original=graph.num_nodes,
        origin_of=np.arange(graph.num_nodes, dtype=np.int64),
        added_supervision=_empty_pairs(),
        added_message_edges=_empty_pairs(),
    )


def node_dup(
    graph: Graph,
    train_pos: np.ndarray,
    plan: AugmentPlan,
    buckets: DegreeBuckets,
) -> tuple[AugmentedGraph, np.ndarray]:
    """Full duplication: t clones per selected node, each wired only to its
    original. Returns the augmented graph and the augmented training
    positives (train_pos plus one (v, clone) pair per clone when the
    supervision flag is on).
    """
    plan.validate()
    selected = select_nodes(buckets, plan.selector, plan.seed, plan.random_k)
    if selected.shape[0] == 0:
        return _identity_augmentation(graph), np.asarray(train_pos, dtype=np.int64)
    n = graph.num_nodes
    t = plan.times
    s = selected.shape[0]
    # Clone block r*s + i holds round r of selected[i]; ids are contiguous
    # from n so runs are reproducible.
    dup_ids = np.arange(n, n + t * s, dtype=np.int64)
    originals = np.tile(selected, t)
    pairs = np.stack([originals, dup_ids], axis=1)

    features = np.vstack([graph.features, graph.features[originals]])
    added_message = pairs if plan.use_in_aggregation else _empty_pairs()
    added_supervision = pairs if plan.use_in_supervision else _empty_pairs()
    edges = np.concatenate([graph.edges, added_message])
    aug_graph = build_graph(edges, features, allow_self_loops=True)
    origin_of = np.concatenate([np.arange(n, dtype=np.int64), originals])
    aug = AugmentedGraph(
        graph=aug_graph,
        num_original=n,
        origin_of=origin_of,
        added_supervision=added_supervision,
        added_message_edges=added_message,
    )
    train_out = np.concatenate([np.asarray(train_pos, dtype=np.int64), added_supervision])
    return aug, train_out


def node_dup_light(
    graph: Graph,
    train_pos: np.ndarray,
    plan: AugmentPlan,
    buckets: DegreeBuckets,
) -> tuple[AugmentedGraph, np.ndarray]:
    """Lightweight duplication: one self-loop per selected node, no new
    nodes. The self-loop plays the same two roles (aggregation edge and
    positive label); the adjacency is simple, so duplication counts above
    one collapse to one self-loop.
    """
    plan.validate()
    selected = select_nodes(buckets, plan.selector, plan.seed, plan.random_k)
    if selected.shape[0] == 0:
        return _identity_augmentation(graph), np.asarray(train_pos, dtype=np.int64)
    loops = np.stack([selected, selected], axis=1)
    added_message = loops if plan.use_in_aggregation else _empty_pairs()
    added_supervision = loops if plan.use_in_supervision else _empty_pairs()
    edges = np.concatenate([graph.edges, added_message])
    aug_graph = build_graph(edges, graph.features, allow_self_loops=True)
    aug = AugmentedGraph(
        graph=aug_graph,
        num_original=graph.num_nodes,
        origin_of=np.arange(graph.num_nodes, dtype=np.int64),
        added_supervision=added_supervision,
        added_message_edges=added_message,
    )
    train_out = np.concatenate([np.asarray(train_pos, dtype=np.int64), added_supervision])
    return aug, train_out


def whole_graph_dup(
    graph: Graph, train_pos: np.ndarray, buckets: DegreeBuckets, seed: int = 0
) -> tuple[AugmentedGraph, np.ndarray]:
    """Duplicate every node once (the full-duplication mode with the
    'all' selector); doubles the node set and adds one edge and one
    positive label per node."""
    plan = AugmentPlan(selector="all", times=1, mode="full", seed=seed)
    return node_dup(graph, train_pos, plan, buckets)


def apply_plan(
    graph: Graph,
    train_pos: np.ndarray,
    plan: AugmentPlan,
    buckets: DegreeBuckets,
) -> tuple[AugmentedGraph, np.ndarray]:
    """Dispatch on plan.mode; the single entry point used by training."""
    plan.validate()
    if plan.selector == "none":
        return _identity_augmentation(graph), np.asarray(train_pos, dtype=np.int64)
    if plan.mode == "full":
        return node_dup(graph, train_pos, plan, buckets)
    if plan.mode == "light":
        return node_dup_light(graph, train_pos, plan, buckets)
    if plan.mode == "whole_graph":
        return whole_graph_dup(graph, train_pos, buckets, plan.seed)
    raise AugmentError(f"unknown mode {plan.mode!r}")
