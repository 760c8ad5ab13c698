"""Transductive and inductive edge splits plus frozen evaluation negatives.

Splits are seed-deterministic: the same (graph, ratios, seed) always yields
the same partition and the same negative candidate lists. Negatives are
sampled once per split and frozen so every method is ranked against the
identical candidates.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .graph import DEFAULT_DELTA, DegreeBuckets, Graph, compute_buckets

DEFAULT_NUM_NEGATIVES = 500


class SplitError(ValueError):
    """Invalid split request (bad fractions, graph too small, ...)."""


@dataclass(frozen=True)
class DataSplit:
    """Train/valid/test edge partition with fixed evaluation negatives.

    ``message_edges`` is what the encoder may aggregate over during
    training; ``eval`` negatives are (P, count) int64 matrices padded with
    -1 where a positive had fewer eligible candidates than requested (the
    per-positive shortfall is recorded alongside).
    """

    num_nodes: int
    message_edges: np.ndarray
    train_pos: np.ndarray
    valid_pos: np.ndarray
    test_pos: np.ndarray
    valid_neg: np.ndarray
    valid_neg_shortfall: np.ndarray
    test_neg: np.ndarray
    test_neg_shortfall: np.ndarray
    buckets: DegreeBuckets
    seed: int
    inference_edges: np.ndarray = field(default_factory=lambda: np.empty((0, 2), dtype=np.int64))
    meta: dict = field(default_factory=dict)


def sample_eval_negatives(
    graph: Graph,
    positives: np.ndarray,
    count: int = DEFAULT_NUM_NEGATIVES,
    seed: int = 0,
) -> tuple[np.ndarray, np.ndarray]:
    """Draw fixed negative target nodes for each positive pair.

    For a positive (s, t), candidates are all nodes except s and the
    neighbors of s in the full original graph; ``count`` distinct nodes are
    drawn per positive, independently across positives. Returns the
    (P, count) candidate matrix (-1 padded) and per-positive shortfalls.
    """
    positives = np.asarray(positives, dtype=np.int64).reshape(-1, 2)
    rng = np.random.default_rng(np.random.SeedSequence([seed, 0x4E45]))
    neg = np.full((positives.shape[0], count), -1, dtype=np.int64)
    shortfall = np.zeros(positives.shape[0], dtype=np.int64)
    eligible = np.ones(graph.num_nodes, dtype=bool)
    for i, (s, _t) in enumerate(positives):
        nb = graph.neighbors(int(s))
        eligible[nb] = False
        eligible[s] = False
        candidates = np.flatnonzero(eligible)
        take = min(count, candidates.shape[0])
        if take:
            neg[i, :take] = rng.choice(candidates, size=take, replace=False)
        shortfall[i] = count - take
        eligible[nb] = True
        eligible[s] = True
    return neg, shortfall


def transductive_split(
    graph: Graph,
    valid_frac: float,
    test_frac: float,
    seed: int,
    *,
    delta: int = DEFAULT_DELTA,
    degree_source: str = "message",
    num_negatives: int = DEFAULT_NUM_NEGATIVES,
) -> DataSplit:
    """Uniform random edge partition; all nodes stay visible.

    Sizes use floor rounding on the edge count; the remainder goes to
    train. Message edges equal the train positives. ``degree_source``
    selects which edges the reporting buckets are computed from:
    "message" (training graph, the default) or "train_plus_valid".
    """
    if not (0.0 <= valid_frac and 0.0 <= test_frac and valid_frac + test_frac < 1.0):
        raise SplitError(
            f"need valid_frac + test_frac < 1, got {valid_frac} + {test_frac}"
        )
    m = graph.num_edges
    rng = np.random.default_rng(np.random.SeedSequence([seed, 0x5154]))
    perm = rng.permutation(m)
    n_valid = int(m * valid_frac)
    n_test = int(m * test_frac)
    valid_pos = graph.edges[np.sort(perm[:n_valid])]
    test_pos = graph.edges[np.sort(perm[n_valid : n_valid + n_test])]
    train_pos = graph.edges[np.sort(perm[n_valid + n_test :])]

    if degree_source == "message":
        degree_edges = train_pos
    elif degree_source == "train_plus_valid":
        degree_edges = np.concatenate([train_pos, valid_pos])
    else:
        raise SplitError(f"unknown degree_source {degree_source!r}")
    buckets = compute_buckets(
        degree_edges, delta, num_nodes=graph.num_nodes, degree_source=degree_source
    )

    valid_neg, valid_short = sample_eval_negatives(graph, valid_pos, num_negatives, seed)
    test_neg, test_short = sample_eval_negatives(graph, test_pos, num_negatives, seed + 1)
    return DataSplit(
        num_nodes=graph.num_nodes,
        message_edges=train_pos,
        train_pos=train_pos,
        valid_pos=valid_pos,
        test_pos=test_pos,
        valid_neg=valid_neg,
        valid_neg_shortfall=valid_short,
        test_neg=test_neg,
        test_neg_shortfall=test_short,
        buckets=buckets,
        seed=seed,
        meta={
            "mode": "transductive",
            "valid_frac": valid_frac,
            "test_frac": test_frac,
            "delta": delta,
            "degree_source": degree_source,
            "num_negatives": num_negatives,
        },
    )


@dataclass(frozen=True)
class InductiveSplit:
    """Node split where 10% of nodes only appear after training.

    Test edges are drawn per pair group (observed-observed, observed-new,
    new-new); the remaining observed-new and new-new edges plus an extra
    slice of observed-observed edges become ``inference_edges``, revealed
    to the encoder only at evaluation time.
    """

    num_nodes: int
    observed_nodes: np.ndarray
    new_nodes: np.ndarray
    train_edges: np.ndarray
    test_obs_obs: np.ndarray
    test_obs_new: np.ndarray
    test_new_new: np.ndarray
    inference_edges: np.ndarray
    seed: int


def _take_frac(edges: np.ndarray, frac: float, rng) -> tuple[np.ndarray, np.ndarray]:
    k = int(edges.shape[0] * frac)
    perm = rng.permutation(edges.shape[0])
    return edges[np.sort(perm[:k])], edges[np.sort(perm[k:])]


def inductive_split(
    graph: Graph,
    new_node_frac: float = 0.10,
    seed: int = 0,
    *,
    test_frac: float = 0.10,
    inference_extra_frac: float = 0.10,
) -> InductiveSplit:
    """Sample new nodes, group edges, and carve test/inference sets.

    Raises if any of the three pair groups comes out empty: such a graph is
    too small for this protocol and proceeding would silently change it.
    """
    if not 0.0 < new_node_frac < 1.0:
        raise SplitError(f"new_node_frac must be in (0, 1), got {new_node_frac}")
    rng = np.random.default_rng(np.random.SeedSequence([seed, 0x494E44]))
    n = graph.num_nodes
    new_nodes = np.sort(rng.choice(n, size=int(n * new_node_frac), replace=False))
    is_new = np.zeros(n, dtype=bool)
    is_new[new_nodes] = True
    observed = np.flatnonzero(~is_new)

    ends_new = is_new[graph.edges]
    n_new_ends = ends_new.sum(axis=1)
    obs_obs = graph.edges[n_new_ends == 0]
    obs_new = graph.edges[n_new_ends == 1]
    new_new = graph.edges[n_new_ends == 2]
    for name, grp in (("observed-observed", obs_obs), ("observed-new", obs_new), ("new-new", new_new)):
        if grp.shape[0] == 0:
            raise SplitError(
                f"graph too small for an inductive split: no {name} edges with "
                f"new_node_frac={new_node_frac}, seed={seed}"
            )

    test_oo, rest_oo = _take_frac(obs_obs, test_frac, rng)
    test_on, rest_on = _take_frac(obs_new, test_frac, rng)
    test_nn, rest_nn = _take_frac(new_new, test_frac, rng)
    extra_oo, train_edges = _take_frac(rest_oo, inference_extra_frac / (1.0 - test_frac), rng)
    inference = np.concatenate([rest_on, rest_nn, extra_oo])
    return InductiveSplit(
        num_nodes=n,
        observed_nodes=observed,
        new_nodes=new_nodes,
        train_edges=train_edges,
        test_obs_obs=test_oo,
        test_obs_new=test_on,
        test_new_new=test_nn,
        inference_edges=inference,
        seed=seed,
    )


def inductive_to_datasplit(
    graph: Graph,
    ind: InductiveSplit,
    *,
    valid_frac: float = 0.05,
    delta: int = DEFAULT_DELTA,
    num_negatives: int = DEFAULT_NUM_NEGATIVES,
) -> DataSplit:
    """Adapt an InductiveSplit to the training/eval pipeline.

    A validation slice is carved from the train edges for early stopping
    (the protocol itself defines none). Buckets are computed from the
    edges visible at inference time (train + inference), which is what the
    per-bucket test report conditions on.
    """
    rng = np.random.default_rng(np.random.SeedSequence([ind.seed, 0x56414C]))
    valid_pos, train_pos = _take_frac(ind.train_edges, valid_frac, rng)
    test_pos = np.concatenate([ind.test_obs_obs, ind.test_obs_new, ind.test_new_new])
    visible = np.concatenate([train_pos, ind.inference_edges])
    buckets = compute_buckets(
        visible, delta, num_nodes=graph.num_nodes, degree_source="message_plus_inference"
    )
    valid_neg, valid_short = sample_eval_negatives(graph, valid_pos, num_negatives, ind.seed)
    test_neg, test_short = sample_eval_negatives(graph, test_pos, num_negatives, ind.seed + 1)
    return DataSplit(
        num_nodes=graph.num_nodes,
        message_edges=train_pos,
        train_pos=train_pos,
        valid_pos=valid_pos,
        test_pos=test_pos,
        valid_neg=valid_neg,
        valid_neg_shortfall=valid_short,
        test_neg=test_neg,
        test_neg_shortfall=test_short,
        buckets=buckets,
        seed=ind.seed,
        inference_edges=ind.inference_edges,
        meta={
            "mode": "inductive",
            "valid_frac": valid_frac,
            "delta": delta,
            "num_negatives": num_negatives,
            "num_new_nodes": int(ind.new_nodes.shape[0]),
            "test_group_sizes": {
                "observed-observed": int(ind.test_obs_obs.shape[0]),
                "observed-new": int(ind.test_obs_new.shape[0]),
                "new-new": int(ind.test_new_new.shape[0]),
            },
        },
    )


def split_to_dict(split: DataSplit) -> dict:
    """JSON-ready representation (negatives stored without padding)."""

    def edges(a: np.ndarray) -> list:
        return a.tolist()

    def negatives(mat: np.ndarray) -> list:
        return [[int(x) for x in row if x >= 0] for row in mat]

    return {
        "num_nodes": split.num_nodes,
        "seed": split.seed,
        "meta": split.meta,
        "message_edges": edges(split.message_edges),
        "train_pos": edges(split.train_pos),
        "valid_pos": edges(split.valid_pos),
        "test_pos": edges(split.test_pos),
        "valid_neg": negatives(split.valid_neg),
        "test_neg": negatives(split.test_neg),
        "inference_edges": edges(split.inference_edges),
    }


def split_from_dict(d: dict) -> DataSplit:
    """Rebuild a DataSplit (buckets recomputed from the recorded sources)."""

    def edges(key: str) -> np.ndarray:
        return np.asarray(d[key], dtype=np.int64).reshape(-1, 2)

    def negatives(key: str, count: int) -> tuple[np.ndarray, np.ndarray]:
        rows = d[key]
        mat = np.full((len(rows), count), -1, dtype=np.int64)
        short = np.zeros(len(rows), dtype=np.int64)
        for i, row in enumerate(rows):
            mat[i, : len(row)] = row
            short[i] = count - len(row)
        return mat, short

    meta = d["meta"]
    count = int(meta["num_negatives"])
    message = edges("message_edges")
    train_pos = edges("train_pos")
    valid_pos = edges("valid_pos")
    inference = edges("inference_edges")
    source = meta.get("degree_source", "message")
    if meta.get("mode") == "inductive":
        degree_edges = np.concatenate([message, inference])
        source = "message_plus_inference"
    elif source == "train_plus_valid":
        degree_edges = np.concatenate([train_pos, valid_pos])
    else:
        degree_edges = message
    buckets = compute_buckets(
        degree_edges, int(meta["delta"]), num_nodes=int(d["num_nodes"]), degree_source=source
    )
    valid_neg, valid_short = negatives("valid_neg", count)
    test_neg, test_short = negatives("test_neg", count)
    return DataSplit(
        num_nodes=int(d["num_nodes"]),
        message_edges=message,
        train_pos=train_pos,
        valid_pos=valid_pos,
        test_pos=edges("test_pos"),
        valid_neg=valid_neg,
        valid_neg_shortfall=valid_short,
        test_neg=test_neg,
        test_neg_shortfall=test_short,
        buckets=buckets,
        seed=int(d["seed"]),
        inference_edges=inference,
        meta=meta,
    )


def save_split(path: str | Path, split: DataSplit) -> None:
    Path(path).write_text(json.dumps(split_to_dict(split), sort_keys=True))


def load_split(path: str | Path) -> DataSplit:
    return split_from_dict(json.loads(Path(path).read_text()))


def with_buckets(split: DataSplit, buckets: DegreeBuckets) -> DataSplit:
    """Copy of the split with replacement reporting buckets."""
    return replace(split, buckets=buckets)
