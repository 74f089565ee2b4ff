"""Supra-adjacency representation of a time-varying graph.

Maps each active (node, time) pair to a vertex of a static weighted graph.
For an event (i, j, t0): if i is next active at t1 > t0, a cross-coupling
edge (j^(t0), i^(t1)) with the event weight is added, and a self-coupling
edge (i^(t0), i^(t1)) with weight 1; symmetrically for j.  Random walks on
the resulting graph follow temporal paths of the original graph.
"""

from __future__ import annotations

import bisect
import json
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from hosgns.temporal_graph import TimeVaryingGraph


@dataclass(frozen=True)
class WalkConfig:
    """Context window and sampling budget for random walks."""

    window: int = 10
    walks_per_node: int = 10
    walk_length: int = 80
    seed: int = 0

    def __post_init__(self):
        if self.window <= 0 or self.walks_per_node <= 0 or self.walk_length <= 0:
            raise ValueError("window, walks_per_node and walk_length must be positive")
        if self.window > self.walk_length:
            raise ValueError("window must not exceed walk_length")


class SupraGraph:
    """Static weighted graph over active (node, time) pairs.

    Vertices are ordered lexicographically by (node, time); ``flat`` indices
    refer to that ordering.
    """

    def __init__(self, nodes: list[tuple[int, int]], adjacency: sp.csr_matrix,
                 num_nodes: int, num_times: int):
        self.nodes = nodes
        self.adjacency = adjacency
        self.num_nodes = num_nodes
        self.num_times = num_times
        self.flat_index = {pair: idx for idx, pair in enumerate(nodes)}
        self.degrees = np.asarray(adjacency.sum(axis=1)).ravel()
        self.volume = float(self.degrees.sum())

    def __len__(self) -> int:
        return len(self.nodes)

    def flat(self, node: int, time: int) -> int:
        return self.flat_index[(node, time)]

    def unflat(self, flat: int) -> tuple[int, int]:
        return self.nodes[flat]

    def export_edge_list(self) -> str:
        """Weighted edge list `flat_a flat_b weight`, each edge once (a < b)."""
        coo = sp.triu(self.adjacency).tocoo()
        lines = [f"{a} {b} {w:.12g}" for a, b, w in zip(coo.row, coo.col, coo.data)]
        return "\n".join(lines) + "\n"

    def export_index_map(self) -> str:
        return json.dumps(
            {
                "num_nodes": self.num_nodes,
                "num_times": self.num_times,
                "nodes": [[n, t] for n, t in self.nodes],
            },
            sort_keys=True,
        )


def build_supra(g: TimeVaryingGraph) -> SupraGraph:
    """Build the supra-adjacency graph from the two coupling rules."""
    if not g.events:
        raise ValueError("cannot build a supra graph from an empty graph")

    active_times: dict[int, list[int]] = {}
    for e in g.events:
        active_times.setdefault(e.i, []).append(e.k)
        active_times.setdefault(e.j, []).append(e.k)
    for node, times in active_times.items():
        active_times[node] = sorted(set(times))

    nodes = sorted(g.active_pairs)
    flat = {pair: idx for idx, pair in enumerate(nodes)}

    def next_active(node: int, t: int) -> int | None:
        times = active_times[node]
        pos = bisect.bisect_right(times, t)
        return times[pos] if pos < len(times) else None

    cross: dict[tuple[int, int], float] = {}
    selfc: set[tuple[int, int]] = set()

    def add_cross(a: int, b: int, w: float):
        key = (a, b) if a < b else (b, a)
        cross[key] = cross.get(key, 0.0) + w

    def add_self(a: int, b: int):
        selfc.add((a, b) if a < b else (b, a))

    for e in g.events:
        for u, v in ((e.i, e.j), (e.j, e.i)):
            # rule 1: v's occurrence at t0 couples to u's next activation
            t_next = next_active(u, e.k)
            if t_next is not None:
                add_cross(flat[(v, e.k)], flat[(u, t_next)], e.weight)
                # rule 2: self-coupling along u's consecutive activations
                add_self(flat[(u, e.k)], flat[(u, t_next)])

    n = len(nodes)
    rows, cols, data = [], [], []
    for (a, b), w in cross.items():
        rows += [a, b]
        cols += [b, a]
        data += [w, w]
    for a, b in selfc:
        rows += [a, b]
        cols += [b, a]
        data += [1.0, 1.0]
    adjacency = sp.csr_matrix(
        (np.array(data), (np.array(rows), np.array(cols))), shape=(n, n)
    ) if data else sp.csr_matrix((n, n))
    adjacency.sum_duplicates()

    return SupraGraph(nodes, adjacency, g.num_nodes, g.num_times)


def transition_matrix(s: SupraGraph) -> sp.csr_matrix:
    """Row-stochastic D^-1 A; rows of degree-0 (absorbing) vertices are zero."""
    inv_deg = np.zeros(len(s))
    nz = s.degrees > 0
    inv_deg[nz] = 1.0 / s.degrees[nz]
    return sp.diags(inv_deg) @ s.adjacency


def stationary_distribution(s: SupraGraph) -> np.ndarray:
    """Degree-proportional stationary distribution d / vol."""
    if s.volume == 0:
        raise ValueError("graph has no edges")
    return s.degrees / s.volume


def absorbing_mask(s: SupraGraph) -> np.ndarray:
    return s.degrees == 0


def sample_walks(s: SupraGraph, cfg: WalkConfig) -> list[list[int]]:
    """Weighted random walks, ``walks_per_node`` per non-absorbing vertex.

    Each walk has an independent RNG stream derived from
    (seed, start, repetition), so the result does not depend on scheduling.
    Walks truncate when they reach an absorbing vertex.
    """
    if s.adjacency.nnz == 0:
        raise ValueError("graph has no edges")
    P = transition_matrix(s).tocsr()
    indptr, indices, data = P.indptr, P.indices, P.data

    walks = []
    for start in range(len(s)):
        if s.degrees[start] == 0:
            continue
        for rep in range(cfg.walks_per_node):
            rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, start, rep]))
            walk = [start]
            cur = start
            while len(walk) < cfg.walk_length:
                lo, hi = indptr[cur], indptr[cur + 1]
                if lo == hi:
                    break
                cum = np.cumsum(data[lo:hi])
                cur = int(indices[lo + np.searchsorted(cum, rng.random() * cum[-1], side="right")])
                walk.append(cur)
            walks.append(walk)
    return walks
