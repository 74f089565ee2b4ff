"""Sparse co-occurrence probability tensors and their samplers.

Three constructions are provided: the event-frequency tensor (order 3), the
random-walk co-occurrence tensor over the supra-adjacency graph (order 4),
and their average.  All tensors are probability distributions: entries are
positive and sum to 1, with per-mode marginals cached at construction.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.sparse as sp

from hosgns.alias import AliasTable
from hosgns.errors import ResourceBudgetError
from hosgns.supra import (
    SupraGraph,
    WalkConfig,
    sample_walks,
    stationary_distribution,
    transition_matrix,
)
from hosgns.temporal_graph import TimeVaryingGraph, graph_volume

NEG_INF = float("-inf")

ROLE_SETS = {
    3: ("node", "context", "time"),
    4: ("node", "context", "time", "context-time"),
}


@dataclass(frozen=True)
class SpmiQuery:
    """Negative-sampling shift used when reading PMI values."""

    kappa: float = 1.0

    def __post_init__(self):
        if self.kappa < 1:
            raise ValueError(f"kappa must be >= 1, got {self.kappa}")


class CooccurrenceTensor:
    """Immutable sparse probability tensor with cached mode marginals."""

    def __init__(self, mode_sizes, coords: np.ndarray, values: np.ndarray, roles):
        coords = np.asarray(coords, dtype=np.int64)
        values = np.asarray(values, dtype=np.float64)
        if coords.ndim != 2 or coords.shape[0] != len(values):
            raise ValueError("coords must be (nnz, order) aligned with values")
        order = coords.shape[1]
        if order not in (2, 3, 4):
            raise ValueError(f"unsupported tensor order {order}")
        if len(roles) != order or len(mode_sizes) != order:
            raise ValueError("roles and mode_sizes must match the tensor order")
        if np.any(values <= 0):
            raise ValueError("all stored entries must be positive")
        total = values.sum()
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"tensor must sum to 1, got {total}")
        for n, size in enumerate(mode_sizes):
            if np.any(coords[:, n] < 0) or np.any(coords[:, n] >= size):
                raise ValueError(f"mode-{n} index out of range")

        self.order = order
        self.mode_sizes = tuple(int(s) for s in mode_sizes)
        self.coords = coords
        self.values = values
        self.roles = tuple(roles)
        self.marginals = [
            np.bincount(coords[:, n], weights=values, minlength=self.mode_sizes[n])
            for n in range(order)
        ]

    @property
    def nnz(self) -> int:
        return len(self.values)

    @cached_property
    def _index(self) -> dict[tuple[int, ...], float]:
        return {tuple(c): v for c, v in zip(map(tuple, self.coords), self.values)}

    def value(self, idx) -> float:
        """Stored probability of ``idx`` (0.0 if absent)."""
        return self._index.get(tuple(idx), 0.0)

    def noise_value(self, idx) -> float:
        """Product of marginals at ``idx`` (the negative-sampling probability)."""
        return math.prod(self.marginals[n][idx[n]] for n in range(self.order))

    def export_coo(self) -> str:
        lines = [
            " ".join(map(str, c)) + f" {v:.17g}"
            for c, v in zip(self.coords, self.values)
        ]
        return "\n".join(lines) + "\n"

    def export_sidecar(self) -> str:
        return json.dumps(
            {"order": self.order, "mode_sizes": list(self.mode_sizes),
             "roles": list(self.roles)},
            sort_keys=True,
        )

    @classmethod
    def from_coo(cls, coo_text: str, sidecar_text: str) -> "CooccurrenceTensor":
        meta = json.loads(sidecar_text)
        coords, values = [], []
        for line in coo_text.strip().splitlines():
            parts = line.split()
            coords.append([int(x) for x in parts[:-1]])
            values.append(float(parts[-1]))
        return cls(meta["mode_sizes"], np.array(coords), np.array(values),
                   meta["roles"])


def spmi(t: CooccurrenceTensor, idx, q: SpmiQuery) -> float:
    """Shifted PMI log(P_D / prod marginals) - log kappa at one index.

    Returns -inf for a support-compatible index with no stored entry; raises
    for an impossible index (a zero marginal).
    """
    idx = tuple(idx)
    if len(idx) != t.order:
        raise ValueError(f"index arity {len(idx)} != tensor order {t.order}")
    noise = t.noise_value(idx)
    if noise == 0.0:
        raise ValueError(f"index {idx} has a zero marginal")
    p = t.value(idx)
    if p == 0.0:
        return NEG_INF
    return math.log(p / noise) - math.log(q.kappa)


def _aggregate(mode_sizes, coords, values):
    """Sum duplicate coordinates and drop non-positive entries."""
    key = np.zeros(len(values), dtype=np.int64)
    for n, size in enumerate(mode_sizes):
        key = key * size + coords[:, n]
    order = np.argsort(key, kind="stable")
    key, coords, values = key[order], coords[order], values[order]
    uniq, start = np.unique(key, return_index=True)
    summed = np.add.reduceat(values, start)
    coords = coords[start]
    keep = summed > 0
    return coords[keep], summed[keep]


def stat_tensor(g: TimeVaryingGraph) -> CooccurrenceTensor:
    """Order-3 tensor of event frequencies, symmetric in (node, context)."""
    vol = graph_volume(g)
    coords, values = [], []
    for e in g.events:
        coords.append((e.i, e.j, e.k))
        coords.append((e.j, e.i, e.k))
        values += [e.weight / vol] * 2
    return CooccurrenceTensor(
        (g.num_nodes, g.num_nodes, g.num_times),
        np.array(coords), np.array(values), ROLE_SETS[3],
    )


def dyn_tensor(
    s: SupraGraph, window: int, max_entries: int = 50_000_000
) -> CooccurrenceTensor:
    """Order-4 tensor of expected walk co-occurrences, via exact matrix powers.

    Entry (i,j,k,l) averages, over walk lengths r = 1..window, the probability
    of standing at i^(k) under the stationary distribution and reaching j^(l)
    in r steps (and the reverse direction).
    """
    if window < 1:
        raise ValueError("window must be >= 1")
    P = transition_matrix(s).tocsr()
    pstar = stationary_distribution(s)

    acc = P.copy()
    power = P
    for _ in range(window - 1):
        power = (power @ P).tocsr()
        if power.nnz > max_entries:
            raise ResourceBudgetError(
                f"matrix power exceeds {max_entries} entries; "
                "use dyn_tensor_sampled for graphs of this size"
            )
        acc = acc + power
    Q = (sp.diags(pstar) @ acc).tocoo()
    # symmetrize: entry gets both the forward and the reverse walk term
    S = ((Q + Q.T) * (1.0 / (2 * window))).tocoo()
    if S.nnz > max_entries:
        raise ResourceBudgetError(f"tensor exceeds {max_entries} entries")

    pairs = np.array(s.nodes, dtype=np.int64)
    i = pairs[S.row, 0]
    k = pairs[S.row, 1]
    j = pairs[S.col, 0]
    l = pairs[S.col, 1]
    coords = np.stack([i, j, k, l], axis=1)
    keep = S.data > 0
    return CooccurrenceTensor(
        (s.num_nodes, s.num_nodes, s.num_times, s.num_times),
        coords[keep], S.data[keep], ROLE_SETS[4],
    )


def dyn_tensor_sampled(s: SupraGraph, cfg: WalkConfig) -> CooccurrenceTensor:
    """Empirical estimate of the walk co-occurrence tensor from sampled walks.

    Counts (center, context) supra-vertex pairs within the context window over
    the sampled walks; the count matrix is already symmetric because each
    unordered position pair contributes in both directions.
    """
    walks = sample_walks(s, cfg)
    counts: dict[tuple[int, int], float] = {}
    for walk in walks:
        for p in range(len(walk)):
            for q in range(p + 1, min(p + cfg.window + 1, len(walk))):
                a, b = walk[p], walk[q]
                counts[(a, b)] = counts.get((a, b), 0.0) + 1.0
                counts[(b, a)] = counts.get((b, a), 0.0) + 1.0
    if not counts:
        raise ValueError("no co-occurrences sampled")
    total = sum(counts.values())
    pairs = np.array(s.nodes, dtype=np.int64)
    flat_ab = np.array(list(counts.keys()), dtype=np.int64)
    values = np.array(list(counts.values())) / total
    coords = np.stack(
        [pairs[flat_ab[:, 0], 0], pairs[flat_ab[:, 1], 0],
         pairs[flat_ab[:, 0], 1], pairs[flat_ab[:, 1], 1]],
        axis=1,
    )
    coords, values = _aggregate(
        (s.num_nodes, s.num_nodes, s.num_times, s.num_times), coords, values
    )
    return CooccurrenceTensor(
        (s.num_nodes, s.num_nodes, s.num_times, s.num_times),
        coords, values, ROLE_SETS[4],
    )


def statdyn_tensor(
    stat: CooccurrenceTensor, dyn: CooccurrenceTensor
) -> CooccurrenceTensor:
    """Average of the event tensor (on the time diagonal) and the walk tensor."""
    if stat.order != 3 or dyn.order != 4:
        raise ValueError("expected an order-3 and an order-4 tensor")
    if stat.mode_sizes != dyn.mode_sizes[:3]:
        raise ValueError(
            f"incompatible mode sizes {stat.mode_sizes} vs {dyn.mode_sizes}"
        )
    stat_coords = np.column_stack([stat.coords, stat.coords[:, 2]])
    coords = np.concatenate([stat_coords, dyn.coords])
    values = np.concatenate([stat.values, dyn.values]) * 0.5
    coords, values = _aggregate(dyn.mode_sizes, coords, values)
    return CooccurrenceTensor(dyn.mode_sizes, coords, values, dyn.roles)


def deepwalk_expected_pmi(adjacency, i: int, j: int, window: int) -> float:
    """Expected skip-gram PMI of a node-context pair on a static weighted graph.

    Evaluates, via matrix powers of the walk transition matrix, the log ratio
    of the window-averaged co-occurrence probability to the product of the
    stationary probabilities.  Returns -inf when the pair cannot co-occur.
    """
    A = np.asarray(
        adjacency.todense() if sp.issparse(adjacency) else adjacency, dtype=float
    )
    d = A.sum(axis=1)
    if d[i] <= 0 or d[j] <= 0:
        raise ValueError("both nodes must have positive degree")
    vol = d.sum()
    p_i, p_j = d[i] / vol, d[j] / vol
    P = A / np.where(d > 0, d, 1.0)[:, None]
    power = np.eye(len(A))
    num = 0.0
    for _ in range(window):
        power = power @ P
        num += p_i * power[i, j] + p_j * power[j, i]
    num /= 2 * window
    if num == 0.0:
        return NEG_INF
    return math.log(num / (p_i * p_j))


class PositiveSampler:
    """Stream of tensor indices drawn with the data probabilities."""

    def __init__(self, t: CooccurrenceTensor, seed: int):
        self._coords = t.coords
        self._table = AliasTable(t.values)
        self._rng = np.random.default_rng(np.random.SeedSequence([seed]))

    def draw(self, size: int) -> np.ndarray:
        """(size, order) array of indices sampled from P_D."""
        return self._coords[self._table.draw(self._rng, size)]


class NegativeSampler:
    """Stream of tensor indices with each mode drawn from its marginal."""

    def __init__(self, t: CooccurrenceTensor, seed: int):
        self._tables = [AliasTable(m) for m in t.marginals]
        self._rng = np.random.default_rng(np.random.SeedSequence([seed]))

    def draw(self, size: int) -> np.ndarray:
        """(size, order) array with independently sampled mode indices."""
        return np.stack([t.draw(self._rng, size) for t in self._tables], axis=1)

    def draw_mode(self, mode: int, size: int) -> np.ndarray:
        """``size`` indices from the marginal of one mode."""
        return self._tables[mode].draw(self._rng, size)
