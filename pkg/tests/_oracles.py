"""Independent brute-force oracles used by the test suite.

Everything here is written as plainly as possible (scalar loops, explicit
path enumeration) so that it shares no code path with the library
implementations it checks.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from hosgns.cooccurrence import CooccurrenceTensor
from hosgns.temporal_graph import Event, TimeVaryingGraph
from hosgns.training import EmbeddingSet, batch_loss

ROLES = ("node", "context", "time", "context-time")


def make_graph(event_tuples, num_nodes=None, num_times=None) -> TimeVaryingGraph:
    """Graph from (i, j, k[, weight]) tuples; sizes inferred unless given."""
    events = []
    for tup in event_tuples:
        i, j, k = tup[:3]
        w = tup[3] if len(tup) > 3 else 1.0
        events.append(Event(min(i, j), max(i, j), k, float(w)))
    if num_nodes is None:
        num_nodes = max(max(e.i, e.j) for e in events) + 1
    if num_times is None:
        num_times = max(e.k for e in events) + 1
    return TimeVaryingGraph(num_nodes=num_nodes, num_times=num_times,
                            events=events)


def random_graph(rng: np.random.Generator, max_nodes=6, max_times=5,
                 max_events=12) -> TimeVaryingGraph:
    """Small random time-varying graph with at least one event."""
    n = int(rng.integers(2, max_nodes + 1))
    t = int(rng.integers(1, max_times + 1))
    n_events = int(rng.integers(1, max_events + 1))
    seen = set()
    tuples = []
    for _ in range(n_events):
        i, j = rng.choice(n, size=2, replace=False)
        k = int(rng.integers(t))
        key = (min(i, j), max(i, j), k)
        if key in seen:
            continue
        seen.add(key)
        tuples.append((int(i), int(j), k, float(rng.integers(1, 5))))
    used_times = sorted({k for _, _, k, _ in tuples})
    remap = {k: idx for idx, k in enumerate(used_times)}
    tuples = [(i, j, remap[k], w) for i, j, k, w in tuples]
    return make_graph(tuples, num_nodes=n, num_times=len(used_times))


def derive_supra_edges(g: TimeVaryingGraph) -> dict[tuple, float]:
    """Re-derive the supra-adjacency edge weights from first principles.

    For each event (i, j, t0): if i participates in any later event at t1,
    couple j^(t0) to i^(t1) with the event weight and i^(t0) to i^(t1) with
    weight 1 (the latter only once); symmetrically for j.  Keys are
    unordered pairs of (node, time) pairs.
    """
    timeline: dict[int, list[int]] = {}
    for e in g.events:
        for node in (e.i, e.j):
            timeline.setdefault(node, []).append(e.k)
    for node in timeline:
        timeline[node] = sorted(set(timeline[node]))

    def successor(node, t):
        later = [x for x in timeline[node] if x > t]
        return later[0] if later else None

    cross: dict[tuple, float] = {}
    selfc: set[tuple] = set()
    for e in g.events:
        for active, other in ((e.i, e.j), (e.j, e.i)):
            t_next = successor(active, e.k)
            if t_next is None:
                continue
            key = frozenset({(other, e.k), (active, t_next)})
            cross[key] = cross.get(key, 0.0) + e.weight
            selfc.add(frozenset({(active, e.k), (active, t_next)}))

    edges: dict[tuple, float] = {}
    for key, w in cross.items():
        a, b = sorted(key)
        edges[(a, b)] = edges.get((a, b), 0.0) + w
    for key in selfc:
        a, b = sorted(key)
        edges[(a, b)] = edges.get((a, b), 0.0) + 1.0
    return edges


def brute_force_dyn_entries(supra, window: int) -> dict[tuple, float]:
    """Walk co-occurrence probabilities by explicit path enumeration.

    Sums, over r = 1..window and over every length-r path a -> b, the
    stationary weight of a times the product of one-step probabilities along
    the path; the (a, b) and (b, a) contributions are averaged exactly as in
    the tensor definition.
    """
    n = len(supra)
    A = supra.adjacency.toarray()
    deg = A.sum(axis=1)
    vol = deg.sum()
    step = {
        (a, b): A[a, b] / deg[a]
        for a in range(n) for b in range(n)
        if deg[a] > 0 and A[a, b] > 0
    }

    # accumulate sum over r of P^r path by path
    total: dict[tuple[int, int], float] = {}
    for r in range(1, window + 1):
        layer: dict[tuple[int, int], float] = {}

        def paths(start, cur, prob, depth):
            if depth == r:
                layer[(start, cur)] = layer.get((start, cur), 0.0) + prob
                return
            for b in range(n):
                p = step.get((cur, b))
                if p is not None:
                    paths(start, b, prob * p, depth + 1)

        for a in range(n):
            paths(a, a, 1.0, 0)
        for key, v in layer.items():
            total[key] = total.get(key, 0.0) + v

    entries: dict[tuple, float] = {}
    for (a, b), powersum in total.items():
        i, k = supra.unflat(a)
        j, l = supra.unflat(b)
        contribution = (deg[a] / vol) * powersum / (2 * window)
        key = (i, j, k, l)
        entries[key] = entries.get(key, 0.0) + contribution
        key_rev = (j, i, l, k)
        entries[key_rev] = entries.get(key_rev, 0.0) + contribution
    return entries


def scalar_exact_loss(e: EmbeddingSet, t: CooccurrenceTensor,
                      kappa: float) -> float:
    """Full-grid objective recomputed with scalar math only."""
    def sig(x):
        return 1.0 / (1.0 + math.exp(-x))

    def inner(idx):
        return sum(
            math.prod(e.factors[n][idx[n]][r] for n in range(t.order))
            for r in range(e.dim)
        )

    total = 0.0
    for idx, v in zip(map(tuple, t.coords), t.values):
        total -= v * math.log(sig(inner(idx)))
    for idx in itertools.product(*(range(s) for s in t.mode_sizes)):
        p_n = math.prod(t.marginals[n][idx[n]] for n in range(t.order))
        if p_n > 0:
            total -= kappa * p_n * math.log(sig(-inner(idx)))
    return total


def finite_difference_gradients(e: EmbeddingSet, positives, negatives,
                                kappa: float, h: float = 1e-5):
    """Central finite differences of the sampled batch loss."""
    b = len(positives)

    def loss():
        pos, neg = batch_loss(e.factors, positives, negatives, kappa, b)
        return pos + neg

    grads = []
    for f in e.factors:
        g = np.zeros_like(f)
        for row in range(f.shape[0]):
            for col in range(f.shape[1]):
                orig = f[row, col]
                f[row, col] = orig + h
                up = loss()
                f[row, col] = orig - h
                down = loss()
                f[row, col] = orig
                g[row, col] = (up - down) / (2 * h)
        grads.append(g)
    return grads


def planted_tensor(mode_sizes, seed: int) -> CooccurrenceTensor:
    """Full-support tensor whose shifted PMI is an exact low-rank CP product.

    The tensor is built as P(idx) proportional to
    ``prod_n scale_n[idx_n] * exp(prod_n inter_n[idx_n])``.  Its PMI then
    equals the planted multiplicative interaction plus one correction
    component per mode (the log-ratio of the scale vector to the realized
    marginal, with constants folded in), so for order 3 the PMI tensor has
    CP rank at most 4 and is exactly representable by width-4 factors.
    """
    rng = np.random.default_rng(seed)
    order = len(mode_sizes)
    scales = [rng.uniform(0.5, 1.5, size=s) for s in mode_sizes]
    inter = [rng.uniform(-1.0, 1.0, size=s) for s in mode_sizes]
    subs = "a,b,c,d"[: 2 * order - 1]
    out = "abcd"[:order]
    interaction = np.einsum(f"{subs}->{out}", *inter)
    dense = np.einsum(f"{subs}->{out}", *scales) * np.exp(interaction)
    dense /= dense.sum()
    grids = np.meshgrid(*[np.arange(s) for s in mode_sizes], indexing="ij")
    coords = np.stack([g.ravel() for g in grids], axis=1)
    return CooccurrenceTensor(mode_sizes, coords, dense.ravel(),
                              ROLES[:order])


def random_tensor(rng: np.random.Generator, mode_sizes,
                  density: float = 1.0) -> CooccurrenceTensor:
    """Random sparse probability tensor with at least one entry."""
    order = len(mode_sizes)
    grids = np.meshgrid(*[np.arange(s) for s in mode_sizes], indexing="ij")
    coords = np.stack([g.ravel() for g in grids], axis=1)
    keep = rng.random(len(coords)) < density
    if not keep.any():
        keep[rng.integers(len(coords))] = True
    coords = coords[keep]
    values = rng.random(len(coords)) + 0.05
    values /= values.sum()
    return CooccurrenceTensor(mode_sizes, coords, values, ROLES[:order])


def random_embeddings(rng: np.random.Generator, mode_sizes, dim: int,
                      scale: float = 0.5) -> EmbeddingSet:
    order = len(mode_sizes)
    factors = [rng.normal(scale=scale, size=(s, dim)) for s in mode_sizes]
    return EmbeddingSet(factors=factors, roles=ROLES[:order])
