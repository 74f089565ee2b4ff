"""Downstream tasks: epidemic-state classification and event reconstruction.

Both tasks featurize embedding rows with simple combination operators, train
an internal multinomial logistic regression, and score with Macro-F1 over a
grid of embedding runs and leakage-free train/test splits.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from hosgns.errors import DegenerateSplitError, InfeasibleError
from hosgns.temporal_graph import TimeVaryingGraph
from hosgns.training import EmbeddingSet

logger = logging.getLogger(__name__)

OPERATORS = ("average", "hadamard", "weighted_l1", "weighted_l2", "concat")


# ---------------------------------------------------------------------------
# SIR simulation


@dataclass(frozen=True)
class SirConfig:
    beta: float
    mu: float
    seed: int = 0
    initial_infected: int | None = None  # None: uniformly random node

    def __post_init__(self):
        if not (0 <= self.beta <= 1 and 0 <= self.mu <= 1):
            raise ValueError("beta and mu must lie in [0, 1]")


@dataclass
class SirTrajectory:
    """Epidemic states of active (node, time) pairs plus per-slice counts."""

    states: dict[tuple[int, int], str]
    counts: list[tuple[int, int, int]]  # (S, I, R) per slice, over all nodes
    seed_node: int

    def infected_at(self, slice_index: int) -> int:
        return self.counts[slice_index][1]


def sir_simulate(g: TimeVaryingGraph, cfg: SirConfig) -> SirTrajectory:
    """Discrete-time SIR over the event sequence.

    The seed node turns infectious at its first active slice.  At each slice,
    an I-S contact of weight w infects with probability 1 - (1 - beta)^w;
    infectious nodes then recover with probability mu.  Updates are
    synchronous: infections and recoveries decided at slice k apply from
    slice k+1.
    """
    if not g.events:
        raise ValueError("graph has no events")
    rng = np.random.default_rng(cfg.seed)
    if cfg.initial_infected is None:
        seed_node = int(rng.integers(g.num_nodes))
    else:
        seed_node = cfg.initial_infected

    first_active = {}
    for node, k in g.active_pairs:
        first_active[node] = min(first_active.get(node, k), k)
    seed_slice = first_active.get(seed_node, 0)

    events_by_slice: dict[int, list] = {}
    for e in g.events:
        events_by_slice.setdefault(e.k, []).append(e)

    state = np.zeros(g.num_nodes, dtype=np.int8)  # 0=S, 1=I, 2=R
    names = "SIR"
    states: dict[tuple[int, int], str] = {}
    counts = []
    for k in range(g.num_times):
        if k == seed_slice and state[seed_node] == 0:
            state[seed_node] = 1
        for node, t in g.active_pairs:
            if t == k:
                states[(node, k)] = names[state[node]]
        counts.append(
            (int((state == 0).sum()), int((state == 1).sum()),
             int((state == 2).sum()))
        )
        newly_infected = []
        for e in events_by_slice.get(k, ()):
            pair = {state[e.i], state[e.j]}
            if pair == {0, 1}:
                target = e.i if state[e.i] == 0 else e.j
                if rng.random() < 1.0 - (1.0 - cfg.beta) ** e.weight:
                    newly_infected.append(target)
        recovering = [
            n for n in range(g.num_nodes)
            if state[n] == 1 and rng.random() < cfg.mu
        ]
        for n in newly_infected:
            state[n] = 1
        for n in recovering:
            state[n] = 2
    return SirTrajectory(states=states, counts=counts, seed_node=seed_node)


def sir_simulate_surviving(
    g: TimeVaryingGraph, cfg: SirConfig, max_attempts: int = 200
) -> SirTrajectory:
    """Resample trajectories until infections survive past the half-time."""
    half = g.num_times // 2
    for attempt in range(max_attempts):
        traj = sir_simulate(
            g, SirConfig(cfg.beta, cfg.mu, cfg.seed + attempt,
                         cfg.initial_infected)
        )
        if traj.infected_at(half) >= 1:
            return traj
    raise InfeasibleError(
        f"no surviving SIR trajectory in {max_attempts} attempts "
        f"(beta={cfg.beta}, mu={cfg.mu})"
    )


# ---------------------------------------------------------------------------
# Embedding combination operators


def combine(op: str, e: EmbeddingSet, target: str, idx) -> np.ndarray:
    """Feature vector for a (node, time) or (node, node, time) instance.

    ``target`` is "classification" (idx = (i, k)) or "reconstruction"
    (idx = (i, j, k)).  Operator definitions follow the embedding-combination
    table used for downstream evaluation; order-3 and order-4 embeddings
    differ only for the Hadamard product.
    """
    if op not in OPERATORS:
        raise ValueError(f"unknown operator {op!r}; valid: {OPERATORS}")
    w = e.factor_by_role("node")
    c = e.factor_by_role("context")
    t = e.factor_by_role("time")

    if target == "classification":
        i, k = idx
        if op == "average":
            return 0.5 * (w[i] + t[k])
        if op == "hadamard":
            if e.order == 3:
                return w[i] * c[i] * t[k]
            return w[i] * t[k]
        if op == "weighted_l1":
            return np.abs(w[i] - t[k])
        if op == "weighted_l2":
            return (w[i] - t[k]) ** 2
        return np.concatenate([w[i], t[k]])

    if target == "reconstruction":
        i, j, k = idx
        if op == "average":
            return (w[i] + c[j] + t[k]) / 3.0
        if op == "hadamard":
            if e.order == 3:
                return w[i] * c[j] * t[k]
            s = e.factor_by_role("context-time")
            return w[i] * c[j] * t[k] * s[k]
        if op == "weighted_l1":
            return (np.abs(w[i] - t[k]) + np.abs(w[i] - c[j])
                    + np.abs(c[j] - t[k])) / 3.0
        if op == "weighted_l2":
            return ((w[i] - t[k]) ** 2 + (w[i] - c[j]) ** 2
                    + (c[j] - t[k]) ** 2) / 3.0
        return np.concatenate([w[i], c[j], t[k]])

    raise ValueError(f"unknown target {target!r}")


# ---------------------------------------------------------------------------
# Splits and negative events


@dataclass(frozen=True)
class SplitSpec:
    node_train: frozenset[int]
    time_train: frozenset[int]
    num_nodes: int
    num_times: int
    fraction: float
    seed: int

    @property
    def node_test(self) -> frozenset[int]:
        return frozenset(range(self.num_nodes)) - self.node_train

    @property
    def time_test(self) -> frozenset[int]:
        return frozenset(range(self.num_times)) - self.time_train


def make_split(
    g: TimeVaryingGraph, fraction: float = 0.7, seed: int = 0,
    max_retries: int = 20,
) -> SplitSpec:
    """Independent uniform node and time splits with non-empty instance sets.

    Degenerate draws (no active pair falls in the train or test block) are
    resampled with a derived seed and logged; a split that stays degenerate
    after ``max_retries`` attempts raises.
    """
    if g.num_nodes < 2 or g.num_times < 2:
        raise DegenerateSplitError("need at least 2 nodes and 2 time slices")
    for attempt in range(max_retries):
        rng = np.random.default_rng(np.random.SeedSequence([seed, attempt]))
        nodes = rng.permutation(g.num_nodes)
        times = rng.permutation(g.num_times)
        n_cut = int(round(fraction * g.num_nodes))
        t_cut = int(round(fraction * g.num_times))
        spec = SplitSpec(
            node_train=frozenset(int(x) for x in nodes[:n_cut]),
            time_train=frozenset(int(x) for x in times[:t_cut]),
            num_nodes=g.num_nodes,
            num_times=g.num_times,
            fraction=fraction,
            seed=seed,
        )
        train_ok = any(
            n in spec.node_train and k in spec.time_train
            for n, k in g.active_pairs
        )
        test_ok = any(
            n in spec.node_test and k in spec.time_test
            for n, k in g.active_pairs
        )
        if train_ok and test_ok:
            return spec
        logger.info("degenerate split (seed=%d attempt=%d), resampling",
                    seed, attempt)
    raise DegenerateSplitError(
        f"no non-degenerate split after {max_retries} attempts "
        f"(fraction={fraction})"
    )


def negative_events(
    g: TimeVaryingGraph, seed: int = 0, cap_factor: int = 50
) -> list[tuple[int, int, int]]:
    """Exactly |E| non-events among active nodes, disjoint from the event set.

    Rejection sampling first, then an exhaustive fill over the remaining
    candidates when rejection stalls.
    """
    rng = np.random.default_rng(seed)
    existing = {(e.i, e.j, e.k) for e in g.events}
    active_by_slice: dict[int, list[int]] = {}
    for node, k in g.active_pairs:
        active_by_slice.setdefault(k, []).append(node)
    for k in active_by_slice:
        active_by_slice[k].sort()

    needed = g.num_events
    total_candidates = sum(
        len(nodes) * (len(nodes) - 1) // 2 for nodes in active_by_slice.values()
    ) - len(existing)
    if total_candidates < needed:
        raise InfeasibleError(
            f"only {total_candidates} candidate non-events exist, "
            f"{needed} required (deficit {needed - total_candidates})"
        )

    slices = sorted(active_by_slice)
    chosen: set[tuple[int, int, int]] = set()
    for _ in range(cap_factor * needed):
        if len(chosen) == needed:
            break
        k = slices[rng.integers(len(slices))]
        nodes = active_by_slice[k]
        if len(nodes) < 2:
            continue
        a, b = rng.choice(len(nodes), size=2, replace=False)
        i, j = sorted((nodes[a], nodes[b]))
        cand = (i, j, k)
        if cand not in existing and cand not in chosen:
            chosen.add(cand)

    if len(chosen) < needed:
        pool = [
            (nodes[a], nodes[b], k)
            for k in slices
            for nodes in [active_by_slice[k]]
            for a in range(len(nodes))
            for b in range(a + 1, len(nodes))
            if (nodes[a], nodes[b], k) not in existing
            and (nodes[a], nodes[b], k) not in chosen
        ]
        rng.shuffle(pool)
        for cand in pool[: needed - len(chosen)]:
            chosen.add(cand)

    return sorted(chosen)


# ---------------------------------------------------------------------------
# Multinomial logistic regression (internal, deterministic)


@dataclass
class LogRegConfig:
    l2: float = 1e-4
    max_epochs: int = 500
    grad_tol: float = 1e-6


@dataclass
class LogRegModel:
    weights: np.ndarray  # (n_features, n_classes)
    intercept: np.ndarray  # (n_classes,)
    classes: np.ndarray


def _softmax(z: np.ndarray) -> np.ndarray:
    z = z - z.max(axis=1, keepdims=True)
    ez = np.exp(z)
    return ez / ez.sum(axis=1, keepdims=True)


def logreg_fit(
    features: np.ndarray, labels, config: LogRegConfig | None = None
) -> LogRegModel:
    """L2-penalized multinomial logistic regression by full-batch descent.

    Step sizes come from backtracking line search (Armijo); the intercept is
    not penalized.  Deterministic: no randomness anywhere in the fit.
    """
    config = config or LogRegConfig()
    X = np.asarray(features, dtype=np.float64)
    labels = np.asarray(labels)
    classes, y = np.unique(labels, return_inverse=True)
    if len(classes) < 2:
        raise ValueError("training labels contain a single class")
    n, p = X.shape
    k = len(classes)
    Y = np.zeros((n, k))
    Y[np.arange(n), y] = 1.0

    W = np.zeros((p, k))
    b = np.zeros(k)

    def loss_and_grad(W, b):
        probs = _softmax(X @ W + b)
        ll = -np.log(probs[np.arange(n), y] + 1e-300).mean()
        ll += 0.5 * config.l2 * float((W * W).sum())
        diff = (probs - Y) / n
        gW = X.T @ diff + config.l2 * W
        gb = diff.sum(axis=0)
        return ll, gW, gb

    step = 1.0
    loss, gW, gb = loss_and_grad(W, b)
    for _ in range(config.max_epochs):
        gnorm = np.sqrt((gW * gW).sum() + (gb * gb).sum())
        if gnorm < config.grad_tol:
            break
        # Armijo backtracking from twice the previously accepted step
        step = min(step * 2.0, 1e6)
        while True:
            W_new = W - step * gW
            b_new = b - step * gb
            loss_new, gW_new, gb_new = loss_and_grad(W_new, b_new)
            if loss_new <= loss - 1e-4 * step * gnorm ** 2 or step < 1e-12:
                break
            step *= 0.5
        W, b, loss, gW, gb = W_new, b_new, loss_new, gW_new, gb_new
    return LogRegModel(weights=W, intercept=b, classes=classes)


def logreg_predict(model: LogRegModel, features: np.ndarray):
    X = np.asarray(features, dtype=np.float64)
    scores = X @ model.weights + model.intercept
    return model.classes[np.argmax(scores, axis=1)]


def macro_f1(true_labels, predicted_labels) -> float:
    """Unweighted mean of per-class F1 over classes present in the truth."""
    true_labels = np.asarray(true_labels)
    predicted_labels = np.asarray(predicted_labels)
    if len(true_labels) != len(predicted_labels) or len(true_labels) == 0:
        raise ValueError("label arrays must be non-empty and equal-length")
    scores = []
    for cls in np.unique(true_labels):
        tp = int(((predicted_labels == cls) & (true_labels == cls)).sum())
        fp = int(((predicted_labels == cls) & (true_labels != cls)).sum())
        fn = int(((predicted_labels != cls) & (true_labels == cls)).sum())
        denom = 2 * tp + fp + fn
        scores.append(2 * tp / denom if denom else 0.0)
    return float(np.mean(scores))


# ---------------------------------------------------------------------------
# Task orchestration


@dataclass
class EvalReport:
    task: str
    operator: str
    dim: int
    macro_f1_mean: float
    macro_f1_std: float
    n_runs: int
    n_splits: int
    seeds: list[int]
    params: dict = field(default_factory=dict)
    scores: list[float] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "task": self.task,
            "operator": self.operator,
            "dim": self.dim,
            "params": self.params,
            "macro_f1_mean": self.macro_f1_mean,
            "macro_f1_std": self.macro_f1_std,
            "n_runs": self.n_runs,
            "n_splits": self.n_splits,
            "seeds": self.seeds,
        }


def run_classification(
    g: TimeVaryingGraph,
    embeddings: list[EmbeddingSet],
    sir_cfg: SirConfig,
    operator: str = "hadamard",
    n_splits: int = 10,
    seed: int = 0,
) -> EvalReport:
    """Macro-F1 of epidemic-state prediction over (run, split) pairs.

    Each embedding run is paired with its own SIR realization; splits keep
    train and test instances on disjoint node and time sets.
    """
    scores = []
    split_seeds = []
    for run_idx, emb in enumerate(embeddings):
        traj = sir_simulate_surviving(
            g, SirConfig(sir_cfg.beta, sir_cfg.mu,
                         seed=sir_cfg.seed + 1000 * run_idx)
        )
        for split_idx in range(n_splits):
            split_seed = seed + 100 * run_idx + split_idx
            split = make_split(g, seed=split_seed)
            split_seeds.append(split_seed)

            def block(nodes, times):
                X, y = [], []
                for node, k in sorted(g.active_pairs):
                    if node in nodes and k in times:
                        X.append(combine(operator, emb, "classification",
                                         (node, k)))
                        y.append(traj.states[(node, k)])
                return np.array(X), np.array(y)

            X_tr, y_tr = block(split.node_train, split.time_train)
            X_ts, y_ts = block(split.node_test, split.time_test)
            if len(np.unique(y_tr)) < 2 or len(y_ts) == 0:
                logger.info("skipping degenerate (run=%d, split=%d)",
                            run_idx, split_idx)
                continue
            model = logreg_fit(X_tr, y_tr)
            scores.append(macro_f1(y_ts, logreg_predict(model, X_ts)))

    return _report("classification", operator, embeddings, scores,
                   len(embeddings), n_splits, split_seeds,
                   {"beta": sir_cfg.beta, "mu": sir_cfg.mu})


def run_reconstruction(
    g: TimeVaryingGraph,
    embeddings: list[EmbeddingSet],
    operator: str = "hadamard",
    n_splits: int = 10,
    seed: int = 0,
) -> EvalReport:
    """Macro-F1 of event-vs-non-event prediction over (run, split) pairs."""
    scores = []
    split_seeds = []
    positives = [(e.i, e.j, e.k) for e in g.events]
    for run_idx, emb in enumerate(embeddings):
        negatives = negative_events(g, seed=seed + 7000 + run_idx)
        for split_idx in range(n_splits):
            split_seed = seed + 100 * run_idx + split_idx
            split = make_split(g, seed=split_seed)
            split_seeds.append(split_seed)

            def block(nodes, times):
                X, y = [], []
                for label, instances in ((1, positives), (0, negatives)):
                    for i, j, k in instances:
                        if i in nodes and j in nodes and k in times:
                            X.append(combine(operator, emb, "reconstruction",
                                             (i, j, k)))
                            y.append(label)
                return np.array(X), np.array(y)

            X_tr, y_tr = block(split.node_train, split.time_train)
            X_ts, y_ts = block(split.node_test, split.time_test)
            if len(np.unique(y_tr)) < 2 or len(y_ts) == 0:
                logger.info("skipping degenerate (run=%d, split=%d)",
                            run_idx, split_idx)
                continue
            model = logreg_fit(X_tr, y_tr)
            scores.append(macro_f1(y_ts, logreg_predict(model, X_ts)))

    return _report("reconstruction", operator, embeddings, scores,
                   len(embeddings), n_splits, split_seeds, {})


def _report(task, operator, embeddings, scores, n_runs, n_splits, seeds,
            params) -> EvalReport:
    if not scores:
        raise DegenerateSplitError(f"no usable (run, split) pairs for {task}")
    return EvalReport(
        task=task,
        operator=operator,
        dim=embeddings[0].dim if embeddings else 0,
        macro_f1_mean=float(np.mean(scores)),
        macro_f1_std=float(np.std(scores)),
        n_runs=n_runs,
        n_splits=n_splits,
        seeds=seeds,
        params=params,
        scores=[float(s) for s in scores],
    )
