"""Higher-order skip-gram with negative sampling over co-occurrence tensors.

Training is a binary classification of observed index tuples against noise
tuples, scored by the higher-order inner product of factor-matrix rows.  At
its optimum the inner product reconstructs the kappa-shifted PMI tensor
(implicit CP decomposition).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from hosgns.cooccurrence import (
    CooccurrenceTensor,
    NegativeSampler,
    PositiveSampler,
    SpmiQuery,
    spmi,
)
from hosgns.errors import DivergenceError, ResourceBudgetError

ROLE_BY_POSITION = {
    2: ("node", "context"),
    3: ("node", "context", "time"),
    4: ("node", "context", "time", "context-time"),
}


@dataclass
class EmbeddingSet:
    """Factor matrices, one per tensor mode, all with the same width."""

    factors: list[np.ndarray]
    roles: tuple[str, ...]

    def __post_init__(self):
        dims = {f.shape[1] for f in self.factors}
        if len(dims) != 1:
            raise ValueError("all factors must share the embedding dimension")
        if len(self.roles) != len(self.factors):
            raise ValueError("one role per factor required")
        for f in self.factors:
            if not np.all(np.isfinite(f)):
                raise ValueError("factor entries must be finite")

    @property
    def order(self) -> int:
        return len(self.factors)

    @property
    def dim(self) -> int:
        return self.factors[0].shape[1]

    def factor_by_role(self, role: str) -> np.ndarray:
        return self.factors[self.roles.index(role)]


@dataclass(frozen=True)
class TrainConfig:
    dim: int = 128
    kappa: float = 5.0
    batch: int = 50_000
    lr_start: float = 0.05
    iterations: int = 10_000
    seed: int = 0
    init_scale: float = 0.5
    optimizer: str = "adam"
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_eps: float = 1e-8
    deterministic: bool = True
    checkpoint_every: int = 100

    def __post_init__(self):
        if self.kappa < 0:
            raise ValueError("kappa must be non-negative")
        if not (0 < self.adam_beta1 < 1 and 0 < self.adam_beta2 < 1):
            raise ValueError("adam betas must lie in (0, 1)")
        if self.optimizer not in ("adam", "sgd"):
            raise ValueError(f"unknown optimizer {self.optimizer!r}")


@dataclass(frozen=True)
class LossReport:
    iteration: int
    positive_term: float
    negative_term: float
    total: float


def log_sigmoid(x: np.ndarray) -> np.ndarray:
    """Numerically stable log(sigmoid(x))."""
    return -np.logaddexp(0.0, -np.asarray(x, dtype=np.float64))


def sigmoid(x: np.ndarray) -> np.ndarray:
    return 1.0 / (1.0 + np.exp(-np.asarray(x, dtype=np.float64)))


def ho_inner(vectors) -> float:
    """Sum over components of the product across the given vectors."""
    vectors = [np.asarray(v, dtype=np.float64) for v in vectors]
    dims = {v.shape for v in vectors}
    if len(dims) != 1:
        raise ValueError(f"dimension mismatch: {sorted(len(v) for v in vectors)}")
    prod = vectors[0].copy()
    for v in vectors[1:]:
        prod *= v
    return float(prod.sum())


def _gather_rows(factors, tuples):
    return [f[tuples[:, n]] for n, f in enumerate(factors)]


def _scores(rows) -> np.ndarray:
    prod = rows[0].copy()
    for r in rows[1:]:
        prod *= r
    return prod.sum(axis=1)


def _leave_one_out(rows):
    """For each mode, the elementwise product of all other modes' rows."""
    n = len(rows)
    ones = np.ones_like(rows[0])
    prefix = [ones]
    for r in rows[:-1]:
        prefix.append(prefix[-1] * r)
    suffix = [ones]
    for r in reversed(rows[1:]):
        suffix.append(suffix[-1] * r)
    suffix.reverse()
    return [prefix[k] * suffix[k] for k in range(n)]


def exact_loss(
    e: EmbeddingSet, t: CooccurrenceTensor, kappa: float, max_grid: int = 5_000_000
) -> LossReport:
    """Full-grid objective: -sum [P_D log s(m) + kappa P_N log s(-m)].

    Iterates the dense index grid, so this is an oracle for small instances;
    the data term touches only the sparse support, the noise term the whole
    grid through the marginal product.
    """
    if e.order != t.order:
        raise ValueError(f"order mismatch: embeddings {e.order}, tensor {t.order}")
    for f, size in zip(e.factors, t.mode_sizes):
        if f.shape[0] != size:
            raise ValueError(f"factor rows {f.shape[0]} != mode size {size}")
    grid = math.prod(t.mode_sizes)
    if grid > max_grid:
        raise ResourceBudgetError(f"grid of {grid} cells exceeds budget {max_grid}")

    subs = "ar,br,cr,dr"[: 3 * t.order - 1]
    out = "abcd"[: t.order]
    m = np.einsum(f"{subs}->{out}", *e.factors)

    support_m = m[tuple(t.coords[:, n] for n in range(t.order))]
    positive = -float(np.dot(t.values, log_sigmoid(support_m)))

    noise = t.marginals[0]
    for marg in t.marginals[1:]:
        noise = np.multiply.outer(noise, marg)
    negative = -kappa * float((noise * log_sigmoid(-m)).sum())

    return LossReport(0, positive, negative, positive + negative)


def gradients(
    e: EmbeddingSet,
    positives: np.ndarray,
    negatives: np.ndarray,
    kappa: float,
) -> list[np.ndarray]:
    """Mini-batch gradient of the sampled objective, one dense array per factor.

    Positive tuples carry weight 1/B; negative tuples carry total weight
    kappa regardless of how many were drawn per positive, i.e. each one
    weighs kappa/len(negatives) relative to the positive batch size.
    """
    grads = [np.zeros_like(f) for f in e.factors]
    b = len(positives)
    _accumulate_gradients(e.factors, grads, positives, negatives, kappa, b)
    return grads


def _accumulate_gradients(factors, grads, positives, negatives, kappa, b):
    pos_rows = _gather_rows(factors, positives)
    pos_coef = -(1.0 - sigmoid(_scores(pos_rows))) / b
    pos_other = _leave_one_out(pos_rows)
    for n in range(len(factors)):
        np.add.at(grads[n], positives[:, n], pos_coef[:, None] * pos_other[n])

    if len(negatives) and kappa > 0:
        neg_rows = _gather_rows(factors, negatives)
        neg_coef = sigmoid(_scores(neg_rows)) * (kappa / b / (len(negatives) / b))
        neg_other = _leave_one_out(neg_rows)
        for n in range(len(factors)):
            np.add.at(grads[n], negatives[:, n], neg_coef[:, None] * neg_other[n])


def batch_loss(factors, positives, negatives, kappa, b) -> tuple[float, float]:
    """Sampled-objective estimate on one batch (positive term, negative term)."""
    pos = -float(log_sigmoid(_scores(_gather_rows(factors, positives))).sum()) / b
    neg = 0.0
    if len(negatives) and kappa > 0:
        per_neg = kappa / len(negatives)
        neg = -per_neg * float(
            log_sigmoid(-_scores(_gather_rows(factors, negatives))).sum()
        )
    return pos, neg


class AdamState:
    """Dense Adam moments for one set of factor matrices."""

    def __init__(self, factors, beta1, beta2, eps):
        self.m = [np.zeros_like(f) for f in factors]
        self.v = [np.zeros_like(f) for f in factors]
        self.beta1, self.beta2, self.eps = beta1, beta2, eps
        self.t = 0

    def step(self, factors, grads, lr):
        self.t += 1
        b1, b2 = self.beta1, self.beta2
        correction = math.sqrt(1 - b2 ** self.t) / (1 - b1 ** self.t)
        for f, g, m, v in zip(factors, grads, self.m, self.v):
            m *= b1
            m += (1 - b1) * g
            v *= b2
            v += (1 - b2) * g * g
            f -= lr * correction * m / (np.sqrt(v) + self.eps)


def _sample_batch(positive_sampler, negative_sampler, batch, n_neg, order):
    positives = positive_sampler.draw(batch)
    negatives = np.empty((batch * n_neg, order), dtype=np.int64)
    negatives[:, 0] = np.repeat(positives[:, 0], n_neg)
    for mode in range(1, order):
        negatives[:, mode] = negative_sampler.draw_mode(mode, batch * n_neg)
    return positives, negatives


def train(
    t: CooccurrenceTensor, cfg: TrainConfig
) -> tuple[EmbeddingSet, list[LossReport]]:
    """Optimize factor matrices on the sampled objective.

    Per iteration, B positive tuples are drawn from the data distribution and
    kappa negatives per positive are formed by keeping the mode-0 index and
    resampling the remaining modes from their marginals.  The learning rate
    decays linearly to zero over the iteration budget.
    """
    order = t.order
    rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, 0]))
    bound = cfg.init_scale / cfg.dim
    factors = [
        rng.uniform(-bound, bound, size=(size, cfg.dim)) for size in t.mode_sizes
    ]
    positive_sampler = PositiveSampler(t, seed=_stream_seed(cfg.seed, 1))
    negative_sampler = NegativeSampler(t, seed=_stream_seed(cfg.seed, 2))
    n_neg = max(1, round(cfg.kappa))
    adam = (
        AdamState(factors, cfg.adam_beta1, cfg.adam_beta2, cfg.adam_eps)
        if cfg.optimizer == "adam"
        else None
    )
    grads = [np.zeros_like(f) for f in factors]
    reports = []

    for it in range(cfg.iterations):
        lr = cfg.lr_start * (1.0 - it / cfg.iterations)
        positives, negatives = _sample_batch(
            positive_sampler, negative_sampler, cfg.batch, n_neg, order
        )
        for g in grads:
            g[:] = 0.0
        _accumulate_gradients(factors, grads, positives, negatives, cfg.kappa,
                              cfg.batch)
        if adam is not None:
            adam.step(factors, grads, lr)
        else:
            for f, g in zip(factors, grads):
                f -= lr * g

        if (it + 1) % cfg.checkpoint_every == 0 or it == cfg.iterations - 1:
            pos, neg = batch_loss(factors, positives, negatives, cfg.kappa,
                                  cfg.batch)
            if not math.isfinite(pos + neg):
                raise DivergenceError(
                    f"non-finite loss at iteration {it} (lr={lr:.6g})"
                )
            reports.append(LossReport(it, pos, neg, pos + neg))

    roles = t.roles if len(t.roles) == order else ROLE_BY_POSITION[order]
    return EmbeddingSet(factors=factors, roles=tuple(roles)), reports


def _stream_seed(seed: int, stream: int) -> int:
    # keep sampler streams disjoint from the init stream
    return int(np.random.SeedSequence([seed, stream]).generate_state(1)[0])


def reconstruct_spmi(
    e: EmbeddingSet,
    t: CooccurrenceTensor,
    kappa: float,
    sample_size: int = 10_000,
    seed: int = 0,
) -> tuple[np.ndarray, np.ndarray, float]:
    """SPMI values vs embedding inner products on a uniform support sample.

    Returns (spmi values, inner products, squared Pearson correlation).
    """
    if e.order != t.order:
        raise ValueError(f"order mismatch: embeddings {e.order}, tensor {t.order}")
    rng = np.random.default_rng(seed)
    n = min(sample_size, t.nnz)
    picked = rng.choice(t.nnz, size=n, replace=False)
    query = SpmiQuery(kappa=max(kappa, 1.0)) if kappa >= 1 else SpmiQuery(1.0)
    shift = math.log(kappa) - math.log(query.kappa)
    targets = np.array(
        [spmi(t, t.coords[p], query) - shift for p in picked]
    )
    rows = _gather_rows(e.factors, t.coords[picked])
    predictions = _scores(rows)
    if np.std(targets) == 0 or np.std(predictions) == 0:
        r_squared = 0.0
    else:
        r_squared = float(np.corrcoef(targets, predictions)[0, 1] ** 2)
    return targets, predictions, r_squared


@dataclass
class SgnsReductionReport:
    generic_losses: list[float]
    handcoded_losses: list[float]
    max_loss_difference: float
    max_spmi_error: float
    generic: EmbeddingSet = field(repr=False, default=None)


def sgns_reduction_check(t: CooccurrenceTensor, cfg: TrainConfig) -> SgnsReductionReport:
    """Run the generic trainer at order 2 against a hand-coded SGNS loop.

    Both loops share seeds and draw order, so their per-step losses must agree
    to float reproduction; the report also measures how well W C^T matches the
    shifted PMI matrix on the support.
    """
    if t.order != 2:
        raise ValueError("reduction check requires an order-2 tensor")
    check_cfg = TrainConfig(**{**cfg.__dict__, "checkpoint_every": 1})
    embeddings, generic_reports = train(t, check_cfg)
    generic_losses = [r.total for r in generic_reports]

    handcoded_losses = _handcoded_sgns_losses(t, check_cfg)

    max_diff = max(
        abs(a - b) for a, b in zip(generic_losses, handcoded_losses)
    )
    query = SpmiQuery(kappa=max(cfg.kappa, 1.0))
    w, c = embeddings.factors
    errors = [
        abs(float(w[i] @ c[j]) - spmi(t, (i, j), query))
        for i, j in map(tuple, t.coords)
    ]
    return SgnsReductionReport(
        generic_losses=generic_losses,
        handcoded_losses=handcoded_losses,
        max_loss_difference=max_diff,
        max_spmi_error=max(errors),
        generic=embeddings,
    )


def _handcoded_sgns_losses(t: CooccurrenceTensor, cfg: TrainConfig) -> list[float]:
    """Plain word2vec-style SGNS with explicit 2-matrix updates."""
    rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, 0]))
    bound = cfg.init_scale / cfg.dim
    W = rng.uniform(-bound, bound, size=(t.mode_sizes[0], cfg.dim))
    C = rng.uniform(-bound, bound, size=(t.mode_sizes[1], cfg.dim))
    positive_sampler = PositiveSampler(t, seed=_stream_seed(cfg.seed, 1))
    negative_sampler = NegativeSampler(t, seed=_stream_seed(cfg.seed, 2))
    n_neg = max(1, round(cfg.kappa))
    adam = AdamState([W, C], cfg.adam_beta1, cfg.adam_beta2, cfg.adam_eps)
    losses = []

    for it in range(cfg.iterations):
        lr = cfg.lr_start * (1.0 - it / cfg.iterations)
        pos = positive_sampler.draw(cfg.batch)
        neg = np.empty((cfg.batch * n_neg, 2), dtype=np.int64)
        neg[:, 0] = np.repeat(pos[:, 0], n_neg)
        neg[:, 1] = negative_sampler.draw_mode(1, cfg.batch * n_neg)

        gW = np.zeros_like(W)
        gC = np.zeros_like(C)
        wp, cp = W[pos[:, 0]], C[pos[:, 1]]
        m_pos = (wp * cp).sum(axis=1)
        coef_pos = -(1.0 - sigmoid(m_pos)) / cfg.batch
        np.add.at(gW, pos[:, 0], coef_pos[:, None] * (np.ones_like(wp) * cp))
        np.add.at(gC, pos[:, 1], coef_pos[:, None] * (wp * np.ones_like(cp)))

        wn, cn = W[neg[:, 0]], C[neg[:, 1]]
        m_neg = (wn * cn).sum(axis=1)
        coef_neg = sigmoid(m_neg) * (
            cfg.kappa / cfg.batch / (len(neg) / cfg.batch)
        )
        np.add.at(gW, neg[:, 0], coef_neg[:, None] * (np.ones_like(wn) * cn))
        np.add.at(gC, neg[:, 1], coef_neg[:, None] * (wn * np.ones_like(cn)))

        adam.step([W, C], [gW, gC], lr)

        pos_term = -float(
            log_sigmoid((W[pos[:, 0]] * C[pos[:, 1]]).sum(axis=1)).sum()
        ) / cfg.batch
        neg_term = -(cfg.kappa / len(neg)) * float(
            log_sigmoid(-(W[neg[:, 0]] * C[neg[:, 1]]).sum(axis=1)).sum()
        )
        losses.append(pos_term + neg_term)
    return losses
