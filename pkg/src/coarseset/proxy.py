"""One-hidden-layer softmax classifier used as the desk-scale proxy.

Supplies (a) test accuracy for budget sweeps and (b) hidden-layer ReLU
activations, which stand in for the pre-final-layer features the iterative
core-set baseline retrains on. Everything is hand-written numpy so the
backward pass can be audited against finite differences (gradient_check).

Parameters are stored float32 with all arithmetic in float64; training is
plain mini-batch SGD and fully deterministic given TrainConfig.rng_seed
(init and per-epoch shuffles come from one Rng stream: W1 row-major, b1,
W2 row-major, b2, each uniform in +-1/sqrt(fan_in), then one Fisher-Yates
shuffle of the subset per epoch).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import (
    DimensionMismatch,
    EmptyEvalSet,
    EmptySubset,
    IndexOutOfRange,
    LabelOutOfRange,
)
from .rng import Rng
from .selector import Trainer
from .store import EmbeddingMatrix, LabelVector


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 100
    batch_size: int = 32
    learning_rate: float = 0.05
    rng_seed: int = 0
    hidden: int = 32

    def __post_init__(self):
        if self.epochs < 1 or self.batch_size < 1 or self.hidden < 1:
            raise ValueError("epochs, batch_size and hidden must be positive")
        if self.learning_rate <= 0:
            raise ValueError(f"learning_rate must be positive, got {self.learning_rate}")
        if self.rng_seed < 0:
            raise ValueError(f"rng_seed must be non-negative, got {self.rng_seed}")


@dataclass(frozen=True)
class MlpModel:
    """ReLU(W1 x + b1) -> softmax(W2 h + b2); weights stored float32."""

    w1: np.ndarray  # h x d
    b1: np.ndarray  # h
    w2: np.ndarray  # C x h
    b2: np.ndarray  # C

    @property
    def input_dim(self) -> int:
        return self.w1.shape[1]

    @property
    def hidden_dim(self) -> int:
        return self.w1.shape[0]

    @property
    def num_classes(self) -> int:
        return self.w2.shape[0]


def _init_params(rng: Rng, d: int, h: int, c: int, dtype) -> list[np.ndarray]:
    """Uniform +-1/sqrt(fan_in) init, drawn in a fixed order."""
    def draw(rows, cols, bound):
        vals = [rng.uniform(-bound, bound) for _ in range(rows * cols)]
        return np.asarray(vals, dtype=dtype).reshape(rows, cols)

    bound1 = 1.0 / np.sqrt(d)
    bound2 = 1.0 / np.sqrt(h)
    w1 = draw(h, d, bound1)
    b1 = draw(1, h, bound1)[0]
    w2 = draw(c, h, bound2)
    b2 = draw(1, c, bound2)[0]
    return [w1, b1, w2, b2]


def _forward(params: Sequence[np.ndarray], x: np.ndarray):
    """Returns (hidden pre-activation, hidden, logits); float64 throughout."""
    w1, b1, w2, b2 = (p.astype(np.float64) for p in params)
    z1 = x @ w1.T + b1
    hidden = np.maximum(z1, 0.0)
    logits = hidden @ w2.T + b2
    return z1, hidden, logits


def softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=1, keepdims=True)
    exp = np.exp(shifted)
    return exp / exp.sum(axis=1, keepdims=True)


def cross_entropy(logits: np.ndarray, y: np.ndarray) -> float:
    """Mean softmax cross-entropy, computed from the log-sum-exp directly."""
    shifted = logits - logits.max(axis=1, keepdims=True)
    log_probs = shifted - np.log(np.exp(shifted).sum(axis=1, keepdims=True))
    return float(-log_probs[np.arange(len(y)), y].mean())


def _loss_and_grads(params: Sequence[np.ndarray], x: np.ndarray, y: np.ndarray):
    w2 = params[2].astype(np.float64)
    z1, hidden, logits = _forward(params, x)
    loss = cross_entropy(logits, y)

    m = x.shape[0]
    dlogits = softmax(logits)
    dlogits[np.arange(m), y] -= 1.0
    dlogits /= m
    dw2 = dlogits.T @ hidden
    db2 = dlogits.sum(axis=0)
    dhidden = dlogits @ w2
    dz1 = np.where(z1 > 0.0, dhidden, 0.0)
    dw1 = dz1.T @ x
    db1 = dz1.sum(axis=0)
    return loss, [dw1, db1, dw2, db2]


def _apply_update(params: Sequence[np.ndarray], grads: Sequence[np.ndarray], lr: float):
    """SGD step in float64, results cast back to the storage dtype."""
    return [
        (p.astype(np.float64) - lr * g).astype(p.dtype)
        for p, g in zip(params, grads)
    ]


def train(
    e: EmbeddingMatrix,
    labels: LabelVector,
    subset: Sequence[int],
    cfg: TrainConfig = TrainConfig(),
) -> MlpModel:
    """Mini-batch SGD on softmax cross-entropy over the given subset."""
    idx = [int(i) for i in subset]
    if not idx:
        raise EmptySubset("training subset is empty")
    for i in idx:
        if not 0 <= i < e.n:
            raise IndexOutOfRange(f"subset index {i} outside [0, {e.n})")
    if len(labels) != e.n:
        raise DimensionMismatch(
            f"labels cover {len(labels)} points, embeddings have {e.n}"
        )
    y_all = labels.labels
    if int(y_all[idx].max()) >= labels.num_classes:
        raise LabelOutOfRange("label id not below num_classes")

    x_pool = e.data[idx].astype(np.float64)
    y_pool = y_all[idx]
    rng = Rng(cfg.rng_seed)
    params = _init_params(rng, e.d, cfg.hidden, labels.num_classes, np.float32)

    m = len(idx)
    positions = list(range(m))
    for _ in range(cfg.epochs):
        rng.shuffle(positions)
        for start in range(0, m, cfg.batch_size):
            batch = positions[start : start + cfg.batch_size]
            _, grads = _loss_and_grads(params, x_pool[batch], y_pool[batch])
            params = _apply_update(params, grads, cfg.learning_rate)

    for p in params:
        if not np.isfinite(p).all():
            raise ArithmeticError("training produced non-finite parameters")
    return MlpModel(*params)


def extract_features(m: MlpModel, e: EmbeddingMatrix) -> EmbeddingMatrix:
    """Hidden activations ReLU(W1 x + b1) as an n x h feature matrix."""
    if e.d != m.input_dim:
        raise DimensionMismatch(
            f"model expects d={m.input_dim}, embeddings have d={e.d}"
        )
    _, hidden, _ = _forward([m.w1, m.b1, m.w2, m.b2], e.data.astype(np.float64))
    return EmbeddingMatrix(hidden.astype(np.float32))


def predict(m: MlpModel, e: EmbeddingMatrix) -> np.ndarray:
    """Argmax class per point; ties resolve to the lowest class id."""
    if e.d != m.input_dim:
        raise DimensionMismatch(
            f"model expects d={m.input_dim}, embeddings have d={e.d}"
        )
    _, _, logits = _forward([m.w1, m.b1, m.w2, m.b2], e.data.astype(np.float64))
    return np.argmax(logits, axis=1)


def accuracy(
    m: MlpModel,
    e: EmbeddingMatrix,
    labels: LabelVector,
    subset: Optional[Sequence[int]] = None,
) -> float:
    """Fraction of points whose predicted class equals the label."""
    if len(labels) != e.n:
        raise DimensionMismatch(
            f"labels cover {len(labels)} points, embeddings have {e.n}"
        )
    preds = predict(m, e)
    truth = labels.labels
    if subset is not None:
        idx = [int(i) for i in subset]
        if not idx:
            raise EmptyEvalSet("accuracy over an empty evaluation set")
        preds = preds[idx]
        truth = truth[idx]
    return float((preds == truth).mean())


def feature_trainer(cfg: TrainConfig) -> Trainer:
    """Trainer for the iterative core-set baseline: trains a fresh proxy on
    the labeled set and returns its hidden-layer features for all points."""

    def _trainer(e: EmbeddingMatrix, labels: LabelVector, labeled: Sequence[int]):
        model = train(e, labels, labeled, cfg)
        return extract_features(model, e)

    return _trainer


# --- gradient auditing --------------------------------------------------------

def gradient_check(cfg: TrainConfig, probe: tuple[np.ndarray, np.ndarray]) -> float:
    """Max guarded relative error between analytic gradients and central
    finite differences (step 1e-4) on a small probe.

    Entries below 1e-3 in magnitude are compared against that floor instead,
    which keeps finite-difference noise (~1e-8) out of the ratio without
    masking real errors.
    """
    x, y = probe
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    num_classes = int(y.max()) + 1
    params = _init_params(Rng(cfg.rng_seed), x.shape[1], cfg.hidden, num_classes, np.float64)
    _, grads = _loss_and_grads(params, x, y)

    step = 1e-4
    worst = 0.0
    for p, g in zip(params, grads):
        flat = p.reshape(-1)
        for k in range(flat.shape[0]):
            orig = flat[k]
            flat[k] = orig + step
            up = cross_entropy(_forward(params, x)[2], y)
            flat[k] = orig - step
            down = cross_entropy(_forward(params, x)[2], y)
            flat[k] = orig
            fd = (up - down) / (2.0 * step)
            a = g.reshape(-1)[k]
            err = abs(a - fd) / max(abs(a), abs(fd), 1e-3)
            worst = max(worst, err)
    return worst


def make_probe(
    cfg: TrainConfig, seed: int, n: int = 8, d: int = 4, num_classes: int = 3
) -> tuple[np.ndarray, np.ndarray]:
    """Random gradient-check probe, resampled (deterministically) until every
    hidden pre-activation under cfg's init sits at least 1e-2 from the ReLU
    kink, so central differences with step 1e-4 never straddle it."""
    attempt = seed
    while True:
        rng = Rng(attempt)
        x = np.asarray(rng.normals(n * d), dtype=np.float64).reshape(n, d)
        y = np.asarray([rng.below(num_classes) for _ in range(n)], dtype=np.int64)
        params = _init_params(Rng(cfg.rng_seed), d, cfg.hidden, num_classes, np.float64)
        z1 = _forward(params, x)[0]
        if np.abs(z1).min() > 1e-2:
            return x, y
        attempt += 1
