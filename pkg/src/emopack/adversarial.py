"""Desk-scale demonstration of the adversarial domain objective.

A linear trunk feeds a linear emotion head and a linear domain head. The
heads descend on their own cross-entropies; the trunk descends on
total = CE_emo - w_d * CE_dom, i.e. it receives the negated, w_d-scaled
domain gradient and so performs gradient ascent on the domain loss.

Two stabilizers keep the full-batch minimax out of its limit cycle so the
w_d = 0.01 pressure can actually drain the domain signal: the heads carry
a small L2 penalty (finite margins mean the domain branch never stops
emitting gradient), and the domain head takes a few descent steps per
trunk step so it tracks the moving representation. The trunk update
itself is exactly the reversed, w_d-scaled domain-CE gradient.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from emopack.errors import DataError
from emopack.losses import softmax
from emopack.rng import derive_rng


@dataclass(frozen=True)
class ToyConfig:
    w_d: float = 0.01
    lr: float = 0.5
    epochs: int = 2000
    shared_dim: int = 6
    head_steps: int = 5
    head_decay: float = 0.01

    def __post_init__(self):
        if self.epochs < 1 or self.shared_dim < 1 or self.head_steps < 1:
            raise DataError("epochs, shared_dim, and head_steps must be >= 1")


@dataclass
class TrainTrace:
    emo_acc: list[float] = field(default_factory=list)
    dom_acc: list[float] = field(default_factory=list)
    ce_emo: list[float] = field(default_factory=list)
    ce_dom: list[float] = field(default_factory=list)
    total: list[float] = field(default_factory=list)


@dataclass
class ToyModel:
    """Linear trunk plus the two linear heads."""

    trunk_w: np.ndarray
    trunk_b: np.ndarray
    emo_w: np.ndarray
    emo_b: np.ndarray
    dom_w: np.ndarray
    dom_b: np.ndarray

    def features(self, x: np.ndarray) -> np.ndarray:
        return x @ self.trunk_w.T + self.trunk_b

    def emotion_logits(self, x: np.ndarray) -> np.ndarray:
        return self.features(x) @ self.emo_w.T + self.emo_b

    def domain_logits(self, x: np.ndarray) -> np.ndarray:
        return self.features(x) @ self.dom_w.T + self.dom_b


N_TOY_EMOTIONS = 4
N_TOY_DOMAINS = 4
EMOTION_AMPLITUDE = 2.0
EMOTION_NOISE = 0.25
DOMAIN_STEP = 1.2
DOMAIN_NOISE = 0.25
TRUNK_INIT_STD = 0.8


def make_synthetic_dataset(
    n: int, seed: int, n_emotions: int = N_TOY_EMOTIONS, n_domains: int = N_TOY_DOMAINS
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Emotion one-hot clusters in one subspace, domain levels in another.

    The emotion part is linearly separable; the domain is a single ordinal
    level dimension a trunk column can attenuate. Labels are independent.
    """
    if n < 100:
        raise DataError(f"synthetic dataset needs n >= 100, got {n}")
    rng = derive_rng(seed, "toy-data")
    emo = rng.integers(0, n_emotions, n)
    dom = rng.integers(0, n_domains, n)
    x = np.zeros((n, n_emotions + 1))
    x[np.arange(n), emo] = EMOTION_AMPLITUDE
    x[:, :n_emotions] += rng.normal(0.0, EMOTION_NOISE, (n, n_emotions))
    levels = (dom - (n_domains - 1) / 2.0) * DOMAIN_STEP
    x[:, n_emotions] = levels + rng.normal(0.0, DOMAIN_NOISE, n)
    return x, emo, dom


def _accuracy(logits: np.ndarray, labels: np.ndarray) -> float:
    return float((logits.argmax(axis=1) == labels).mean())


def _mean_ce(logits: np.ndarray, labels: np.ndarray) -> float:
    p = softmax(logits)
    return float(-np.log(p[np.arange(len(labels)), labels] + 1e-300).mean())


def train_adversarial(
    x: np.ndarray, emo: np.ndarray, dom: np.ndarray, cfg: ToyConfig, seed: int = 0
) -> tuple[ToyModel, TrainTrace]:
    """Full-batch GD on the combined objective; trace recorded per epoch."""
    n, n_features = x.shape
    n_emo = int(emo.max()) + 1
    n_dom = int(dom.max()) + 1
    rng = derive_rng(seed, "toy-init")
    model = ToyModel(
        trunk_w=rng.normal(0.0, TRUNK_INIT_STD, (cfg.shared_dim, n_features)),
        trunk_b=np.zeros(cfg.shared_dim),
        emo_w=rng.normal(0.0, 0.1, (n_emo, cfg.shared_dim)),
        emo_b=np.zeros(n_emo),
        dom_w=rng.normal(0.0, 0.1, (n_dom, cfg.shared_dim)),
        dom_b=np.zeros(n_dom),
    )
    y_emo = np.eye(n_emo)[emo]
    y_dom = np.eye(n_dom)[dom]
    trace = TrainTrace()
    for epoch in range(cfg.epochs):
        h = model.features(x)
        # the domain head catches up on the current representation
        for _ in range(cfg.head_steps):
            p_dom = softmax(h @ model.dom_w.T + model.dom_b)
            g_dom = (p_dom - y_dom) / n
            model.dom_w -= cfg.lr * (g_dom.T @ h + cfg.head_decay * model.dom_w)
            model.dom_b -= cfg.lr * g_dom.sum(axis=0)
        z_emo = h @ model.emo_w.T + model.emo_b
        z_dom = h @ model.dom_w.T + model.dom_b
        p_emo = softmax(z_emo)
        p_dom = softmax(z_dom)
        g_emo = (p_emo - y_emo) / n
        g_dom = (p_dom - y_dom) / n
        # trunk: descend on CE_emo, ascend (scaled by w_d) on CE_dom
        grad_h = g_emo @ model.emo_w - cfg.w_d * (g_dom @ model.dom_w)
        model.emo_w -= cfg.lr * (g_emo.T @ h + cfg.head_decay * model.emo_w)
        model.emo_b -= cfg.lr * g_emo.sum(axis=0)
        model.trunk_w -= cfg.lr * (grad_h.T @ x)
        model.trunk_b -= cfg.lr * grad_h.sum(axis=0)

        ce_emo = _mean_ce(z_emo, emo)
        ce_dom = _mean_ce(z_dom, dom)
        if not (np.isfinite(ce_emo) and np.isfinite(ce_dom)):
            raise DataError(f"training diverged at epoch {epoch + 1}")
        trace.emo_acc.append(_accuracy(z_emo, emo))
        trace.dom_acc.append(_accuracy(z_dom, dom))
        trace.ce_emo.append(ce_emo)
        trace.ce_dom.append(ce_dom)
        trace.total.append(ce_emo - cfg.w_d * ce_dom)
    return model, trace


def linear_probe(features: np.ndarray, labels: np.ndarray, seed: int = 0,
                 epochs: int = 1500, lr: float = 1.0) -> float:
    """Held-out accuracy of a fresh multinomial logistic probe.

    Trains on a random half of the data (standardized) and reports
    accuracy on the other half, so weak residual signal scores at chance.
    """
    n = len(labels)
    order = derive_rng(seed, "probe-split").permutation(n)
    train_idx, test_idx = order[: n // 2], order[n // 2 :]
    mean = features[train_idx].mean(axis=0)
    std = features[train_idx].std(axis=0) + 1e-12
    h_train = (features[train_idx] - mean) / std
    h_test = (features[test_idx] - mean) / std
    n_classes = int(labels.max()) + 1
    weights = np.zeros((n_classes, features.shape[1]))
    bias = np.zeros(n_classes)
    targets = np.eye(n_classes)[labels[train_idx]]
    m = len(train_idx)
    for _ in range(epochs):
        p = softmax(h_train @ weights.T + bias)
        g = (p - targets) / m
        weights -= lr * (g.T @ h_train)
        bias -= lr * g.sum(axis=0)
    predictions = (h_test @ weights.T + bias).argmax(axis=1)
    return float((predictions == labels[test_idx]).mean())


@dataclass(frozen=True)
class ToyResult:
    emotion_accuracy: float
    domain_probe_accuracy: float
    chance: float
    trace: TrainTrace
    model: ToyModel


def run_toy_experiment(n: int = 1000, seed: int = 0, cfg: ToyConfig | None = None) -> ToyResult:
    """Train one adversarial run and probe the trunk for domain information."""
    cfg = cfg or ToyConfig()
    x, emo, dom = make_synthetic_dataset(n, seed)
    model, trace = train_adversarial(x, emo, dom, cfg, seed=seed)
    probe_acc = linear_probe(model.features(x), dom, seed=seed)
    return ToyResult(
        emotion_accuracy=trace.emo_acc[-1],
        domain_probe_accuracy=probe_acc,
        chance=1.0 / (int(dom.max()) + 1),
        trace=trace,
        model=model,
    )
