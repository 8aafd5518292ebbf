"""Loss and logit mathematics: soft-label cross-entropy, the combined
adversarial objective with analytic gradients, label banning, logit
adjustment, and the sigmoid-MSE adaptation objective."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from emopack.errors import DataError

BAN_LOGIT = -1e27
DEFAULT_DOMAIN_WEIGHT = 0.01


@dataclass(frozen=True)
class LossConfig:
    """Weights and evaluation-time adjustment parameters."""

    w_d: float = DEFAULT_DOMAIN_WEIGHT
    tau: float = 1.0
    priors: np.ndarray | None = None
    allowed_mask: np.ndarray | None = None

    def __post_init__(self):
        if self.w_d < 0:
            raise DataError(f"domain loss weight must be >= 0, got {self.w_d}")
        if self.priors is not None:
            priors = np.asarray(self.priors, dtype=np.float64)
            if np.any(priors <= 0) or abs(priors.sum() - 1.0) > 1e-9:
                raise DataError("priors must be strictly positive and sum to 1")


@dataclass(frozen=True)
class LossReport:
    """Scalar losses plus analytic gradients with respect to the logits."""

    ce_emo: float
    ce_dom: float
    total: float
    grad_emo: np.ndarray
    grad_dom: np.ndarray


def softmax(z: np.ndarray) -> np.ndarray:
    z = np.asarray(z, dtype=np.float64)
    shifted = z - z.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=-1, keepdims=True)


def log_softmax(z: np.ndarray) -> np.ndarray:
    z = np.asarray(z, dtype=np.float64)
    shifted = z - z.max(axis=-1, keepdims=True)
    return shifted - np.log(np.exp(shifted).sum(axis=-1, keepdims=True))


def _normalize_targets(q: np.ndarray) -> np.ndarray:
    q = np.asarray(q, dtype=np.float64)
    total = q.sum()
    if not np.isfinite(total) or total <= 0:
        raise DataError("soft targets must have positive total mass")
    return q / total


def soft_cross_entropy(z: np.ndarray, q: np.ndarray) -> float:
    """-sum(q_hat * log softmax(z)) with q normalized to a simplex."""
    q_hat = _normalize_targets(q)
    if len(q_hat) != len(z):
        raise DataError(f"logits ({len(z)}) and targets ({len(q_hat)}) differ in length")
    return float(-(q_hat * log_softmax(z)).sum())


def one_hot(index: int, n: int) -> np.ndarray:
    if not (0 <= index < n):
        raise DataError(f"index {index} out of range for {n} classes")
    v = np.zeros(n, dtype=np.float64)
    v[index] = 1.0
    return v


def combined_loss(
    z_emo: np.ndarray,
    q_emo: np.ndarray,
    z_dom: np.ndarray,
    dom_id: int,
    cfg: LossConfig,
) -> LossReport:
    """total = CE_emo - w_d * CE_dom, with analytic logit gradients.

    The subtraction makes descent on the total perform gradient ascent on
    the domain loss, scaled by w_d.
    """
    q_dom = one_hot(dom_id, len(z_dom))
    ce_emo = soft_cross_entropy(z_emo, q_emo)
    ce_dom = soft_cross_entropy(z_dom, q_dom)
    grad_emo = softmax(z_emo) - _normalize_targets(q_emo)
    grad_dom = -cfg.w_d * (softmax(z_dom) - q_dom)
    return LossReport(
        ce_emo=ce_emo,
        ce_dom=ce_dom,
        total=ce_emo - cfg.w_d * ce_dom,
        grad_emo=grad_emo,
        grad_dom=grad_dom,
    )


def ban_labels(z: np.ndarray, allowed_mask: np.ndarray) -> np.ndarray:
    """Add -1e27 to the logits of classes a test corpus does not contain."""
    allowed = np.asarray(allowed_mask, dtype=bool)
    if allowed.shape != np.shape(z):
        raise DataError("allowed mask must match the logits in shape")
    if not allowed.any():
        raise DataError("cannot ban every class")
    out = np.asarray(z, dtype=np.float64).copy()
    out[~allowed] += BAN_LOGIT
    return out


def adjust_logits(z: np.ndarray, priors: np.ndarray, tau: float = 1.0) -> np.ndarray:
    """Long-tail correction: subtract tau * log(prior) per class."""
    priors = np.asarray(priors, dtype=np.float64)
    if np.any(priors <= 0):
        raise DataError("all class priors must be positive")
    return np.asarray(z, dtype=np.float64) - tau * np.log(priors)


def sigmoid(z: np.ndarray) -> np.ndarray:
    z = np.asarray(z, dtype=np.float64)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    e = np.exp(z[~pos])
    out[~pos] = e / (1.0 + e)
    return out


def sigmoid_mse(z: np.ndarray, targets: np.ndarray) -> float:
    """Mean over classes of (sigmoid(z) - target)^2; the adaptation objective."""
    targets = np.asarray(targets, dtype=np.float64)
    if np.shape(z) != targets.shape:
        raise DataError("logits and targets must have the same shape")
    return float(np.mean((sigmoid(z) - targets) ** 2))
