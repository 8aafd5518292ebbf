"""Evaluation metrics: micro F1, per-class F1, mean Pearson correlation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from emopack.errors import DataError
from emopack.losses import adjust_logits, ban_labels


@dataclass(frozen=True)
class PredictionSet:
    """Paired predicted and reference class indices."""

    predictions: np.ndarray
    references: np.ndarray
    n_classes: int

    def __post_init__(self):
        if len(self.predictions) != len(self.references):
            raise DataError("predictions and references must have equal length")
        if len(self.predictions) == 0:
            raise DataError("prediction set is empty")
        for arr in (self.predictions, self.references):
            if np.any(arr < 0) or np.any(arr >= self.n_classes):
                raise DataError("class index out of range")


def confusion_counts(p: PredictionSet) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-class (TP, FP, FN) from pooled counts."""
    tp = np.zeros(p.n_classes, dtype=np.int64)
    fp = np.zeros(p.n_classes, dtype=np.int64)
    fn = np.zeros(p.n_classes, dtype=np.int64)
    for pred, ref in zip(p.predictions, p.references):
        if pred == ref:
            tp[pred] += 1
        else:
            fp[pred] += 1
            fn[ref] += 1
    return tp, fp, fn


def micro_f1(p: PredictionSet) -> float:
    """Micro-averaged F1 over globally pooled counts.

    For single-label multi-class data this equals plain accuracy.
    """
    tp, fp, fn = confusion_counts(p)
    denom = 2 * tp.sum() + fp.sum() + fn.sum()
    if denom == 0:
        return 0.0
    return float(2 * tp.sum() / denom)


def per_class_f1(p: PredictionSet) -> dict[int, float]:
    """F1 per class; classes never predicted and never true are absent."""
    tp, fp, fn = confusion_counts(p)
    out: dict[int, float] = {}
    for c in range(p.n_classes):
        support = 2 * tp[c] + fp[c] + fn[c]
        if support == 0:
            continue
        out[c] = float(2 * tp[c] / support)
    return out


def mean_pearson(scores: np.ndarray, targets: np.ndarray) -> float:
    """Pearson r per class column, then the arithmetic mean over classes."""
    scores = np.asarray(scores, dtype=np.float64)
    targets = np.asarray(targets, dtype=np.float64)
    if scores.shape != targets.shape:
        raise DataError("scores and targets must have the same shape")
    if scores.shape[0] < 2:
        raise DataError("need at least 2 samples for a correlation")
    sc = scores - scores.mean(axis=0)
    tc = targets - targets.mean(axis=0)
    s_var = (sc**2).sum(axis=0)
    t_var = (tc**2).sum(axis=0)
    # relative floor so constant columns register as zero despite fp dust
    s_floor = 1e-24 * (1.0 + np.abs(scores.mean(axis=0))) ** 2
    t_floor = 1e-24 * (1.0 + np.abs(targets.mean(axis=0))) ** 2
    if np.any(t_var <= t_floor) or np.any(s_var <= s_floor):
        raise DataError("zero-variance column; correlation undefined")
    r = (sc * tc).sum(axis=0) / np.sqrt(s_var * t_var)
    return float(r.mean())


def predict_labels(
    logits: np.ndarray,
    allowed_mask: np.ndarray | None = None,
    priors: np.ndarray | None = None,
    tau: float = 1.0,
) -> np.ndarray:
    """Evaluation protocol: ban disallowed classes, adjust by priors, argmax."""
    z = np.asarray(logits, dtype=np.float64)
    if z.ndim == 1:
        z = z[None, :]
    out = np.empty(len(z), dtype=np.int64)
    for i, row in enumerate(z):
        if allowed_mask is not None:
            row = ban_labels(row, allowed_mask)
        if priors is not None:
            row = adjust_logits(row, priors, tau)
        out[i] = int(np.argmax(row))
    return out


def argmax_reference(soft_targets: np.ndarray) -> np.ndarray:
    """Hard reference labels from soft distributions; ties pick the lowest index."""
    t = np.asarray(soft_targets, dtype=np.float64)
    if t.ndim == 1:
        t = t[None, :]
    return t.argmax(axis=1)
