"""Figure rendering for pipeline, evaluation, and toy-training reports.

Every report path writes its figures next to the delimited output files.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from emopack.corpus import EMOTIONS


def plot_pipeline_report(report: dict, out_dir: str | Path) -> list[Path]:
    """Duration histogram, per-dataset intensity, and augmentation rates."""
    out_dir = Path(out_dir)
    written: list[Path] = []

    durations = report.get("sequence_durations_s") or []
    if durations:
        fig, ax = plt.subplots(figsize=(6, 4))
        ax.hist(durations, bins=20, color="#4878d0", edgecolor="black")
        ax.set_xlabel("packed sequence duration (s)")
        ax.set_ylabel("count")
        ax.set_title("Packed sequence durations")
        path = out_dir / "sequence_durations.png"
        fig.tight_layout()
        fig.savefig(path, dpi=120)
        plt.close(fig)
        written.append(path)

    means = report.get("dataset_mean_intensity") or {}
    if means:
        fig, ax = plt.subplots(figsize=(6, 4))
        names = list(means)
        ax.bar(names, [means[k] for k in names], color="#6acc64", edgecolor="black")
        ax.set_ylabel("mean emotional intensity")
        ax.set_title("Per-dataset mean intensity")
        ax.tick_params(axis="x", rotation=45)
        path = out_dir / "dataset_intensity.png"
        fig.tight_layout()
        fig.savefig(path, dpi=120)
        plt.close(fig)
        written.append(path)

    rates = report.get("augment_firing_rate") or {}
    if rates:
        fig, ax = plt.subplots(figsize=(6, 4))
        names = list(rates)
        ax.bar(names, [rates[k] for k in names], color="#d65f5f", edgecolor="black")
        ax.axhline(0.2, color="black", linestyle="--", linewidth=1, label="configured 0.2")
        ax.set_ylabel("empirical firing rate")
        ax.set_title("Augmentation firing rates")
        ax.tick_params(axis="x", rotation=45)
        ax.legend()
        path = out_dir / "augment_rates.png"
        fig.tight_layout()
        fig.savefig(path, dpi=120)
        plt.close(fig)
        written.append(path)

    return written


def plot_metric_report(metrics: dict, out_path: str | Path) -> Path:
    """Per-class F1 bars with the micro F1 reference line."""
    per_class = metrics.get("per_class") or {}
    fig, ax = plt.subplots(figsize=(7, 4))
    names = [name for name in EMOTIONS if name in per_class]
    values = [per_class[name] for name in names]
    ax.bar(names, values, color="#4878d0", edgecolor="black")
    if "micro_f1" in metrics:
        ax.axhline(metrics["micro_f1"], color="black", linestyle="--", linewidth=1,
                   label=f"micro F1 = {metrics['micro_f1']:.3f}")
        ax.legend()
    ax.set_ylim(0, 1)
    ax.set_ylabel("F1")
    ax.set_title("Per-class F1")
    ax.tick_params(axis="x", rotation=45)
    fig.tight_layout()
    fig.savefig(out_path, dpi=120)
    plt.close(fig)
    return Path(out_path)


def plot_train_trace(trace: dict[str, list[float]], out_path: str | Path) -> Path:
    """Accuracy and loss curves for the adversarial toy run."""
    epochs = np.arange(1, len(trace["emo_acc"]) + 1)
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4))
    ax1.plot(epochs, trace["emo_acc"], label="emotion accuracy")
    ax1.plot(epochs, trace["dom_acc"], label="domain head accuracy")
    ax1.set_xlabel("epoch")
    ax1.set_ylabel("accuracy")
    ax1.set_ylim(0, 1.05)
    ax1.legend()
    ax2.plot(epochs, trace["ce_emo"], label="emotion CE")
    ax2.plot(epochs, trace["ce_dom"], label="domain CE")
    ax2.plot(epochs, trace["total"], label="total")
    ax2.set_xlabel("epoch")
    ax2.set_ylabel("loss")
    ax2.legend()
    fig.tight_layout()
    fig.savefig(out_path, dpi=120)
    plt.close(fig)
    return Path(out_path)
