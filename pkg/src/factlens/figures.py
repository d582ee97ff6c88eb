"""Matplotlib figure rendering for reports and evaluation sweeps."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402 - backend must be pinned first

from .model import Bucket, CredibilityReport, assign_bucket
from .evaluation import EvalResult

_BUCKET_COLORS = {
    Bucket.LOW: "#c0392b",
    Bucket.MEDIUM: "#e67e22",
    Bucket.HIGH: "#27ae60",
}
_ABSENT_COLOR = "#95a5a6"


def save_sentence_scores(report: CredibilityReport, path: str | Path) -> Path:
    """Bar chart of per-sentence credibility, colored by bucket."""
    path = Path(path)
    indices = [s.index for s in sorted(report.sentences, key=lambda s: s.index)]
    heights = []
    colors = []
    for index in indices:
        score = report.sentence_scores.get(index)
        if score is None:
            heights.append(0.0)
            colors.append(_ABSENT_COLOR)
        else:
            heights.append(float(score))
            colors.append(_BUCKET_COLORS[assign_bucket(score)])
    fig, ax = plt.subplots(figsize=(max(4, 0.8 * len(indices) + 2), 3.2))
    ax.bar([str(i) for i in indices], heights, color=colors)
    ax.set_ylim(0, 1)
    ax.set_xlabel("sentence")
    ax.set_ylabel("credibility")
    if report.overall_score is not None:
        ax.axhline(float(report.overall_score), color="#2c3e50", linewidth=1, linestyle="--")
        ax.set_title(f"document score {float(report.overall_score):.4f}")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def save_sweep_f1(result: EvalResult, path: str | Path) -> Path:
    """Grouped bar chart of F1 per sweep setting and subset."""
    path = Path(path)
    rows = list(result.rows)
    subset_names = sorted({name for row in rows for name in row.subsets if name != "overall"})
    if not subset_names:
        subset_names = ["overall"]
    labels = [f"Ev {row.top_n_results}, Ctxt {row.context_window_m}" for row in rows]
    width = 0.8 / len(subset_names)
    fig, ax = plt.subplots(figsize=(max(5, 1.4 * len(rows) + 2), 3.4))
    for offset, subset in enumerate(subset_names):
        xs = [i + offset * width for i in range(len(rows))]
        ys = [float(row.subsets[subset].f1) if subset in row.subsets else 0.0 for row in rows]
        ax.bar(xs, ys, width=width, label=subset)
    ax.set_xticks([i + width * (len(subset_names) - 1) / 2 for i in range(len(rows))])
    ax.set_xticklabels(labels, rotation=15, ha="right")
    ax.set_ylim(0, 1)
    ax.set_ylabel("binary F1")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
