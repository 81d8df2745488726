"""Figure rendering for the experiment commands. Every report lands as a
PNG next to the corresponding CSV."""

from __future__ import annotations

from collections import defaultdict
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from . import metrics  # noqa: E402
from .experiments import SweepPoint  # noqa: E402


def _series(points: list[SweepPoint], metric: str):
    pts = sorted((p.value, p.mean, p.ci95) for p in points if p.metric == metric)
    xs = [p[0] for p in pts]
    ys = [p[1] for p in pts]
    errs = [p[2] for p in pts]
    return xs, ys, errs


def _save(fig, path: Path) -> Path:
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def plot_node_sweep(points: list[SweepPoint], out_dir: Path) -> list[Path]:
    written = []
    fig, ax = plt.subplots(figsize=(5, 3.2))
    xs, ys, errs = _series(points, "mean_throughput")
    ax.errorbar(xs, ys, yerr=errs, marker="o", capsize=3)
    ax.set_xlabel("secondary nodes")
    ax.set_ylabel("throughput (data slots / frame)")
    ax.set_xticks(xs)
    ax.grid(True, alpha=0.4)
    written.append(_save(fig, out_dir / "throughput_vs_nodes.png"))

    fig, ax = plt.subplots(figsize=(5, 3.2))
    xs, ys, errs = _series(points, "jain_index")
    ax.errorbar(xs, ys, yerr=errs, marker="s", color="tab:green", capsize=3)
    ax.set_xlabel("secondary nodes")
    ax.set_ylabel("Jain fairness index")
    ax.set_ylim(0, 1.05)
    ax.set_xticks(xs)
    ax.grid(True, alpha=0.4)
    written.append(_save(fig, out_dir / "fairness_vs_nodes.png"))
    return written


def plot_sensing_sweep(points: list[SweepPoint], out_dir: Path) -> list[Path]:
    fig, ax = plt.subplots(figsize=(5, 3.2))
    xs, ys, errs = _series(points, "fused_accuracy")
    ax.errorbar(xs, ys, yerr=errs, marker="^", color="tab:red", capsize=3)
    ax.set_xlabel("cooperating secondary nodes")
    ax.set_ylabel("fused sensing accuracy")
    ax.set_ylim(0, 1.05)
    ax.set_xticks(xs)
    ax.grid(True, alpha=0.4)
    return [_save(fig, out_dir / "accuracy_vs_nodes.png")]


def plot_run(log: metrics.MetricsLog, out_dir: Path) -> list[Path]:
    """Per-node granted slots over time for a single run."""
    by_node = defaultdict(list)
    for r in sorted(log.records, key=lambda r: (r.node, r.frame)):
        by_node[r.node].append((r.frame, r.granted_slots))
    fig, ax = plt.subplots(figsize=(6, 3.2))
    for node, series in sorted(by_node.items()):
        ax.step([f for f, _ in series], [g for _, g in series],
                where="post", label=f"sn{node}")
    ax.set_xlabel("super-frame")
    ax.set_ylabel("granted data slots")
    ax.legend(loc="best", fontsize=8)
    ax.grid(True, alpha=0.4)
    return [_save(fig, out_dir / "grants_timeline.png")]
