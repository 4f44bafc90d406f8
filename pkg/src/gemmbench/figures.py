"""Ready-made figures for sweep, counter, and profile outputs.

Every function takes the records a CLI command just emitted and writes one
PNG. Rendering is optional everywhere: the data paths never import this
module.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from gemmbench.profiler import SweepRecord, TrainingReport


def _variant_series(records, value):
    series = {}
    for rec in records:
        series.setdefault(rec.variant, []).append((rec.n, value(rec)))
    for points in series.values():
        points.sort()
    return series


def save_sweep_figure(records: list[SweepRecord], path) -> Path:
    """Throughput curves, one line per variant."""
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for variant, points in sorted(_variant_series(records, lambda r: r.gflops).items()):
        ax.plot([p[0] for p in points], [p[1] for p in points], marker="o", markersize=3, label=variant)
    backend = records[0].backend if records else ""
    ax.set_xlabel("matrix size n")
    ax.set_ylabel("GFLOPS")
    ax.set_title(f"square product throughput ({backend})")
    ax.grid(True, alpha=0.3)
    ax.legend()
    path = Path(path)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def save_counters_figure(rows: list[dict], path) -> Path:
    """Global load transactions against size, log scale, one line per variant."""
    series = {}
    for row in rows:
        series.setdefault(row["variant"], []).append((row["n"], row["global_loads"]))
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for variant, points in sorted(series.items()):
        points.sort()
        ax.plot([p[0] for p in points], [p[1] for p in points], marker="o", markersize=3, label=variant)
    ax.set_yscale("log")
    ax.set_xlabel("matrix size n")
    ax.set_ylabel("global load transactions")
    ax.set_title("global memory traffic per product")
    ax.grid(True, alpha=0.3, which="both")
    ax.legend()
    path = Path(path)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def save_profile_figure(reports: list[TrainingReport], path) -> Path:
    """Stacked copy/compute seconds per model, annotated with the copy share."""
    names = [r.model for r in reports]
    compute = [r.total_compute for r in reports]
    copy = [r.total_copy for r in reports]
    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.bar(names, compute, label="compute", color="#2a7fb8")
    ax.bar(names, copy, bottom=compute, label="copy", color="#e3903b")
    for i, rep in enumerate(reports):
        if rep.total_time > 0:
            ax.text(
                i,
                rep.total_time,
                f"{rep.copy_fraction * 100.0:.0f}% copy",
                ha="center",
                va="bottom",
                fontsize=8,
            )
    ax.set_ylabel("seconds per training step")
    ax.set_title("copy vs compute per training step")
    ax.legend()
    path = Path(path)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
