"""Figures written next to the JSON reports (PNG, non-interactive backend)."""

from __future__ import annotations

import re
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

plt.rcParams.update({
    "figure.dpi": 100,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "font.size": 9,
})


def _slug(text: str) -> str:
    return re.sub(r"[^A-Za-z0-9]+", "_", text).strip("_") or "column"


def _save(fig, path: Path) -> str:
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return str(path)


def column_figure(record: dict, outdir, prefix: str = "") -> str:
    """Dimension posterior (top 8) and row-label counts for one annotated column."""
    post = sorted(record["dimension_posterior"].items(), key=lambda kv: (-kv[1], kv[0]))[:8]
    counts: dict[str, int] = {}
    for row in record["rows"]:
        counts[row["label"]] = counts.get(row["label"], 0) + 1
    labels = sorted(counts, key=lambda k: (-counts[k], k))

    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 3.2))
    names = [k for k, _ in post][::-1]
    ax1.barh(names, [v for _, v in post][::-1], color="#4c72b0")
    ax1.set_xlim(0, 1)
    ax1.set_xlabel("posterior probability")
    ax1.set_title(f"dimension: {record['dimension']}")
    ax2.bar(range(len(labels)), [counts[k] for k in labels], color="#55a868")
    ax2.set_xticks(range(len(labels)))
    ax2.set_xticklabels(labels, rotation=30, ha="right")
    ax2.set_ylabel("rows")
    ax2.set_title(f"row labels (column unit: {record['column_unit']})")
    fig.suptitle(record["name"])
    return _save(fig, Path(outdir) / f"{prefix}{_slug(record['name'])}_annotation.png")


def canonical_figure(name: str, unit: str, values, outdir, prefix: str = "") -> str:
    vals = [v for v in values if v is not None]
    fig, ax = plt.subplots(figsize=(5, 3.2))
    if vals:
        ax.hist(vals, bins=min(30, max(5, len(vals) // 2)), color="#4c72b0")
    ax.set_xlabel(f"value ({unit})")
    ax.set_ylabel("rows")
    ax.set_title(f"{name}: {len(vals)} of {len(values)} rows canonical")
    return _save(fig, Path(outdir) / f"{prefix}{_slug(name)}_canonical.png")


def grouped_bars(groups: list[str], series: dict[str, list], title: str, ylabel: str,
                 path) -> str:
    """One bar group per entry of `groups`, one bar per series; None is drawn as 0."""
    n = max(len(series), 1)
    width = 0.8 / n
    fig, ax = plt.subplots(figsize=(max(5, 0.6 * len(groups) * n / 2 + 3), 3.6))
    for i, (name, vals) in enumerate(series.items()):
        xs = [g + (i - (n - 1) / 2) * width for g in range(len(groups))]
        ax.bar(xs, [0 if v is None else v for v in vals], width, label=name)
    ax.set_xticks(range(len(groups)))
    ax.set_xticklabels(groups, rotation=30, ha="right")
    ax.set_ylim(0, 1.05)
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    if len(series) > 1:
        ax.legend(fontsize=7, ncol=min(n, 3))
    return _save(fig, Path(path))
