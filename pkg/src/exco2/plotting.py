"""Figures for search and construction reports (Agg backend, files only)."""

from __future__ import annotations

import csv
from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

STYLE = {"figure.figsize": (5.0, 3.4), "font.size": 9, "axes.spines.top": False, "axes.spines.right": False}


def write_tsv(path, header: Sequence[str], rows: Sequence[Sequence]) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, delimiter="\t", lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
    return path


def _save(fig, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def plot_series(ns: Sequence[int], values: Sequence[float], path, label: str = "",
                limit: float | None = None, ylabel: str = "normalised co2", title: str = "") -> Path:
    """Normalised values against n, optionally with a horizontal reference line."""
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        ax.plot(ns, values, "o-", ms=3, lw=1, label=label or None)
        if limit is not None:
            ax.axhline(limit, color="0.4", ls="--", lw=0.8, label=f"{limit:.4f}")
        ax.set_xlabel("n")
        ax.set_ylabel(ylabel)
        if title:
            ax.set_title(title)
        if label or limit is not None:
            ax.legend(frameon=False)
        return _save(fig, path)


def plot_ranking(labels: Sequence[str], values: Sequence[int], path, highlight: int | None = 0,
                 title: str = "") -> Path:
    """Horizontal bars, best first; the highlighted bar is drawn dark."""
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(5.0, 0.4 * len(labels) + 1.2))
        colors = ["0.2" if i == highlight else "0.7" for i in range(len(labels))]
        ax.barh(range(len(labels)), values, color=colors)
        ax.set_yticks(range(len(labels)))
        ax.set_yticklabels(labels)
        ax.invert_yaxis()
        lo, hi = min(values), max(values)
        pad = (hi - lo) * 0.5 or max(abs(hi), 1) * 0.01
        ax.set_xlim(lo - pad, hi + pad * 0.2)
        ax.set_xlabel("co2")
        if title:
            ax.set_title(title)
        return _save(fig, path)
