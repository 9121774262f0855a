"""Figures for reports, rendered off-screen to PNG files."""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

STATUS_COLORS = {"pass": "#3a7d44", "fail": "#c0392b", "skipped": "#9e9e9e"}


def _save(fig, path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)
    return path


def level_counts_figure(counts: Sequence[int], p: int, path: Path, title: str = "") -> Path:
    """Bar chart of #{x : f(x) = j} for j in F_p."""
    fig, ax = plt.subplots(figsize=(5, 3))
    ax.bar(range(p), counts, color="#4a6fa5")
    ax.axhline(sum(counts) / p, color="k", lw=0.8, ls="--", label="uniform")
    ax.set_xticks(range(p))
    ax.set_xlabel("value j")
    ax.set_ylabel("count")
    ax.set_title(title or "level counts")
    ax.legend(frameon=False)
    return _save(fig, path)


def rep_counts_figure(counts: np.ndarray, b: int, path: Path) -> Path:
    """Histogram of the representation counts r_b(t) over all t."""
    vals = np.asarray([int(c) for c in counts], dtype=np.float64)
    fig, ax = plt.subplots(figsize=(5, 3))
    ax.hist(vals, bins=min(40, max(5, len(np.unique(vals)))), color="#6a994e")
    ax.set_xlabel(f"r_{b}(t)")
    ax.set_ylabel("number of t")
    ax.set_title(f"representations in {b}E - {b}E")
    return _save(fig, path)


def deviation_figure(deviations: Sequence[float], bound: float, path: Path) -> Path:
    """Histogram of affine-counting deviations against the bound."""
    fig, ax = plt.subplots(figsize=(5, 3))
    ax.hist(deviations, bins=30, color="#4a6fa5")
    ax.axvline(bound, color="#c0392b", lw=1.2, label=f"bound {bound:.3g}")
    ax.set_xlabel("deviation")
    ax.set_ylabel("affine hyperplanes")
    ax.legend(frameon=False)
    return _save(fig, path)


def summary_figure(checks: Sequence[dict], path: Path) -> Path:
    """One bar per check: elapsed seconds, colored by status."""
    names = [
        f"[{c['params']['criterion']}] {c['name']}" if "criterion" in c["params"] else c["name"] for c in checks
    ]
    times = [c.get("timing", {}).get("elapsed_s", 0.0) for c in checks]
    colors = [STATUS_COLORS.get(c["status"], "#9e9e9e") for c in checks]
    fig, ax = plt.subplots(figsize=(6, 0.4 * len(checks) + 1.2))
    ax.barh(range(len(checks)), times, color=colors)
    ax.set_yticks(range(len(checks)))
    ax.set_yticklabels(names)
    ax.invert_yaxis()
    ax.set_xlabel("seconds")
    ax.set_title("checks (green pass, red fail)")
    return _save(fig, path)


def render_figures(doc: dict, reports, outdir: str | Path) -> list[Path]:
    """Every figure that applies to this report, written into ``outdir``."""
    outdir = Path(outdir)
    paths = []
    if doc["checks"]:
        paths.append(summary_figure(doc["checks"], outdir / "summary.png"))
    for i, r in enumerate(reports):
        series = getattr(r, "series", None) or {}
        stem = f"{i:02d}-{r.name}"
        if "deviations" in series:
            paths.append(deviation_figure(series["deviations"], series["bound"], outdir / f"{stem}-deviations.png"))
        if "level_counts" in series:
            paths.append(level_counts_figure(series["level_counts"], series["p"], outdir / f"{stem}-levels.png"))
        if "rep_counts" in series:
            paths.append(rep_counts_figure(series["rep_counts"], series["b"], outdir / f"{stem}-reps.png"))
    return paths
