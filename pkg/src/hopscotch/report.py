"""Report output for the metrics path: JSON, delimited scores, and a
rendered figure saved next to them."""

from __future__ import annotations

import csv
import json
import os
import tempfile
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from .metrics import GRADE_BANDS, SCORE_NAMES, MetricReport


def atomic_write_text(path, text: str) -> Path:
    """Temp file + rename in the target directory, so interrupted runs
    never leave a truncated file."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def write_report(report: MetricReport, out_dir) -> dict:
    """Write report.json, report.csv and scores.png into out_dir."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    json_path = atomic_write_text(
        out_dir / "report.json", json.dumps(report.to_dict(), indent=2) + "\n"
    )

    csv_path = out_dir / "report.csv"
    fd, tmp = tempfile.mkstemp(dir=out_dir, prefix="report", suffix=".csv.tmp")
    with os.fdopen(fd, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["parameter", "score", "grade"])
        for name in SCORE_NAMES:
            writer.writerow([name, f"{report.scores[name]:.6f}", report.grades[name]])
    os.replace(tmp, csv_path)

    fig_path = out_dir / "scores.png"
    _plot_scores(report, fig_path)
    return {"json": json_path, "csv": csv_path, "figure": fig_path}


def _plot_scores(report: MetricReport, path: Path) -> None:
    labels = [n.replace("_", "\n") for n in SCORE_NAMES]
    values = [report.scores[n] for n in SCORE_NAMES]
    fig, ax = plt.subplots(figsize=(8, 4.5))
    bars = ax.bar(labels, values, color="#4878a8")
    for lo, letter in GRADE_BANDS:
        if lo > 0:
            ax.axhline(lo, color="0.7", linewidth=0.8, zorder=0)
        ax.text(len(labels) - 0.4, min(lo + 0.04, 0.96), letter,
                color="0.5", fontsize=9, va="center")
    for bar, name in zip(bars, SCORE_NAMES):
        ax.text(bar.get_x() + bar.get_width() / 2, bar.get_height() + 0.02,
                report.grades[name], ha="center", fontsize=10)
    ax.set_ylim(0, 1.05)
    ax.set_ylabel("score")
    ax.set_title("Session music parameters")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
