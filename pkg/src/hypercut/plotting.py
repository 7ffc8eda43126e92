"""Per-iteration figures and a CSV trace for a solver run."""
from __future__ import annotations

import csv
import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

TRACE_FIELDS = (
    "iteration", "alpha", "phi", "best_phi", "lambda2", "gamma",
    "bound", "lower_bound", "rho", "approx_ratio", "flow_solves",
)

STYLE = {
    "figure.figsize": (5.0, 3.2),
    "figure.dpi": 120,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "font.size": 9,
    "legend.fontsize": 8,
    "legend.frameon": False,
}


def write_trace_csv(rows: list[dict], path) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=TRACE_FIELDS, extrasaction="ignore")
        w.writeheader()
        for row in rows:
            w.writerow({k: row.get(k) for k in TRACE_FIELDS})
    return path


def _finite(xs):
    return [x if x is not None and math.isfinite(x) else float("nan") for x in xs]


def plot_trace(rows: list[dict], outdir, title: str | None = None) -> list[Path]:
    """Write ``bounds.png``, ``ratio.png`` and ``trace.csv`` into ``outdir``.

    ``rows`` are per-iteration dicts in input scale, as in the solver report.
    """
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    it = [r["iteration"] for r in rows]
    written = [write_trace_csv(rows, outdir / "trace.csv")]

    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        ax.plot(it, _finite([r["best_phi"] for r in rows]), "-o", ms=3, label="best expansion found")
        ax.plot(it, _finite([r["lower_bound"] for r in rows]), "-s", ms=3, label="certified lower bound")
        ax.set_xlabel("iteration")
        ax.set_ylabel("pi-expansion")
        ax.set_ylim(bottom=0)
        if title:
            ax.set_title(title)
        ax.legend()
        fig.tight_layout()
        fig.savefig(outdir / "bounds.png")
        plt.close(fig)
        written.append(outdir / "bounds.png")

        fig, ax = plt.subplots()
        ax.plot(it, _finite([r["approx_ratio"] for r in rows]), "-o", ms=3, label="best / lower bound")
        ax.plot(it, _finite([r["rho"] for r in rows]), "--", lw=1, label="rho_t (this iteration)")
        ax.set_xlabel("iteration")
        ax.set_ylabel("approximation ratio")
        ax.axhline(1.0, color="0.6", lw=0.8)
        ax.set_ylim(bottom=0.9)
        if title:
            ax.set_title(title)
        ax.legend()
        fig.tight_layout()
        fig.savefig(outdir / "ratio.png")
        plt.close(fig)
        written.append(outdir / "ratio.png")
    return written
