"""Flat-file outputs for a finished run: CSV, JSON, plot data, PNGs.

All numeric formatting is fixed-width so identical runs produce
identical bytes; floats use six (ratio) or three (microseconds)
decimal places throughout.
"""

from __future__ import annotations

import json
from pathlib import Path

from .pipeline import MetricsRow, RunResult

CSV_HEADER = (
    "step,m,mu_G,mu_H,matching,ratio,max_load,"
    "max_path_len,h_changes,us_per_update"
)

_SERIES = {
    "ratio": lambda row: f"{row.ratio:.6f}",
    "max_load": lambda row: str(row.max_load),
    "h_changes": lambda row: str(row.h_changes),
    "wall_time": lambda row: f"{row.us_per_update:.3f}",
}


def _csv_line(row: MetricsRow) -> str:
    return (
        f"{row.step},{row.m},{row.mu_g},{row.mu_h},{row.matching},"
        f"{row.ratio:.6f},{row.max_load},{row.max_path_len},"
        f"{row.h_changes},{row.us_per_update:.3f}"
    )


def write_metrics_csv(rows: list[MetricsRow], path) -> Path:
    path = Path(path)
    lines = [CSV_HEADER] + [_csv_line(row) for row in rows]
    path.write_text("\n".join(lines) + "\n", encoding="ascii")
    return path


def write_summary_json(summary: dict, path) -> Path:
    path = Path(path)
    text = json.dumps(summary, indent=2, sort_keys=True)
    path.write_text(text + "\n", encoding="ascii")
    return path


def emit_plot_data(rows: list[MetricsRow], out_dir) -> list[Path]:
    """Two-column (step, value) text files, one per series."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for name, pick in _SERIES.items():
        path = out_dir / f"{name}.dat"
        lines = [f"{row.step} {pick(row)}" for row in rows]
        path.write_text("\n".join(lines) + "\n", encoding="ascii")
        written.append(path)
    return written


def render_plots(rows: list[MetricsRow], out_dir) -> list[Path]:
    """Render one PNG per series next to the .dat files."""
    if not rows:
        return []
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    steps = [row.step for row in rows]
    series = {
        "ratio": ([row.ratio for row in rows], "mu(G) / |M|"),
        "max_load": ([row.max_load for row in rows], "max owner load"),
        "h_changes": (
            [row.h_changes for row in rows],
            "H changes at checkpointed step",
        ),
        "wall_time": (
            [row.us_per_update for row in rows],
            "microseconds per update",
        ),
    }
    written = []
    for name, (values, label) in series.items():
        fig, ax = plt.subplots(figsize=(6.0, 3.6))
        ax.plot(steps, values, lw=1.2)
        ax.set_xlabel("update step")
        ax.set_ylabel(label)
        ax.grid(True, alpha=0.3)
        fig.tight_layout()
        path = out_dir / f"{name}.png"
        fig.savefig(path, dpi=110)
        plt.close(fig)
        written.append(path)
    return written


def write_report(
    result: RunResult, out_dir, plots: bool = True
) -> dict[str, object]:
    """Write every artifact for a run; returns the path map."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths: dict[str, object] = {
        "metrics": write_metrics_csv(result.rows, out_dir / "metrics.csv"),
        "summary": write_summary_json(
            result.summary, out_dir / "summary.json"
        ),
        "series": emit_plot_data(result.rows, out_dir),
    }
    if plots:
        paths["plots"] = render_plots(result.rows, out_dir)
    return paths
