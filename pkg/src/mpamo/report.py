"""Figures for a benchmark results CSV.

Writes one PNG per map next to the delimited summary: success rate against
box density (one line per algorithm), and mean runtime / sum of costs over
commonly solved instances.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from mpamo.bench import read_rows, summarize, summary_to_csv  # noqa: E402

LABELS = {"cbs-moh": "CBS-MOH", "cbs-mol": "CBS-MOL", "pp-pamo": "PP-PAMO*"}
MARKERS = {"cbs-moh": "o", "cbs-mol": "s", "pp-pamo": "^"}


def _style(ax, xlabel, ylabel):
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.grid(True, alpha=0.3)
    for side in ("top", "right"):
        ax.spines[side].set_visible(False)


def render_report(csv_path, out_dir=None) -> list:
    """Write ``summary.csv`` and per-map figures; returns the written paths."""
    csv_path = Path(csv_path)
    out_dir = Path(out_dir) if out_dir else csv_path.parent
    out_dir.mkdir(parents=True, exist_ok=True)
    rows = read_rows(csv_path.read_text())
    summary = summarize(rows)
    written = []
    summary_path = out_dir / f"{csv_path.stem}_summary.csv"
    summary_path.write_text(summary_to_csv(summary))
    written.append(summary_path)

    maps = list(dict.fromkeys(s.map for s in summary))
    for name in maps:
        cells = [s for s in summary if s.map == name]
        agent_counts = sorted({s.agents for s in cells})
        fig, axes = plt.subplots(1, 3, figsize=(12, 3.6))
        for n in agent_counts:
            for algo in dict.fromkeys(s.algo for s in cells):
                pts = sorted((s.box_density, s) for s in cells if s.algo == algo and s.agents == n)
                if not pts:
                    continue
                xs = [100 * d for d, _ in pts]
                label = LABELS.get(algo, algo) + (f" ({n} agents)" if len(agent_counts) > 1 else "")
                mk = MARKERS.get(algo, "x")
                axes[0].plot(xs, [100 * s.success_rate for _, s in pts], marker=mk, label=label)
                common = [(x, s) for x, (_, s) in zip(xs, pts) if s.mean_runtime_ms is not None]
                if common:
                    axes[1].plot([x for x, _ in common], [s.mean_runtime_ms / 1000 for _, s in common],
                                 marker=mk, label=label)
                    axes[2].plot([x for x, _ in common], [s.mean_soc for _, s in common], marker=mk, label=label)
        _style(axes[0], "box density (%)", "success rate (%)")
        axes[0].set_ylim(-5, 105)
        _style(axes[1], "box density (%)", "runtime on common instances (s)")
        _style(axes[2], "box density (%)", "sum of costs on common instances")
        axes[0].legend(frameon=False, fontsize=8)
        fig.suptitle(name)
        fig.tight_layout()
        path = out_dir / f"{csv_path.stem}_{_slug(name)}.png"
        fig.savefig(path, dpi=120)
        plt.close(fig)
        written.append(path)
    return written


def _slug(name: str) -> str:
    return "".join(ch if ch.isalnum() or ch in "-_" else "_" for ch in name)
