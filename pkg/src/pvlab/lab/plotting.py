"""Log–log decay charts drawn from an experiment's CSV text (never from live data)."""

from __future__ import annotations

from collections import defaultdict
from pathlib import Path

import matplotlib
from matplotlib.figure import Figure

from pvlab.lab.output import parse_params, read_rows

# fixed salt so repeated renders produce identical SVG ids
matplotlib.rcParams["svg.hashsalt"] = "pvlab"
matplotlib.rcParams["svg.fonttype"] = "none"


def decay_series(csv_text: str, x_key: str = "N") -> dict[str, list[tuple[float, float]]]:
    """Group rows by (metric, other params) into curves of (x, value), positive values only."""
    series: dict[str, list[tuple[float, float]]] = defaultdict(list)
    for row in read_rows(csv_text):
        params = parse_params(row["params"])
        if x_key not in params:
            continue
        x = float(params.pop(x_key))
        y = float(row["value"])
        if x <= 0 or not y > 0:
            continue
        label = row["metric"] + "".join(f" {k}={v}" for k, v in params.items())
        series[label].append((x, y))
    return {k: sorted(v) for k, v in series.items() if len(v) >= 2}


def plot_decay(csv_text: str, path, title: str = "", x_key: str = "N", max_series: int = 12) -> bool:
    """Write an SVG to ``path``; returns False (and writes nothing) if no curve has two points."""
    series = decay_series(csv_text, x_key)
    if not series:
        return False
    fig = Figure(figsize=(6.4, 4.4))
    ax = fig.add_subplot(1, 1, 1)
    for label, pts in list(series.items())[:max_series]:
        xs, ys = zip(*pts)
        ax.loglog(xs, ys, marker="o", ms=3, lw=1.2, label=label)
    ax.set_xlabel(x_key)
    ax.set_ylabel("value")
    if title:
        ax.set_title(title)
    ax.grid(True, which="both", lw=0.3, alpha=0.5)
    ax.legend(fontsize=6, frameon=False)
    fig.tight_layout()
    fig.savefig(Path(path), format="svg", metadata={"Date": None})
    return True
