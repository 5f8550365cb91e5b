# charts.py
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import matplotlib as mpl

mpl.use("Agg")
mpl.rcParams.update({"svg.hashsalt": "modfleet", "svg.fonttype": "none"})

import matplotlib.pyplot as plt  # noqa: E402
import pandas as pd  # noqa: E402

from runtime.tracer import LogColors  # noqa: E402

from .plan import MODE_ORDER, TOPOLOGY_ORDER  # noqa: E402

Series = Tuple[List[float], List[float], List[float]]

AXIS_LABELS = {
    "penalty_window_y": "Penalty window y (min)",
    "flexibility_alpha": "Flexibility ratio alpha",
}


def chart_series(summary: pd.DataFrame) -> Dict[str, Series]:
    """x, mean F and stderr per topology/mode series, in plotting order."""
    series: Dict[str, Series] = {}
    for topology in TOPOLOGY_ORDER:
        for mode in MODE_ORDER:
            part = summary[
                (summary["topology"] == topology.value) & (summary["fleet_mode"] == mode.value)
            ].sort_values("sweep_value")
            if part.empty:
                continue
            series[f"{topology.value}/{mode.value}"] = (
                part["sweep_value"].tolist(),
                part["mean_F"].tolist(),
                part["stderr_F"].tolist(),
            )
    return series


def render_charts(
    summary: pd.DataFrame, path: Path, title: str, sweep: str = "penalty_window_y"
) -> Optional[Path]:
    """One SVG line chart of mean F against the sweep value with stderr bars."""
    if summary is None or summary.empty:
        print(f"{LogColors.WARNING}(Charts) Nothing to plot for {title}; no chart written")
        return None

    fig, ax = plt.subplots(figsize=(7, 4.5))
    for label, (x, y, err) in chart_series(summary).items():
        linestyle = "--" if label.endswith("/fixed") else "-"
        ax.errorbar(x, y, yerr=err, label=label, linestyle=linestyle, marker="o", capsize=3)
    ax.set_xscale("symlog", linthresh=1.0)
    ax.set_xlabel(AXIS_LABELS.get(sweep, sweep))
    ax.set_ylabel("Cost function F")
    ax.set_title(title)
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize="small", ncol=2)
    fig.tight_layout()

    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return path
