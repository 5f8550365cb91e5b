# summary.py
from dataclasses import asdict
from pathlib import Path
from typing import Iterable, Union

import numpy as np
import pandas as pd

from MFMP.errors import InvalidArgumentError

from .plan import MODE_ORDER, TOPOLOGY_ORDER
from .runner import ResultRow

SUMMARY_COLUMNS = [
    "topology",
    "fleet_mode",
    "sweep_value",
    "mean_F",
    "stderr_F",
    "n",
    "mean_diversity",
    "mean_lane",
    "modular_fixed_ratio",
]


def rows_frame(rows: Union[pd.DataFrame, Iterable[ResultRow]]) -> pd.DataFrame:
    """Successful rows as a frame with a numeric sweep value."""
    if isinstance(rows, pd.DataFrame):
        frame = rows.copy()
    else:
        frame = pd.DataFrame([asdict(r) for r in rows])
    if frame.empty:
        return frame
    if "error" in frame.columns:
        frame = frame[frame["error"].fillna("") == ""]
    return frame.assign(
        sweep_value=frame["sweep_value"].astype(float),
        F=pd.to_numeric(frame["F"]),
        diversity=pd.to_numeric(frame["diversity"]),
        lane=pd.to_numeric(frame["lane"]),
    )


def _stderr(values: pd.Series) -> float:
    if len(values) < 2:
        return 0.0
    return float(values.std(ddof=1) / np.sqrt(len(values)))


def summarize(rows: Union[pd.DataFrame, Iterable[ResultRow]]) -> pd.DataFrame:
    """
    Per (topology, fleet mode, sweep value): mean F, its standard error and the
    replicate count, plus mean_modular / mean_fixed for the (topology, value).
    """
    frame = rows_frame(rows)
    if frame.empty:
        raise InvalidArgumentError("Cannot summarize an empty result table")

    grouped = frame.groupby(["topology", "fleet_mode", "sweep_value"], sort=False)
    summary = grouped.agg(
        mean_F=("F", "mean"),
        stderr_F=("F", _stderr),
        n=("F", "size"),
        mean_diversity=("diversity", "mean"),
        mean_lane=("lane", "mean"),
    ).reset_index()

    means = summary.pivot_table(
        index=["topology", "sweep_value"], columns="fleet_mode", values="mean_F", aggfunc="first"
    )
    if {"fixed", "modular"} <= set(means.columns):
        ratio = (means["modular"] / means["fixed"]).rename("modular_fixed_ratio").reset_index()
        summary = summary.merge(ratio, on=["topology", "sweep_value"], how="left")
    else:
        summary["modular_fixed_ratio"] = np.nan

    order = {
        "topology": {k.value: i for i, k in enumerate(TOPOLOGY_ORDER)},
        "fleet_mode": {m.value: i for i, m in enumerate(MODE_ORDER)},
    }
    summary = summary.sort_values(
        by=["topology", "fleet_mode", "sweep_value"],
        key=lambda col: col.map(order[col.name]) if col.name in order else col,
    ).reset_index(drop=True)
    return summary[SUMMARY_COLUMNS]


def load_results(path: Path) -> pd.DataFrame:
    return rows_frame(pd.read_csv(path, dtype={"sweep_value": str, "error": str}, keep_default_na=False))


def write_summary(summary: pd.DataFrame, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    summary.to_csv(path, index=False, float_format="%.10g")
    return path
