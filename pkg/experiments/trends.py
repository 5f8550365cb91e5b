# trends.py
from dataclasses import dataclass
from typing import List, Sequence

import numpy as np
import pandas as pd
from scipy.stats import spearmanr

from .plan import TOPOLOGY_ORDER, SweepVariable


@dataclass(frozen=True)
class TrendCheck:
    name: str
    passed: bool
    detail: str

    def __str__(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.name}: {self.detail}"


def _cell(summary: pd.DataFrame, topology: str, mode: str, value: float) -> pd.Series:
    hit = summary[
        (summary["topology"] == topology)
        & (summary["fleet_mode"] == mode)
        & (summary["sweep_value"] == value)
    ]
    return hit.iloc[0] if len(hit) else None


def _topologies(summary: pd.DataFrame) -> List[str]:
    present = set(summary["topology"])
    return [k.value for k in TOPOLOGY_ORDER if k.value in present]


def _ordered(summary: pd.DataFrame, mode: str, value: float, order: Sequence[str]) -> TrendCheck:
    """Mean F strictly decreasing along ``order``, each gap wider than the pooled standard error."""
    cells = [_cell(summary, topology, mode, value) for topology in order]
    label = " > ".join(order)
    if any(c is None for c in cells):
        return TrendCheck(f"{mode} at {value:g}: {label}", False, "missing cells")
    gaps = []
    passed = True
    for hi, lo in zip(cells, cells[1:]):
        pooled = float(np.hypot(hi["stderr_F"], lo["stderr_F"]))
        gap = float(hi["mean_F"] - lo["mean_F"])
        gaps.append(f"{gap:.4f} (se {pooled:.4f})")
        passed = passed and gap > pooled
    return TrendCheck(f"{mode} at {value:g}: {label}", passed, ", ".join(gaps))


def penalty_sweep_checks(summary: pd.DataFrame) -> List[TrendCheck]:
    """
    At the smallest window the ring costs most and SW2 least; at the largest
    window the order reverses; modular beats fixed everywhere.
    """
    checks = []
    topologies = _topologies(summary)
    values = sorted(summary["sweep_value"].unique())
    for mode in sorted(summary["fleet_mode"].unique()):
        checks.append(_ordered(summary, mode, values[0], topologies))
        checks.append(_ordered(summary, mode, values[-1], list(reversed(topologies))))

    ratios = summary["modular_fixed_ratio"].dropna()
    worst = float(ratios.max()) if len(ratios) else float("nan")
    checks.append(
        TrendCheck(
            "modular cheaper than fixed in every cell",
            bool(len(ratios)) and worst < 1.0,
            f"largest modular/fixed ratio {worst:.4f}",
        )
    )
    return checks


def flexibility_sweep_checks(summary: pd.DataFrame, far_value: float = 100.0) -> List[TrendCheck]:
    """
    Mean F falls with flexibility, topology sensitivity fades, the modular/fixed
    ratio stays flat, and at the far point fixed costs a little under double.
    """
    checks = []
    values = sorted(summary["sweep_value"].unique())

    for (topology, mode), series in summary.groupby(["topology", "fleet_mode"]):
        series = series.sort_values("sweep_value")
        if len(series) < 2:
            continue
        rho, _ = spearmanr(series["sweep_value"], series["mean_F"])
        checks.append(
            TrendCheck(
                f"{topology}/{mode} F falls with alpha",
                bool(rho <= -0.9),
                f"Spearman rho {rho:.3f}",
            )
        )

    finite = [v for v in values if v < far_value] or values
    spreads = {}
    for value in (finite[0], finite[-1]):
        at = summary[summary["sweep_value"] == value]
        per_topology = at.groupby("topology")["mean_F"].mean()
        spreads[value] = float(per_topology.max() - per_topology.min())
    checks.append(
        TrendCheck(
            "topology spread shrinks",
            spreads[finite[-1]] < spreads[finite[0]],
            f"spread {spreads[finite[0]]:.4f} at {finite[0]:g} vs {spreads[finite[-1]]:.4f} at {finite[-1]:g}",
        )
    )

    for topology in _topologies(summary):
        ratio = (
            summary[(summary["topology"] == topology) & (summary["fleet_mode"] == "modular")]
            .sort_values("sweep_value")["modular_fixed_ratio"]
            .dropna()
        )
        spread = float(ratio.std(ddof=0)) if len(ratio) else float("nan")
        checks.append(
            TrendCheck(
                f"{topology} modular/fixed ratio stable",
                bool(len(ratio)) and spread <= 0.03,
                f"mean {ratio.mean():.3f}, std {spread:.4f}",
            )
        )
        far = _cell(summary, topology, "modular", far_value)
        if far is not None and far["modular_fixed_ratio"] > 0:
            inverse = 1.0 / float(far["modular_fixed_ratio"])
            checks.append(
                TrendCheck(
                    f"{topology} fixed/modular at alpha={far_value:g}",
                    1.5 < inverse < 2.0,
                    f"{inverse:.3f}",
                )
            )
    return checks


def trend_checks(summary: pd.DataFrame, sweep: SweepVariable) -> List[TrendCheck]:
    if sweep is SweepVariable.FLEXIBILITY_ALPHA:
        return flexibility_sweep_checks(summary)
    return penalty_sweep_checks(summary)
