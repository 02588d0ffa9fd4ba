"""
Two-parameter sweeps of the closed-form quantities.
"""
from typing import Any, Dict, List, Mapping, Sequence, Tuple
from dataclasses import dataclass
from functools import partial
from multiprocessing import Pool
import logging

import numpy as np
import pandas as pd

from app.core.analysis import Regime, analyze
from app.core.errors import ConfigError
from app.core.model import PARAMETER_KEYS, validate

logger = logging.getLogger(__name__)

SWEEP_QUANTITIES = ("c_t_bar", "xi", "y_i_star", "y_q_star", "regime")


@dataclass(frozen=True)
class Axis:
    """One swept parameter."""
    name: str
    minimum: float
    maximum: float
    steps: int

    def __post_init__(self):
        if self.name not in PARAMETER_KEYS:
            raise ConfigError(f"Cannot sweep '{self.name}': not a model parameter")
        if self.steps < 1:
            raise ConfigError(f"Axis '{self.name}' needs at least one step")
        if self.maximum < self.minimum:
            raise ConfigError(f"Axis '{self.name}' has max < min")

    def values(self) -> np.ndarray:
        if self.steps == 1:
            return np.array([self.minimum])
        return np.linspace(self.minimum, self.maximum, self.steps)


def _evaluate_point(
    base: Mapping[str, Any],
    x_name: str,
    y_name: str,
    quantities: Sequence[str],
    point: Tuple[float, float]
) -> List[Tuple[float, float, str, float]]:
    x_value, y_value = point
    params = validate({**base, x_name: x_value, y_name: y_value})
    report = analyze(params).to_dict()
    rows = []
    for quantity in quantities:
        if quantity == "regime":
            value = 1.0 if report["regime"] == Regime.ENDEMIC.value else 0.0
        else:
            value = float(report[quantity])
        rows.append((x_value, y_value, quantity, value))
    return rows


def sweep(
    base: Mapping[str, Any],
    x: Axis,
    y: Axis,
    quantities: Sequence[str],
    workers: int = 1
) -> pd.DataFrame:
    """
    Evaluate analytic quantities over a rectangular parameter grid.

    Args:
        base: Raw parameter mapping; swept keys may be absent
        x: Outer axis
        y: Inner axis
        quantities: Subset of c_t_bar, xi, y_i_star, y_q_star, regime
            (regime is encoded 1.0 endemic / 0.0 disease-free)
        workers: Process pool size; 1 evaluates sequentially

    Returns:
        Long-format frame with columns [x.name, y.name, "quantity", "value"],
        ordered by x, then y, then quantity
    """
    if x.name == y.name:
        raise ConfigError(f"Swept parameters must differ, got '{x.name}' twice")
    unknown = [q for q in quantities if q not in SWEEP_QUANTITIES]
    if unknown or not quantities:
        raise ConfigError(f"Sweep quantities must be drawn from {', '.join(SWEEP_QUANTITIES)}, got {list(quantities)}")

    base = {k: v for k, v in base.items() if k not in (x.name, y.name)}
    # corners of the grid must be valid parameter sets
    for x_value in (x.minimum, x.maximum):
        for y_value in (y.minimum, y.maximum):
            validate({**base, x.name: x_value, y.name: y_value})

    points = [(float(a), float(b)) for a in x.values() for b in y.values()]
    logger.info(f"Sweeping {x.name} x {y.name}: {len(points)} points, quantities={list(quantities)}")
    task = partial(_evaluate_point, base, x.name, y.name, list(quantities))
    try:
        if workers > 1:
            with Pool(processes=workers) as pool:
                chunks = pool.map(task, points)
        else:
            chunks = [task(point) for point in points]
    except Exception as e:
        logger.error(f"Error evaluating sweep grid: {e}")
        raise

    rows = [row for chunk in chunks for row in chunk]
    return pd.DataFrame(rows, columns=[x.name, y.name, "quantity", "value"])


def grid_matrix(frame: pd.DataFrame, quantity: str) -> pd.DataFrame:
    """Pivot one quantity of a sweep into an x-by-y matrix (rows x, columns y)."""
    x_name, y_name = frame.columns[0], frame.columns[1]
    subset = frame[frame["quantity"] == quantity]
    return subset.pivot(index=x_name, columns=y_name, values="value")


def sweep_summary(frame: pd.DataFrame) -> Dict[str, Dict[str, float]]:
    """Min and max of every quantity in a sweep."""
    grouped = frame.groupby("quantity")["value"]
    return {q: {"min": float(lo), "max": float(hi)} for q, lo, hi in zip(
        grouped.min().index, grouped.min().values, grouped.max().values)}
