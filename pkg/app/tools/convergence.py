"""
Mean-field convergence experiment: ensemble mean vs macroscopic ODE for growing n.
"""
from typing import List, Sequence
from dataclasses import dataclass
import logging

import numpy as np
import pandas as pd

from app.core.errors import ConfigError
from app.core.meanfield import integrate
from app.core.model import MacroState, ModelParams
from app.core.stochastic import PopulationState
from app.core.trajectory import Engine
from app.tools.ensemble import ensemble

logger = logging.getLogger(__name__)

MIN_SEEDS = 10


@dataclass(frozen=True)
class ConvergencePoint:
    n: int
    runs: int
    sup_deviation: float


@dataclass
class ConvergenceResult:
    points: List[ConvergencePoint]

    @property
    def decreasing(self) -> bool:
        """Deviation at the largest n is below the deviation at the smallest n."""
        return self.points[-1].sup_deviation < self.points[0].sup_deviation

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            [(p.n, p.runs, p.sup_deviation) for p in self.points],
            columns=["n", "runs", "sup_deviation"],
        )


def convergence(
    params: ModelParams,
    init: MacroState,
    sizes: Sequence[int],
    seeds: Sequence[int],
    horizon: float,
    sampling: float = 1.0,
    engine: Engine = Engine.GILLESPIE,
    workers: int = 1
) -> ConvergenceResult:
    """
    Sup-norm distance between the ensemble mean and the macroscopic trajectory.

    For each population size the initial fractions are rounded to counts and
    the ODE starts from exactly those fractions.

    Args:
        params: Validated parameters; n is replaced by each size in turn
        init: Initial fractions
        sizes: At least two population sizes
        seeds: At least ten seeds, reused for every size
        horizon: Final time
        sampling: Grid step shared by both engines
        engine: Stochastic engine to use
        workers: Process pool size for the ensembles

    Returns:
        ConvergenceResult ordered by increasing n
    """
    sizes = sorted({int(n) for n in sizes})
    if len(sizes) < 2:
        raise ConfigError(f"Convergence needs at least two population sizes, got {sizes}")
    if len(seeds) < MIN_SEEDS:
        raise ConfigError(f"Convergence needs at least {MIN_SEEDS} seeds, got {len(seeds)}")

    points = []
    for n in sizes:
        sized = params.with_updates(n=n)
        counts = PopulationState.from_fractions(n, init)
        summary = ensemble(sized, counts, horizon, seeds, engine, sampling, workers)
        macro = integrate(sized, counts.as_macro(), horizon, sampling)
        deviation = float(np.abs(summary.mean - macro.states).max())
        logger.info(f"n={n}: sup deviation {deviation:.6g} over {summary.runs} runs")
        points.append(ConvergencePoint(n=n, runs=summary.runs, sup_deviation=deviation))

    result = ConvergenceResult(points)
    if not result.decreasing:
        logger.warning("Sup deviation did not decrease from the smallest to the largest population")
    return result
