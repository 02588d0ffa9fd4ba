"""
Seed ensembles of the stochastic engines.
"""
from typing import List, Sequence
from dataclasses import dataclass
from functools import partial
from multiprocessing import Pool
import logging

import numpy as np
import pandas as pd

from app.core.errors import ConfigError
from app.core.model import ModelParams
from app.core.stochastic import PopulationState, activation_run, gillespie_run
from app.core.trajectory import Engine, Trajectory

logger = logging.getLogger(__name__)

ENSEMBLE_COLUMNS = ["t", "mean_s", "mean_i", "mean_q", "sd_s", "sd_i", "sd_q"]


@dataclass
class EnsembleSummary:
    """Pointwise statistics of several runs on a shared grid."""
    times: np.ndarray
    mean: np.ndarray
    sd: np.ndarray
    samples: np.ndarray
    engine: Engine
    seeds: List[int]

    @property
    def runs(self) -> int:
        return self.samples.shape[0]

    def standard_error(self) -> np.ndarray:
        return self.sd / np.sqrt(self.runs)

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame(
            np.column_stack((self.times, self.mean, self.sd)),
            columns=ENSEMBLE_COLUMNS,
        )
        return frame


def run_stochastic(
    engine: Engine,
    params: ModelParams,
    init: PopulationState,
    horizon: float,
    sampling: float,
    seed: int
) -> Trajectory:
    """Dispatch one seeded run to the requested engine."""
    if engine is Engine.GILLESPIE:
        return gillespie_run(params, init, horizon, seed, sampling)
    if engine is Engine.ACTIVATION:
        return activation_run(params, init, horizon, seed, sampling)
    raise ValueError(f"Engine '{engine.value}' is not stochastic")


def ensemble(
    params: ModelParams,
    init: PopulationState,
    horizon: float,
    seeds: Sequence[int],
    engine: Engine = Engine.GILLESPIE,
    sampling: float = 1.0,
    workers: int = 1
) -> EnsembleSummary:
    """
    Run one trajectory per seed and summarize them pointwise.

    Args:
        params: Validated model parameters
        init: Initial counts shared by every run
        horizon: Final time
        seeds: At least two seeds; results are merged in this order
        engine: gillespie or activation
        sampling: Distance between stored samples
        workers: Process pool size; 1 runs sequentially

    Returns:
        EnsembleSummary with per-time mean and standard deviation (ddof=1)
    """
    seeds = [int(s) for s in seeds]
    if len(seeds) < 2:
        raise ConfigError(f"An ensemble needs at least two seeds, got {len(seeds)}")
    if not engine.stochastic:
        raise ConfigError(f"Engine '{engine.value}' is deterministic; ensembles need a stochastic engine")

    logger.info(f"Running {engine.value} ensemble: n={params.n}, {len(seeds)} seeds, workers={workers}")
    task = partial(run_stochastic, engine, params, init, horizon, sampling)
    try:
        if workers > 1:
            with Pool(processes=workers) as pool:
                trajectories = pool.map(task, seeds)
        else:
            trajectories = [task(seed) for seed in seeds]
    except Exception as e:
        logger.error(f"Error running ensemble: {e}")
        raise

    samples = np.stack([traj.states for traj in trajectories])
    return EnsembleSummary(
        times=trajectories[0].times,
        mean=samples.mean(axis=0),
        sd=samples.std(axis=0, ddof=1),
        samples=samples,
        engine=engine,
        seeds=seeds,
    )
