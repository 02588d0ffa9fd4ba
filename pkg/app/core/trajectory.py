"""
Time-stamped MacroState samples shared by the deterministic and stochastic engines.
"""
from typing import Any, Dict, Optional
from dataclasses import dataclass, field
from enum import Enum
import math

import numpy as np
import pandas as pd

from app.core.model import MacroState, SIMPLEX_TOL

TRAJECTORY_COLUMNS = ["t", "y_s", "y_i", "y_q"]


class Engine(str, Enum):
    """Available simulation engines."""
    MACRO = "macro"
    INDIVIDUAL_ODE = "individual-ode"
    GILLESPIE = "gillespie"
    ACTIVATION = "activation"

    @property
    def stochastic(self) -> bool:
        return self in (Engine.GILLESPIE, Engine.ACTIVATION)


def sampling_grid(horizon: float, sampling: float) -> np.ndarray:
    """
    Build the shared sampling grid 0, d, 2d, ... up to the horizon.

    The horizon itself is appended when it is not a multiple of the step.
    """
    if not horizon > 0:
        raise ValueError(f"horizon must be positive, got {horizon}")
    if not sampling > 0:
        raise ValueError(f"sampling step must be positive, got {sampling}")
    steps = int(math.floor(horizon / sampling + 1e-9))
    grid = np.arange(steps + 1, dtype=float) * sampling
    if horizon - grid[-1] > 1e-9 * max(1.0, horizon):
        grid = np.append(grid, horizon)
    return grid


@dataclass
class Trajectory:
    """
    Ordered MacroState samples.

    ``states`` has shape (len(times), 3) with columns y_s, y_i, y_q.
    ``severe`` optionally holds the fraction of the population quarantined
    because of severe symptoms (aggregate stochastic engine only).
    """
    times: np.ndarray
    states: np.ndarray
    engine: Engine
    metadata: Dict[str, Any] = field(default_factory=dict)
    severe: Optional[np.ndarray] = None

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.states = np.asarray(self.states, dtype=float)
        if self.states.shape != (len(self.times), 3):
            raise ValueError(
                f"states shape {self.states.shape} does not match {len(self.times)} samples"
            )
        if len(self.times) > 1 and np.any(np.diff(self.times) <= 0):
            raise ValueError("Trajectory timestamps must be strictly increasing")
        if np.any(self.states < -SIMPLEX_TOL) or np.any(
            np.abs(self.states.sum(axis=1) - 1.0) > SIMPLEX_TOL
        ):
            raise ValueError("Trajectory contains states off the probability simplex")

    def __len__(self) -> int:
        return len(self.times)

    def state_at(self, index: int) -> MacroState:
        return MacroState.normalized(*self.states[index])

    def final_state(self) -> MacroState:
        return self.state_at(-1)

    def tail_mean(self, fraction: float = 0.25) -> MacroState:
        """Time average over the last ``fraction`` of the samples."""
        start = int(len(self) * (1.0 - fraction))
        start = min(max(start, 0), len(self) - 1)
        return MacroState.normalized(*self.states[start:].mean(axis=0))

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame(self.states, columns=TRAJECTORY_COLUMNS[1:])
        frame.insert(0, "t", self.times)
        return frame
