"""
Mean-field ODE systems: the per-individual system and its macroscopic reduction.
"""
from typing import Any, Tuple, Union
from dataclasses import dataclass
import logging
import math

import numpy as np

from app.core.errors import IntegrationError
from app.core.model import (
    EffectiveRates,
    MacroState,
    ModelParams,
    SIMPLEX_TOL,
    effective_rates,
)
from app.core.trajectory import Engine, Trajectory, sampling_grid

logger = logging.getLogger(__name__)

Derivative = Tuple[float, float, float]

EQUILIBRIUM_RESIDUAL = 1e-10
EQUILIBRIUM_PATIENCE = 10
MAX_STEP = 0.01


@dataclass
class IndividualProbState:
    """Per-individual probabilities; ``probs`` has shape (n, 3) with columns s, i, q."""
    probs: np.ndarray

    def __post_init__(self):
        self.probs = np.asarray(self.probs, dtype=float)
        if self.probs.ndim != 2 or self.probs.shape[1] != 3:
            raise ValueError(f"Expected an (n, 3) array, got shape {self.probs.shape}")
        if self.probs.shape[0] < 2:
            raise ValueError("At least two individuals are required")
        if np.any(self.probs < -SIMPLEX_TOL) or np.any(self.probs > 1.0 + SIMPLEX_TOL):
            raise ValueError("Individual probabilities must lie in [0, 1]")
        if np.any(np.abs(self.probs.sum(axis=1) - 1.0) > SIMPLEX_TOL):
            raise ValueError("Each individual triple must sum to 1")

    @classmethod
    def homogeneous(cls, n: int, state: MacroState) -> "IndividualProbState":
        """Every individual starts from the same triple."""
        return cls(np.tile(state.as_array(), (n, 1)))

    @classmethod
    def from_counts(cls, n_s: int, n_i: int, n_q: int) -> "IndividualProbState":
        """Degenerate (one-hot) probabilities matching integer compartment counts."""
        probs = np.zeros((n_s + n_i + n_q, 3))
        probs[:n_s, 0] = 1.0
        probs[n_s:n_s + n_i, 1] = 1.0
        probs[n_s + n_i:, 2] = 1.0
        return cls(probs)

    @property
    def n(self) -> int:
        return self.probs.shape[0]

    def mean(self) -> MacroState:
        return MacroState.normalized(*self.probs.mean(axis=0))


def macro_rhs(params: ModelParams, state: MacroState) -> Derivative:
    """
    Right-hand side of the three-dimensional macroscopic system.

    Returns:
        (dy_s, dy_i, dy_q); dy_s is the negated sum of the other two
    """
    rates = effective_rates(params)
    return _macro_field(rates, params.beta, params.c_t, *state.as_tuple())


def _macro_field(
    rates: EffectiveRates,
    beta: float,
    c_t: float,
    y_s: float,
    y_i: float,
    y_q: float
) -> Derivative:
    contact = rates.pair_rate * y_i * y_s
    d_i = contact * (1.0 - rates.p_severe) - (beta + c_t) * y_i
    d_q = contact * rates.p_severe + c_t * y_i - beta * y_q
    return (-(d_i + d_q), d_i, d_q)


def individual_rhs(params: ModelParams, state: IndividualProbState) -> np.ndarray:
    """
    Right-hand side of the n-individual system.

    Each susceptible j is coupled to the average infectious probability of
    the other n-1 individuals.

    Returns:
        Array of shape (n, 3); every row sums to zero
    """
    if state.n != params.n:
        raise ValueError(f"State has {state.n} individuals but params.n = {params.n}")
    return _individual_field(effective_rates(params), params.beta, params.c_t, state.probs)


def _individual_field(
    rates: EffectiveRates,
    beta: float,
    c_t: float,
    probs: np.ndarray
) -> np.ndarray:
    s, i, q = probs[:, 0], probs[:, 1], probs[:, 2]
    n = probs.shape[0]
    coupling = (i.sum() - i) / (n - 1)
    contact = rates.pair_rate * s * coupling
    d_i = contact * (1.0 - rates.p_severe) - (beta + c_t) * i
    d_q = contact * rates.p_severe + c_t * i - beta * q
    return np.column_stack((-(d_i + d_q), d_i, d_q))


def integration_step(params: ModelParams) -> float:
    """Fixed RK4 step h = min(0.01, 0.1 / (beta + c_t + pair_rate))."""
    rates = effective_rates(params)
    return min(MAX_STEP, 0.1 / (params.beta + params.c_t + rates.pair_rate))


class _MacroSystem:
    """RK4 on plain float triples."""

    def __init__(self, params: ModelParams):
        self.rates = effective_rates(params)
        self.beta = params.beta
        self.c_t = params.c_t
        self.worst_clamp = 0.0

    def field(self, y: Derivative) -> Derivative:
        return _macro_field(self.rates, self.beta, self.c_t, *y)

    def step(self, y: Derivative, h: float) -> Derivative:
        f = self.field
        k1 = f(y)
        k2 = f((y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1], y[2] + 0.5 * h * k1[2]))
        k3 = f((y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1], y[2] + 0.5 * h * k2[2]))
        k4 = f((y[0] + h * k3[0], y[1] + h * k3[1], y[2] + h * k3[2]))
        raw = tuple(
            y[j] + h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]) for j in range(3)
        )
        return self._project(raw)

    def _project(self, raw: Tuple[float, ...]) -> Derivative:
        if not all(math.isfinite(x) for x in raw):
            raise IntegrationError(f"Non-finite macroscopic state {raw}")
        low = min(raw)
        if low < 0.0:
            self.worst_clamp = max(self.worst_clamp, -low)
        clamped = [max(x, 0.0) for x in raw]
        total = sum(clamped)
        return (clamped[0] / total, clamped[1] / total, clamped[2] / total)

    def residual(self, y: Derivative) -> float:
        return max(abs(x) for x in self.field(y))

    def sample(self, y: Derivative) -> Derivative:
        return y


class _IndividualSystem:
    """RK4 on the (n, 3) probability array."""

    def __init__(self, params: ModelParams):
        self.rates = effective_rates(params)
        self.beta = params.beta
        self.c_t = params.c_t
        self.worst_clamp = 0.0

    def field(self, y: np.ndarray) -> np.ndarray:
        return _individual_field(self.rates, self.beta, self.c_t, y)

    def step(self, y: np.ndarray, h: float) -> np.ndarray:
        f = self.field
        k1 = f(y)
        k2 = f(y + 0.5 * h * k1)
        k3 = f(y + 0.5 * h * k2)
        k4 = f(y + h * k3)
        raw = y + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(raw)):
            raise IntegrationError("Non-finite individual state")
        low = float(raw.min())
        if low < 0.0:
            self.worst_clamp = max(self.worst_clamp, -low)
        clamped = np.clip(raw, 0.0, None)
        return clamped / clamped.sum(axis=1, keepdims=True)

    def residual(self, y: np.ndarray) -> float:
        return float(np.abs(self.field(y)).max())

    def sample(self, y: np.ndarray) -> Derivative:
        return tuple(y.mean(axis=0))


def integrate(
    params: ModelParams,
    init: Union[MacroState, IndividualProbState],
    horizon: float,
    sampling: float = 1.0,
    stop_at_equilibrium: bool = True
) -> Trajectory:
    """
    Integrate either mean-field system with fixed-step RK4.

    Args:
        params: Validated model parameters
        init: MacroState for the macroscopic system, IndividualProbState for
            the n-individual system
        horizon: Final time
        sampling: Distance between stored samples
        stop_at_equilibrium: Stop stepping once the residual stays below
            1e-10 for 10 consecutive samples; later samples repeat the state

    Returns:
        Trajectory sampled on the shared grid
    """
    grid = sampling_grid(horizon, sampling)
    h_max = integration_step(params)

    system: Any
    if isinstance(init, IndividualProbState):
        if init.n != params.n:
            raise ValueError(f"Initial state has {init.n} individuals but params.n = {params.n}")
        system = _IndividualSystem(params)
        engine = Engine.INDIVIDUAL_ODE
        y: Any = init.probs.copy()
    else:
        system = _MacroSystem(params)
        engine = Engine.MACRO
        y = init.as_tuple()

    logger.debug(f"Integrating {engine.value} system to t={horizon} with h<={h_max:.6g}")

    samples = np.empty((len(grid), 3))
    samples[0] = system.sample(y)
    quiet = 1 if system.residual(y) < EQUILIBRIUM_RESIDUAL else 0
    equilibrium_time = None
    index = 1
    while index < len(grid):
        if stop_at_equilibrium and quiet >= EQUILIBRIUM_PATIENCE:
            equilibrium_time = float(grid[index - 1])
            samples[index:] = samples[index - 1]
            break
        interval = grid[index] - grid[index - 1]
        substeps = max(1, math.ceil(interval / h_max - 1e-12))
        h = interval / substeps
        for _ in range(substeps):
            y = system.step(y, h)
        samples[index] = system.sample(y)
        quiet = quiet + 1 if system.residual(y) < EQUILIBRIUM_RESIDUAL else 0
        index += 1

    if system.worst_clamp > SIMPLEX_TOL:
        logger.warning(
            f"Simplex projection clamped a component by {system.worst_clamp:.3g} "
            f"during {engine.value} integration"
        )

    metadata = {
        "params": params.to_dict(),
        "step": h_max,
        "equilibrium_time": equilibrium_time,
        "max_clamp": system.worst_clamp,
    }
    if engine is Engine.INDIVIDUAL_ODE:
        metadata["final_individual_state"] = IndividualProbState(y)
    return Trajectory(times=grid, states=samples, engine=engine, metadata=metadata)
