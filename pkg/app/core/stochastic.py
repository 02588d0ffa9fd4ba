"""
Exact simulation of the S/I/Q continuous-time Markov chain.

Two interchangeable engines:
    gillespie_run   aggregate event loop over compartment counts
    activation_run  individual-level activity-driven contact mechanism
"""
from typing import Any, Dict, List, Optional, Sequence, Union
from dataclasses import dataclass
import logging
import math

import numpy as np

from app.core.model import HealthState, MacroState, ModelParams, effective_rates
from app.core.rng import SeededStream
from app.core.trajectory import Engine, Trajectory, sampling_grid

logger = logging.getLogger(__name__)

GILLESPIE_STREAM = 0
ACTIVATION_STREAM = 1

_S, _I, _Q = int(HealthState.S), int(HealthState.I), int(HealthState.Q)


@dataclass(frozen=True)
class PopulationState:
    """Compartment counts of a population of n individuals."""
    n_s: int
    n_i: int
    n_q: int

    def __post_init__(self):
        if min(self.n_s, self.n_i, self.n_q) < 0:
            raise ValueError(f"Counts must be non-negative: {self}")
        if self.n < 2:
            raise ValueError("A population needs at least two individuals")

    @property
    def n(self) -> int:
        return self.n_s + self.n_i + self.n_q

    @classmethod
    def from_fractions(cls, n: int, state: MacroState) -> "PopulationState":
        """Largest-remainder rounding of fractions to counts that total n."""
        raw = np.clip(state.as_array(), 0.0, None) * n
        counts = np.floor(raw).astype(np.int64)
        # Floors undershoot by at most 2; largest fractional parts get the rest
        short = int(np.clip(n - counts.sum(), 0, 3))
        order = np.argsort(-(raw - counts), kind="stable")
        counts[order[:short]] += 1
        return cls(int(counts[_S]), int(counts[_I]), int(counts[_Q]))

    @classmethod
    def from_vector(cls, health: Sequence[int]) -> "PopulationState":
        counts = np.bincount(np.asarray(health, dtype=np.int64), minlength=3)
        return cls(int(counts[_S]), int(counts[_I]), int(counts[_Q]))

    def to_vector(self) -> np.ndarray:
        """Per-individual HealthState codes: S first, then I, then Q."""
        return np.repeat(
            np.array([_S, _I, _Q], dtype=np.int8),
            [self.n_s, self.n_i, self.n_q],
        )

    def as_macro(self) -> MacroState:
        return MacroState.normalized(self.n_s, self.n_i, self.n_q)


@dataclass(frozen=True)
class EventRates:
    """Total rates of the three event families."""
    r_inf: float
    r_rec: float
    r_test: float

    @property
    def total(self) -> float:
        return self.r_inf + self.r_rec + self.r_test


def event_rates(params: ModelParams, state: PopulationState) -> EventRates:
    """
    Aggregate event rates for the current counts.

    The infection rate sums the mild and severe infection clocks of every
    susceptible; the severity split is applied when an infection fires.
    """
    if state.n != params.n:
        raise ValueError(f"State holds {state.n} individuals but params.n = {params.n}")
    rates = effective_rates(params)
    return EventRates(
        r_inf=state.n_s * rates.pair_rate * state.n_i / (state.n - 1),
        r_rec=(state.n_i + state.n_q) * params.beta,
        r_test=state.n_i * params.c_t,
    )


def gillespie_run(
    params: ModelParams,
    init: PopulationState,
    horizon: float,
    seed: int,
    sampling: float = 1.0
) -> Trajectory:
    """
    Simulate the aggregate chain with the direct Gillespie method.

    Samples are the counts divided by n at the last event before each grid
    time. Quarantined individuals are tracked as severe arrivals or test
    arrivals; individuals quarantined at t = 0 count as test arrivals.

    Args:
        params: Validated model parameters
        init: Initial compartment counts (must total params.n)
        horizon: Final time
        seed: Seed of the run's random stream
        sampling: Distance between stored samples

    Returns:
        Trajectory with ``severe`` filled in
    """
    if init.n != params.n:
        raise ValueError(f"Initial state holds {init.n} individuals but params.n = {params.n}")
    grid = sampling_grid(horizon, sampling)
    stream = SeededStream(seed, GILLESPIE_STREAM)
    rates = effective_rates(params)

    n = init.n
    infection_scale = rates.pair_rate / (n - 1)
    p_severe = rates.p_severe
    beta, c_t = params.beta, params.c_t

    n_s, n_i, n_q = init.n_s, init.n_i, init.n_q
    q_severe = 0
    counters = {"events": 0, "infections": 0, "severe_infections": 0, "recoveries": 0, "tests": 0}
    first_transition: Optional[float] = None
    absorbed_at: Optional[float] = None

    samples = np.empty((len(grid), 3))
    severe = np.empty(len(grid))
    index = 0
    t = 0.0
    while True:
        # Total rate of the current counts; zero means absorbed
        r_inf = infection_scale * n_s * n_i
        r_rec = beta * (n_i + n_q)
        r_test = c_t * n_i
        total = r_inf + r_rec + r_test
        if total > 0.0:
            t_next = t + stream.exponential(total)
        else:
            t_next = math.inf
            absorbed_at = t

        # Record the state held over every grid time before the next event
        while index < len(grid) and grid[index] < t_next:
            samples[index] = (n_s / n, n_i / n, n_q / n)
            severe[index] = q_severe / n
            index += 1
        if index >= len(grid):
            break

        t = t_next
        if first_transition is None:
            first_transition = t
        counters["events"] += 1
        # Pick the event family proportionally to its rate
        u = stream.random() * total
        if u < r_inf:
            n_s -= 1
            counters["infections"] += 1
            if stream.bernoulli(p_severe):
                n_q += 1
                q_severe += 1
                counters["severe_infections"] += 1
            else:
                n_i += 1
        elif u < r_inf + r_rec:
            counters["recoveries"] += 1
            if stream.random() * (n_i + n_q) < n_i:
                n_i -= 1
            else:
                # Severe or tested arrival, by their counts
                if stream.random() * n_q < q_severe:
                    q_severe -= 1
                n_q -= 1
            n_s += 1
        else:
            counters["tests"] += 1
            n_i -= 1
            n_q += 1

    if absorbed_at is not None:
        logger.debug(f"Gillespie run seed={seed} absorbed at t={absorbed_at:.6g}")
    logger.debug(f"Gillespie run seed={seed} finished: {counters}")

    metadata: Dict[str, Any] = {
        "params": params.to_dict(),
        "seed": seed,
        "first_transition_time": first_transition,
        "absorbed_at": absorbed_at,
        **counters,
    }
    return Trajectory(times=grid, states=samples, engine=Engine.GILLESPIE,
                      metadata=metadata, severe=severe)


class _Members:
    """Index set with O(1) insert, delete and uniform pick."""

    def __init__(self, n: int):
        self.items: List[int] = []
        self._where = [-1] * n

    def __len__(self) -> int:
        return len(self.items)

    def add(self, j: int) -> None:
        self._where[j] = len(self.items)
        self.items.append(j)

    def remove(self, j: int) -> None:
        position = self._where[j]
        last = self.items.pop()
        if last != j:
            self.items[position] = last
            self._where[last] = position
        self._where[j] = -1


def activation_run(
    params: ModelParams,
    init: Union[PopulationState, Sequence[int], np.ndarray],
    horizon: float,
    seed: int,
    sampling: float = 1.0
) -> Trajectory:
    """
    Simulate the activity-driven contact mechanism individual by individual.

    Every individual activates at unit rate and picks a partner uniformly
    from the rest of the population. An S-I pair is in close proximity with
    probability 1 - sigma, an I-I pair with probability (1 - sigma)^2, and a
    pair involving a quarantined individual never is. Close S-I contacts
    transmit with probability lambda_eff. Recovery and testing run as
    independent Poisson clocks. While nobody is infectious, activations
    cannot change the state and are not simulated.

    Args:
        params: Validated model parameters
        init: Per-individual HealthState codes (or counts, expanded S, I, Q)
        horizon: Final time
        seed: Seed of the run's random stream
        sampling: Distance between stored samples

    Returns:
        Trajectory of population fractions
    """
    if isinstance(init, PopulationState):
        init = init.to_vector()
    health = [int(x) for x in np.asarray(init).ravel()]
    n = len(health)
    if n != params.n:
        raise ValueError(f"Initial state holds {n} individuals but params.n = {params.n}")
    if any(x not in (_S, _I, _Q) for x in health):
        raise ValueError("Initial state contains unknown health codes")

    grid = sampling_grid(horizon, sampling)
    stream = SeededStream(seed, ACTIVATION_STREAM)
    rates = effective_rates(params)
    lambda_eff, p_severe = rates.lambda_eff, rates.p_severe
    close_si = 1.0 - params.sigma
    close_ii = close_si * close_si
    beta, c_t = params.beta, params.c_t

    infectious = _Members(n)
    quarantined = _Members(n)
    for j, x in enumerate(health):
        if x == _I:
            infectious.add(j)
        elif x == _Q:
            quarantined.add(j)
    n_s = n - len(infectious) - len(quarantined)

    counters = {
        "events": 0, "activations": 0, "close_contacts": 0, "ii_contacts": 0,
        "infections": 0, "severe_infections": 0, "recoveries": 0, "tests": 0,
    }
    first_transition: Optional[float] = None
    absorbed_at: Optional[float] = None

    samples = np.empty((len(grid), 3))
    index = 0
    t = 0.0
    while True:
        n_i = len(infectious)
        n_q = len(quarantined)
        # Activations only matter while someone is infectious
        activation_rate = float(n) if n_i > 0 else 0.0
        recovery_rate = beta * (n_i + n_q)
        test_rate = c_t * n_i
        total = activation_rate + recovery_rate + test_rate
        if total > 0.0:
            t_next = t + stream.exponential(total)
        else:
            t_next = math.inf
            absorbed_at = t

        while index < len(grid) and grid[index] < t_next:
            samples[index] = (n_s / n, n_i / n, n_q / n)
            index += 1
        if index >= len(grid):
            break

        t = t_next
        counters["events"] += 1
        u = stream.random() * total
        if u < activation_rate:
            counters["activations"] += 1
            # Partner k is uniform over everyone but j
            j = stream.randrange(n)
            k = stream.randrange(n - 1)
            if k >= j:
                k += 1
            x_j, x_k = health[j], health[k]
            # No S-I pair, nothing to transmit
            if x_j == _Q or x_k == _Q or (x_j == _S and x_k == _S):
                continue
            if x_j == _I and x_k == _I:
                if stream.bernoulli(close_ii):
                    counters["ii_contacts"] += 1
                continue
            if stream.random() >= close_si:
                continue
            counters["close_contacts"] += 1
            if stream.random() >= lambda_eff:
                continue
            # Infection; severe cases go straight to Q
            target = j if x_j == _S else k
            n_s -= 1
            counters["infections"] += 1
            if stream.bernoulli(p_severe):
                health[target] = _Q
                quarantined.add(target)
                counters["severe_infections"] += 1
            else:
                health[target] = _I
                infectious.add(target)
        elif u < activation_rate + recovery_rate:
            counters["recoveries"] += 1
            r = stream.randrange(n_i + n_q)
            if r < n_i:
                j = infectious.items[r]
                infectious.remove(j)
            else:
                j = quarantined.items[r - n_i]
                quarantined.remove(j)
            health[j] = _S
            n_s += 1
        else:
            counters["tests"] += 1
            j = infectious.items[stream.randrange(n_i)]
            infectious.remove(j)
            quarantined.add(j)
            health[j] = _Q
        if first_transition is None:
            first_transition = t

    logger.debug(f"Activation run seed={seed} finished: {counters}")

    metadata: Dict[str, Any] = {
        "params": params.to_dict(),
        "seed": seed,
        "first_transition_time": first_transition,
        "absorbed_at": absorbed_at,
        "final_health": np.array(health, dtype=np.int8),
        **counters,
    }
    return Trajectory(times=grid, states=samples, engine=Engine.ACTIVATION, metadata=metadata)
