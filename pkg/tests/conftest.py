from typing import List

import numpy as np
import pytest

from app.core.model import ModelParams, validate
from app.core.presets import MRNA, MRNA_WANED, BASELINE


@pytest.fixture
def baseline_params() -> ModelParams:
    return validate(BASELINE)


@pytest.fixture
def mrna_params() -> ModelParams:
    return validate(MRNA)


@pytest.fixture
def waned_params() -> ModelParams:
    return validate(MRNA_WANED)


def random_params(count: int, seed: int = 2024, **overrides) -> List[ModelParams]:
    """Random valid parameter sets with moderate rates."""
    rng = np.random.default_rng(seed)
    sets = []
    for _ in range(count):
        raw = {
            "n": 1000,
            "sigma": rng.uniform(0.0, 0.9),
            "lambda": rng.uniform(0.05, 1.0),
            "p_q": rng.uniform(0.0, 0.9),
            "beta": rng.uniform(0.01, 0.5),
            "v": rng.uniform(0.0, 1.0),
            "gamma_t": rng.uniform(0.0, 1.0),
            "gamma_q": rng.uniform(0.0, 1.0),
            "eta": rng.uniform(0.0, 0.9),
            "c_t": rng.uniform(0.0, 0.5),
        }
        raw.update(overrides)
        sets.append(validate(raw))
    return sets
