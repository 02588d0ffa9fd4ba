"""
Model parameters, compartment states and the derived transmission quantities.
"""
from typing import Any, Dict, Mapping, Tuple, Union
from dataclasses import dataclass
from enum import IntEnum
import logging
import math

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from app.core.errors import ParameterError

logger = logging.getLogger(__name__)

# Config keys in field order
PARAMETER_KEYS = (
    "n", "sigma", "lambda", "p_q", "beta", "v",
    "gamma_t", "gamma_q", "eta", "c_t",
)

_BOUNDS = {
    "n": "n >= 2",
    "sigma": "0 <= sigma <= 1",
    "lambda": "0 <= lambda <= 1",
    "p_q": "0 <= p_q <= 1",
    "beta": "beta > 0",
    "v": "0 <= v <= 1",
    "gamma_t": "0 <= gamma_t <= 1",
    "gamma_q": "0 <= gamma_q <= 1",
    "eta": "0 <= eta <= 1",
    "c_t": "c_t >= 0",
}

SIMPLEX_TOL = 1e-9


class ModelParams(BaseModel):
    """Epidemiological, behavioural and control parameters of the S/I/Q model."""

    model_config = ConfigDict(
        frozen=True,
        extra="forbid",
        populate_by_name=True,
        allow_inf_nan=False,
    )

    n: int = Field(ge=2, description="population size")
    sigma: float = Field(ge=0.0, le=1.0, description="responsibility level")
    lambda_: float = Field(alias="lambda", ge=0.0, le=1.0, description="per-contact infection probability")
    p_q: float = Field(ge=0.0, le=1.0, description="severe-illness probability")
    beta: float = Field(gt=0.0, description="recovery rate")
    v: float = Field(ge=0.0, le=1.0, description="vaccination coverage")
    gamma_t: float = Field(ge=0.0, le=1.0, description="vaccine effectiveness against transmission")
    gamma_q: float = Field(ge=0.0, le=1.0, description="vaccine effectiveness against severe illness")
    eta: float = Field(ge=0.0, le=1.0, description="NPI effectiveness")
    c_t: float = Field(ge=0.0, description="testing rate")

    def to_dict(self) -> Dict[str, Any]:
        """Flat mapping keyed by the config spelling (``lambda``, not ``lambda_``)."""
        return self.model_dump(by_alias=True)

    def with_updates(self, **changes: Any) -> "ModelParams":
        """
        Return a re-validated copy with some fields replaced.

        Args:
            **changes: New field values; ``lambda`` may be passed as ``lambda_``

        Returns:
            Validated parameter object
        """
        if "lambda_" in changes:
            changes["lambda"] = changes.pop("lambda_")
        return validate({**self.to_dict(), **changes})


def validate(params: Union[ModelParams, Mapping[str, Any]]) -> ModelParams:
    """
    Validate raw parameter values.

    Args:
        params: Mapping keyed by parameter name, or an existing ModelParams

    Returns:
        Frozen ModelParams

    Raises:
        ParameterError: naming the first offending field and its bound
    """
    if isinstance(params, ModelParams):
        return params
    try:
        return ModelParams.model_validate(dict(params))
    except ValidationError as e:
        err = e.errors()[0]
        field = str(err["loc"][0]) if err["loc"] else "?"
        logger.debug(f"Rejected parameters at '{field}': {err['msg']}")
        if err["type"] == "missing":
            raise ParameterError(field, "a value is required") from e
        if err["type"] == "extra_forbidden":
            raise ParameterError(field, f"one of {', '.join(PARAMETER_KEYS)}") from e
        bound = _BOUNDS.get(field, err["msg"])
        raise ParameterError(field, bound, err.get("input")) from e


@dataclass(frozen=True)
class EffectiveRates:
    """Control-adjusted transmission quantities."""
    lambda_eff: float
    p_severe: float
    pair_rate: float


def effective_rates(params: ModelParams) -> EffectiveRates:
    """Apply NPI, vaccination and responsibility re-scaling to the raw rates."""
    lambda_eff = params.lambda_ * (1.0 - params.eta) * (1.0 - params.gamma_t * params.v)
    p_severe = params.p_q * (1.0 - params.gamma_q * params.v)
    return EffectiveRates(
        lambda_eff=lambda_eff,
        p_severe=p_severe,
        pair_rate=2.0 * lambda_eff * (1.0 - params.sigma),
    )


class HealthState(IntEnum):
    """Health compartment of one individual."""
    S = 0
    I = 1
    Q = 2


@dataclass(frozen=True)
class MacroState:
    """Population fractions (y_s, y_i, y_q) on the probability simplex."""
    y_s: float
    y_i: float
    y_q: float

    def __post_init__(self):
        values = (self.y_s, self.y_i, self.y_q)
        if not all(math.isfinite(x) for x in values):
            raise ValueError(f"MacroState components must be finite: {values}")
        if min(values) < -SIMPLEX_TOL:
            raise ValueError(f"MacroState components must be non-negative: {values}")
        if abs(sum(values) - 1.0) > SIMPLEX_TOL:
            raise ValueError(f"MacroState components must sum to 1: {values}")

    @classmethod
    def normalized(cls, y_s: float, y_i: float, y_q: float) -> "MacroState":
        """Clamp negatives to zero and rescale so the triple sums to one."""
        y_s, y_i, y_q = max(y_s, 0.0), max(y_i, 0.0), max(y_q, 0.0)
        total = y_s + y_i + y_q
        if total <= 0.0:
            raise ValueError("Cannot normalize an all-zero state")
        return cls(y_s / total, y_i / total, y_q / total)

    @classmethod
    def disease_free(cls) -> "MacroState":
        return cls(1.0, 0.0, 0.0)

    def as_tuple(self) -> Tuple[float, float, float]:
        return (self.y_s, self.y_i, self.y_q)

    def as_array(self) -> np.ndarray:
        return np.array(self.as_tuple(), dtype=float)

    def distance(self, other: "MacroState") -> float:
        """Max-norm distance to another state."""
        return max(abs(a - b) for a, b in zip(self.as_tuple(), other.as_tuple()))
