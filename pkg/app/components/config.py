"""
Flat ``key = value`` configuration files for runs and sweeps.
"""
from typing import Any, Dict, List, Mapping, Optional, Tuple
from dataclasses import dataclass
from pathlib import Path
import logging

from dotenv import dotenv_values
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from app.core.errors import ConfigError, ParameterError
from app.core.model import PARAMETER_KEYS, MacroState, ModelParams, validate
from app.core.stochastic import PopulationState
from app.core.trajectory import Engine
from app.tools.sweep import SWEEP_QUANTITIES, Axis

logger = logging.getLogger(__name__)

FRACTION_KEYS = ("init_s", "init_i", "init_q")
COUNT_KEYS = ("count_s", "count_i", "count_q")
RUN_KEYS = ("engine", "horizon", "sampling", "seeds", "out", "sizes") + FRACTION_KEYS + COUNT_KEYS
SWEEP_KEYS = tuple(
    f"sweep_{axis}{suffix}" for axis in ("x", "y") for suffix in ("", "_min", "_max", "_steps")
) + ("quantities",)

DEFAULT_FRACTIONS = (0.99, 0.01, 0.0)


def _parse_int_list(text: str, key: str) -> Tuple[int, ...]:
    """Comma list of integers; ``a:b`` expands to range(a, b)."""
    values: List[int] = []
    try:
        for item in text.split(","):
            item = item.strip()
            if not item:
                continue
            if ":" in item:
                start, stop = item.split(":", 1)
                values.extend(range(int(start), int(stop)))
            else:
                values.append(int(item))
    except ValueError as e:
        raise ConfigError(f"Invalid integer list for '{key}': {text!r}") from e
    if not values:
        raise ConfigError(f"'{key}' must list at least one value")
    return tuple(values)


class RunConfig(BaseModel):
    """A single run: parameters, engine, initial condition, grid, seeds."""

    model_config = ConfigDict(frozen=True)

    params: ModelParams
    engine: Engine = Engine.MACRO
    init_fractions: Optional[Tuple[float, float, float]] = None
    init_counts: Optional[Tuple[int, int, int]] = None
    horizon: float = Field(default=1000.0, gt=0.0)
    sampling: float = Field(default=1.0, gt=0.0)
    seeds: Tuple[int, ...] = (0,)
    sizes: Optional[Tuple[int, ...]] = None
    out: str = "siq"

    @model_validator(mode="after")
    def _check_initial_condition(self) -> "RunConfig":
        if self.init_fractions is not None and self.init_counts is not None:
            raise ValueError("give either init_* fractions or count_* counts, not both")
        if self.init_fractions is not None:
            if min(self.init_fractions) < 0.0 or abs(sum(self.init_fractions) - 1.0) > 1e-9:
                raise ValueError(f"init fractions must be non-negative and sum to 1, got {self.init_fractions}")
        if self.init_counts is not None:
            if min(self.init_counts) < 0 or sum(self.init_counts) != self.params.n:
                raise ValueError(f"counts must be non-negative and sum to n={self.params.n}, got {self.init_counts}")
        if any(seed < 0 for seed in self.seeds):
            raise ValueError("seeds must be non-negative")
        if not self.seeds:
            raise ValueError("at least one seed is required")
        return self

    def initial_macro(self) -> MacroState:
        if self.init_counts is not None:
            return MacroState.normalized(*self.init_counts)
        return MacroState.normalized(*(self.init_fractions or DEFAULT_FRACTIONS))

    def initial_counts(self, n: Optional[int] = None) -> PopulationState:
        """Counts for population size n (defaults to params.n)."""
        n = n or self.params.n
        if self.init_counts is not None and n == self.params.n:
            return PopulationState(*self.init_counts)
        return PopulationState.from_fractions(n, self.initial_macro())

    def to_mapping(self) -> Dict[str, str]:
        mapping = {key: repr(value) if isinstance(value, float) else str(value)
                   for key, value in self.params.to_dict().items()}
        mapping["engine"] = self.engine.value
        if self.init_fractions is not None:
            mapping.update({k: repr(float(v)) for k, v in zip(FRACTION_KEYS, self.init_fractions)})
        if self.init_counts is not None:
            mapping.update({k: str(v) for k, v in zip(COUNT_KEYS, self.init_counts)})
        mapping["horizon"] = repr(float(self.horizon))
        mapping["sampling"] = repr(float(self.sampling))
        mapping["seeds"] = ",".join(str(s) for s in self.seeds)
        if self.sizes is not None:
            mapping["sizes"] = ",".join(str(s) for s in self.sizes)
        mapping["out"] = self.out
        return mapping

    def to_text(self) -> str:
        return "".join(f"{key} = {value}\n" for key, value in self.to_mapping().items())


def parse_run_config(raw: Mapping[str, Optional[str]]) -> RunConfig:
    """
    Build a RunConfig from a flat string mapping.

    Raises:
        ParameterError: missing or out-of-range model parameter
        ConfigError: anything else malformed
    """
    unknown = sorted(set(raw) - set(PARAMETER_KEYS) - set(RUN_KEYS))
    if unknown:
        raise ConfigError(f"Unknown run config keys: {', '.join(unknown)}")
    params = validate({k: raw[k] for k in PARAMETER_KEYS if k in raw})

    fields: Dict[str, Any] = {"params": params}
    if raw.get("engine"):
        try:
            fields["engine"] = Engine(raw["engine"].strip())
        except ValueError as e:
            tags = ", ".join(engine.value for engine in Engine)
            raise ConfigError(f"Unknown engine '{raw['engine']}' (expected one of {tags})") from e
    if any(k in raw for k in FRACTION_KEYS):
        fields["init_fractions"] = tuple(_float(raw, k, 0.0) for k in FRACTION_KEYS)
    if any(k in raw for k in COUNT_KEYS):
        fields["init_counts"] = tuple(_integer(raw, k, 0) for k in COUNT_KEYS)
    for key in ("horizon", "sampling"):
        if raw.get(key):
            fields[key] = _float(raw, key)
    if raw.get("seeds"):
        fields["seeds"] = _parse_int_list(raw["seeds"], "seeds")
    if raw.get("sizes"):
        fields["sizes"] = _parse_int_list(raw["sizes"], "sizes")
    if raw.get("out"):
        fields["out"] = raw["out"].strip()

    try:
        return RunConfig(**fields)
    except ValidationError as e:
        raise ConfigError(f"Invalid run config: {e.errors()[0]['msg']}") from e


def _float(raw: Mapping[str, Optional[str]], key: str, default: Optional[float] = None) -> float:
    value = raw.get(key)
    if value is None or str(value).strip() == "":
        if default is None:
            raise ConfigError(f"'{key}' needs a value")
        return default
    try:
        return float(value)
    except ValueError as e:
        raise ConfigError(f"'{key}' must be a number, got {value!r}") from e


def _integer(raw: Mapping[str, Optional[str]], key: str, default: Optional[int] = None) -> int:
    value = _float(raw, key, None if default is None else float(default))
    if not value.is_integer():
        raise ConfigError(f"'{key}' must be a whole number, got {raw.get(key)!r}")
    return int(value)


def read_flat_file(path: str | Path) -> Dict[str, Optional[str]]:
    """Read a ``key = value`` file; ``#`` starts a comment."""
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"Config file not found: {path}")
    try:
        return dict(dotenv_values(path, interpolate=False))
    except Exception as e:
        logger.error(f"Error reading config file {path}: {e}")
        raise


def load_run_config(path: str | Path) -> RunConfig:
    config = parse_run_config(read_flat_file(path))
    logger.info(f"Loaded {config.engine.value} run config from {path}")
    return config


@dataclass(frozen=True)
class SweepConfig:
    """Base parameters (swept keys may be missing), two axes and the output quantities."""
    base: Dict[str, Any]
    x: Axis
    y: Axis
    quantities: Tuple[str, ...]
    out: str = "siq"


def parse_sweep_config(raw: Mapping[str, Optional[str]]) -> SweepConfig:
    unknown = sorted(set(raw) - set(PARAMETER_KEYS) - set(SWEEP_KEYS) - {"out"})
    if unknown:
        raise ConfigError(f"Unknown sweep config keys: {', '.join(unknown)}")

    axes = []
    for axis in ("x", "y"):
        name = (raw.get(f"sweep_{axis}") or "").strip()
        if not name:
            raise ConfigError(f"'sweep_{axis}' is required")
        axes.append(Axis(
            name=name,
            minimum=_float(raw, f"sweep_{axis}_min"),
            maximum=_float(raw, f"sweep_{axis}_max"),
            steps=_integer(raw, f"sweep_{axis}_steps"),
        ))
    x, y = axes
    if x.name == y.name:
        raise ConfigError(f"Swept parameters must differ, got '{x.name}' twice")

    quantities = tuple(
        q.strip() for q in (raw.get("quantities") or ",".join(SWEEP_QUANTITIES)).split(",") if q.strip()
    )
    base = {k: raw[k] for k in PARAMETER_KEYS if k in raw and k not in (x.name, y.name)}
    missing = [k for k in PARAMETER_KEYS if k not in base and k not in (x.name, y.name)]
    if missing:
        raise ParameterError(missing[0], "a value is required")
    return SweepConfig(base=base, x=x, y=y, quantities=quantities, out=(raw.get("out") or "siq").strip())


def load_sweep_config(path: str | Path) -> SweepConfig:
    config = parse_sweep_config(read_flat_file(path))
    logger.info(f"Loaded sweep config {config.x.name} x {config.y.name} from {path}")
    return config


def write_flat_file(mapping: Mapping[str, Any], path: str | Path) -> Path:
    """Write a mapping as ``key = value`` lines."""
    path = Path(path)
    try:
        path.write_text("".join(f"{key} = {value}\n" for key, value in mapping.items()))
        logger.info(f"Config written to {path}")
        return path
    except Exception as e:
        logger.error(f"Error writing config file {path}: {e}")
        raise
