"""
Parameter sets of the reference scenarios.
"""
from typing import Any, Dict

# Reference set for the convergence and engine comparison runs
BASELINE = {
    "n": 1000,
    "sigma": 0.4,
    "lambda": 0.2,
    "p_q": 0.2,
    "beta": 0.02,
    "v": 0.5,
    "gamma_t": 0.5,
    "gamma_q": 0.9,
    "eta": 0.2,
    "c_t": 0.05,
}

# mRNA vaccine at the coverage of early November 2021
MRNA = {
    "n": 10000,
    "sigma": 0.4,
    "lambda": 0.36,
    "p_q": 0.19,
    "beta": 0.1,
    "v": 0.821,
    "gamma_t": 0.65,
    "gamma_q": 0.92,
    "eta": 0.19,
    "c_t": 0.06,
}

# Same vaccine after transmission protection wanes to a quarter
MRNA_WANED = {**MRNA, "gamma_t": 0.165}

_RUN_DEFAULTS = {
    "baseline": {"engine": "macro", "init_s": 0.99, "init_i": 0.01, "init_q": 0.0,
                 "horizon": 2000.0, "sampling": 1.0, "seeds": "0"},
    "mrna": {"engine": "macro", "init_s": 0.99, "init_i": 0.01, "init_q": 0.0,
             "horizon": 2000.0, "sampling": 1.0, "seeds": "0"},
}

_SWEEPS = {
    "vaccine-grid": {
        "sweep_x": "gamma_q", "sweep_x_min": 0.0, "sweep_x_max": 1.0, "sweep_x_steps": 21,
        "sweep_y": "gamma_t", "sweep_y_min": 0.0, "sweep_y_max": 1.0, "sweep_y_steps": 21,
        "quantities": "c_t_bar,xi",
    },
    "coverage": {
        "sweep_x": "v", "sweep_x_min": 0.0, "sweep_x_max": 1.0, "sweep_x_steps": 21,
        "sweep_y": "sigma", "sweep_y_min": 0.0, "sweep_y_max": 1.0, "sweep_y_steps": 21,
        "quantities": "c_t_bar,xi",
    },
}


def preset(name: str) -> Dict[str, Any]:
    """
    Flat config mapping for a named scenario.

    Args:
        name: One of PRESET_NAMES

    Returns:
        Mapping ready to be written as a config file
    """
    if name == "baseline":
        return {**BASELINE, **_RUN_DEFAULTS["baseline"]}
    if name == "mrna":
        return {**MRNA, **_RUN_DEFAULTS["mrna"]}
    if name == "mrna-waned":
        return {**MRNA_WANED, **_RUN_DEFAULTS["mrna"]}
    if name == "vaccine-grid":
        base = {k: v for k, v in MRNA.items() if k not in ("gamma_q", "gamma_t")}
        return {**base, **_SWEEPS["vaccine-grid"]}
    if name in ("coverage-grid", "coverage-grid-waned"):
        source = MRNA if name == "coverage-grid" else MRNA_WANED
        base = {k: v for k, v in source.items() if k not in ("v", "sigma")}
        return {**base, **_SWEEPS["coverage"]}
    raise KeyError(f"Unknown preset '{name}'")


PRESET_NAMES = ("baseline", "mrna", "mrna-waned", "vaccine-grid", "coverage-grid", "coverage-grid-waned")
