import numpy as np
import pytest

from app.core.analysis import analyze
from app.core.errors import ConfigError, ParameterError
from app.core.model import validate
from app.core.presets import MRNA, MRNA_WANED
from app.tools.sweep import Axis, grid_matrix, sweep, sweep_summary


def _without(source, *keys):
    return {k: v for k, v in source.items() if k not in keys}


@pytest.fixture(scope="module")
def vaccine_grid():
    base = _without(MRNA, "gamma_q", "gamma_t")
    return sweep(base, Axis("gamma_q", 0.0, 1.0, 21), Axis("gamma_t", 0.0, 1.0, 21), ["c_t_bar", "xi"])


@pytest.fixture(scope="module", params=[MRNA, MRNA_WANED], ids=["fresh", "waned"])
def coverage_grid(request):
    base = _without(request.param, "v", "sigma")
    return sweep(base, Axis("v", 0.0, 1.0, 21), Axis("sigma", 0.0, 1.0, 21), ["c_t_bar", "xi", "regime"])


def test_grid_layout(vaccine_grid):
    assert list(vaccine_grid.columns) == ["gamma_q", "gamma_t", "quantity", "value"]
    assert len(vaccine_grid) == 21 * 21 * 2
    assert vaccine_grid["quantity"].iloc[:2].tolist() == ["c_t_bar", "xi"]
    assert grid_matrix(vaccine_grid, "c_t_bar").shape == (21, 21)


def test_threshold_falls_with_transmission_protection(vaccine_grid):
    threshold = grid_matrix(vaccine_grid, "c_t_bar").to_numpy()
    assert np.all(np.diff(threshold, axis=1) <= 1e-15)
    assert np.all(np.diff(threshold, axis=0) >= -1e-15)


def test_prevalence_falls_with_transmission_protection(vaccine_grid):
    xi = grid_matrix(vaccine_grid, "xi").to_numpy()
    assert np.all(np.diff(xi, axis=1) <= 1e-15)
    assert np.all(xi >= 0.0)


def test_responsibility_lowers_threshold_and_prevalence(coverage_grid):
    threshold = grid_matrix(coverage_grid, "c_t_bar").to_numpy()
    xi = grid_matrix(coverage_grid, "xi").to_numpy()
    assert np.all(np.diff(threshold, axis=1) <= 1e-15)
    assert np.all(np.diff(xi, axis=1) <= 1e-15)


def test_fresh_vaccine_coverage_lowers_threshold_and_prevalence():
    base = _without(MRNA, "v", "sigma")
    frame = sweep(base, Axis("v", 0.0, 1.0, 21), Axis("sigma", 0.0, 1.0, 21), ["c_t_bar", "xi"])
    for quantity in ("c_t_bar", "xi"):
        values = grid_matrix(frame, quantity).to_numpy()
        assert np.all(np.diff(values, axis=0) <= 1e-15), quantity
        assert np.all(np.diff(values, axis=1) <= 1e-15), quantity


def test_regime_encoding_matches_threshold(coverage_grid):
    threshold = grid_matrix(coverage_grid, "c_t_bar").to_numpy()
    endemic = grid_matrix(coverage_grid, "regime").to_numpy()
    assert set(np.unique(endemic)) <= {0.0, 1.0}
    assert np.array_equal(endemic == 1.0, MRNA["c_t"] < threshold)


def test_single_point_sweep_matches_report():
    base = _without(MRNA_WANED, "v", "eta")
    frame = sweep(base, Axis("v", 0.3, 0.3, 1), Axis("eta", 0.25, 0.25, 1), ["c_t_bar", "xi", "y_i_star", "y_q_star"])
    report = analyze(validate({**base, "v": 0.3, "eta": 0.25})).to_dict()
    values = dict(zip(frame["quantity"], frame["value"]))
    for quantity, value in values.items():
        assert value == report[quantity]


def test_workers_do_not_change_results():
    base = _without(MRNA, "v", "sigma")
    x, y = Axis("v", 0.0, 1.0, 5), Axis("sigma", 0.0, 0.8, 4)
    assert sweep(base, x, y, ["xi"], workers=2).equals(sweep(base, x, y, ["xi"]))


def test_summary_bounds(vaccine_grid):
    summary = sweep_summary(vaccine_grid)
    assert set(summary) == {"c_t_bar", "xi"}
    assert summary["xi"]["min"] == 0.0
    assert summary["c_t_bar"]["min"] < summary["c_t_bar"]["max"]


@pytest.mark.parametrize(
    "name, minimum, maximum, steps",
    [("kappa", 0.0, 1.0, 3), ("v", 0.0, 1.0, 0), ("v", 1.0, 0.0, 3)],
)
def test_invalid_axis(name, minimum, maximum, steps):
    with pytest.raises(ConfigError):
        Axis(name, minimum, maximum, steps)


def test_invalid_sweeps():
    base = _without(MRNA, "v", "eta")
    with pytest.raises(ConfigError):
        sweep(base, Axis("v", 0.0, 1.0, 3), Axis("v", 0.0, 1.0, 3), ["xi"])
    with pytest.raises(ConfigError):
        sweep(base, Axis("v", 0.0, 1.0, 3), Axis("eta", 0.0, 1.0, 3), ["r0"])
    with pytest.raises(ParameterError):
        sweep(base, Axis("v", 0.0, 1.0, 3), Axis("eta", 0.0, 1.5, 3), ["xi"])
