import numpy as np
import pytest
from pydantic import ValidationError

from app.core.errors import ParameterError
from app.core.model import HealthState, MacroState, effective_rates, validate
from app.core.presets import BASELINE


def test_baseline_parameters_accepted():
    params = validate(BASELINE)
    assert params.lambda_ == 0.2
    assert params.to_dict() == BASELINE


@pytest.mark.parametrize(
    "field, value",
    [
        ("lambda", 1.2),
        ("beta", 0.0),
        ("sigma", -0.1),
        ("gamma_q", 1.5),
        ("c_t", -1.0),
        ("n", 1),
        ("v", float("nan")),
    ],
)
def test_out_of_range_field_is_named(field, value):
    with pytest.raises(ParameterError) as excinfo:
        validate({**BASELINE, field: value})
    assert excinfo.value.field == field
    assert field in str(excinfo.value)


def test_missing_field_is_named():
    raw = {k: v for k, v in BASELINE.items() if k != "eta"}
    with pytest.raises(ParameterError) as excinfo:
        validate(raw)
    assert excinfo.value.field == "eta"


def test_string_values_are_coerced():
    params = validate({k: str(v) for k, v in BASELINE.items()})
    assert params == validate(BASELINE)


def test_params_are_frozen(baseline_params):
    with pytest.raises(ValidationError):
        baseline_params.sigma = 0.9


def test_with_updates_revalidates(baseline_params):
    assert baseline_params.with_updates(lambda_=0.3).lambda_ == 0.3
    with pytest.raises(ParameterError):
        baseline_params.with_updates(sigma=2.0)


def test_effective_rates_baseline(baseline_params):
    rates = effective_rates(baseline_params)
    assert rates.lambda_eff == pytest.approx(0.12, abs=1e-12)
    assert rates.p_severe == pytest.approx(0.11, abs=1e-12)
    assert rates.pair_rate == pytest.approx(0.144, abs=1e-12)


def test_no_controls_leave_rates_untouched(baseline_params):
    rates = effective_rates(baseline_params.with_updates(v=0.0, eta=0.0))
    assert rates.lambda_eff == baseline_params.lambda_
    assert rates.p_severe == baseline_params.p_q


def test_perfect_transmission_blocking(baseline_params):
    rates = effective_rates(baseline_params.with_updates(gamma_t=1.0, v=1.0))
    assert rates.lambda_eff == 0.0
    assert rates.pair_rate == 0.0


@pytest.mark.parametrize("control", ["eta", "v"])
def test_raising_controls_never_raises_rates(baseline_params, control):
    values = np.linspace(0.0, 1.0, 21)
    rates = [effective_rates(baseline_params.with_updates(**{control: x})) for x in values]
    lambdas = np.array([r.lambda_eff for r in rates])
    severe = np.array([r.p_severe for r in rates])
    assert np.all(np.diff(lambdas) <= 0.0)
    assert np.all(np.diff(severe) <= 0.0)
    assert np.all(lambdas <= baseline_params.lambda_)
    assert np.all(severe <= baseline_params.p_q)
    assert np.all(lambdas >= 0.0) and np.all(severe >= 0.0)


def test_macro_state_invariants():
    assert MacroState(0.5, 0.25, 0.25).as_tuple() == (0.5, 0.25, 0.25)
    with pytest.raises(ValueError):
        MacroState(0.5, 0.5, 0.5)
    with pytest.raises(ValueError):
        MacroState(1.1, -0.1, 0.0)


def test_macro_state_normalization():
    state = MacroState.normalized(2.0, 1.0, -1e-13)
    assert sum(state.as_tuple()) == pytest.approx(1.0, abs=1e-12)
    assert state.y_q == 0.0
    assert state.distance(MacroState(2 / 3, 1 / 3, 0.0)) < 1e-12


def test_health_state_codes():
    assert [int(s) for s in HealthState] == [0, 1, 2]
