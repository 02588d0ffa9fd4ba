import logging

import numpy as np
import pytest

from app.core.analysis import (
    Regime,
    analyze,
    coverage_turning_point,
    critical_eta,
    critical_sigma,
    d_ctbar_dv,
    d_xi_dv,
    disease_free_eigenvalues,
    dulac_divergence,
    endemic_equilibrium,
    epidemic_threshold,
    favours_eradication_at_start,
    regime,
    severe_prevalence,
    threshold_gradient,
    vaccination_effect,
)
from app.core.errors import UndefinedCriticalValueError
from app.core.meanfield import integrate, macro_rhs
from app.core.model import MacroState, effective_rates
from tests.conftest import random_params

FIELD_NAMES = {"lambda": "lambda_"}


def _shift(params, key, delta):
    name = FIELD_NAMES.get(key, key)
    return params.model_copy(update={name: getattr(params, name) + delta})


def _central_difference(func, params, key, h=1e-6):
    return (func(_shift(params, key, h)) - func(_shift(params, key, -h))) / (2.0 * h)


def test_baseline_report(baseline_params):
    assert epidemic_threshold(baseline_params) == pytest.approx(0.10816, abs=1e-9)
    assert critical_sigma(baseline_params) == pytest.approx(0.672285, abs=1e-6)
    assert critical_eta(baseline_params) == pytest.approx(0.563046, abs=1e-6)
    equilibrium = endemic_equilibrium(baseline_params)
    assert equilibrium.distance(MacroState(0.546192, 0.115397, 0.338411)) < 1e-6
    assert severe_prevalence(baseline_params) == pytest.approx(0.0499189, abs=1e-7)
    assert d_ctbar_dv(baseline_params) == pytest.approx(-0.05952, abs=1e-9)
    assert d_xi_dv(baseline_params) == pytest.approx(-0.109588, abs=1e-6)
    assert regime(baseline_params) is Regime.ENDEMIC


def test_mrna_thresholds(mrna_params, waned_params):
    assert epidemic_threshold(mrna_params) == pytest.approx(0.055598, abs=2e-6)
    assert regime(mrna_params) is Regime.DISEASE_FREE
    assert severe_prevalence(mrna_params) == 0.0
    assert d_xi_dv(mrna_params) == 0.0

    assert epidemic_threshold(waned_params) == pytest.approx(0.188454, abs=2e-6)
    assert regime(waned_params) is Regime.ENDEMIC
    y_s = endemic_equilibrium(waned_params).y_s
    assert severe_prevalence(waned_params) == pytest.approx(
        (1.0 - y_s) * effective_rates(waned_params).p_severe, rel=1e-12
    )


def test_mrna_long_runs_follow_the_threshold(mrna_params, waned_params):
    start = MacroState(0.99, 0.01, 0.0)
    fresh = integrate(mrna_params, start, horizon=5000.0, sampling=10.0).final_state()
    assert fresh.y_i < 1e-6
    waned = integrate(waned_params, start, horizon=5000.0, sampling=10.0).final_state()
    assert waned.distance(endemic_equilibrium(waned_params)) < 1e-6
    assert waned.distance(MacroState(0.55468, 0.26539, 0.17993)) < 1e-5


def test_waned_vaccine_turning_point(waned_params):
    turning = coverage_turning_point(waned_params)
    assert turning == pytest.approx(0.71337, abs=1e-5)
    assert d_ctbar_dv(waned_params.with_updates(v=0.5)) > 0.0
    assert d_ctbar_dv(waned_params.with_updates(v=0.9)) < 0.0
    assert not favours_eradication_at_start(waned_params)


def test_waned_vaccine_threshold_is_flat_in_coverage(waned_params):
    slopes = [abs(d_ctbar_dv(waned_params.with_updates(v=v))) for v in np.linspace(0.0, 1.0, 101)]
    assert max(slopes) == pytest.approx(0.0144, abs=1e-4)
    assert int(np.argmax(slopes)) == 0
    assert max(slopes) < 0.015
    fresh = [abs(d_ctbar_dv(waned_params.with_updates(gamma_t=0.65, v=v))) for v in np.linspace(0.0, 1.0, 101)]
    assert max(slopes) < 0.1 * max(fresh)


def test_fresh_vaccine_lowers_threshold_from_the_start(mrna_params, baseline_params):
    assert favours_eradication_at_start(mrna_params)
    assert favours_eradication_at_start(baseline_params)
    assert d_ctbar_dv(mrna_params.with_updates(v=0.0)) < 0.0


def test_boundary_is_disease_free(baseline_params):
    boundary = baseline_params.model_copy(update={"c_t": epidemic_threshold(baseline_params)})
    assert regime(boundary) is Regime.DISEASE_FREE
    assert endemic_equilibrium(boundary) == MacroState.disease_free()
    assert severe_prevalence(boundary) == 0.0


def test_negative_threshold_needs_no_testing(baseline_params):
    params = baseline_params.with_updates(beta=0.5, c_t=0.0)
    assert epidemic_threshold(params) < 0.0
    assert regime(params) is Regime.DISEASE_FREE


def test_undefined_critical_values(baseline_params):
    params = baseline_params.with_updates(lambda_=0.0)
    with pytest.raises(UndefinedCriticalValueError) as excinfo:
        critical_sigma(params)
    assert excinfo.value.name == "sigma_bar"
    with pytest.raises(UndefinedCriticalValueError):
        critical_eta(params)
    report = analyze(params).to_dict()
    assert report["sigma_bar"] is None and report["sigma_bar_reason"]
    assert report["eta_bar"] is None and report["eta_bar_reason"]
    assert report["regime"] == "disease-free"


def test_critical_values_invert_the_threshold():
    for params in random_params(50, seed=3):
        sigma_bar = critical_sigma(params)
        at_sigma = params.model_copy(update={"sigma": sigma_bar})
        assert epidemic_threshold(at_sigma) == pytest.approx(params.c_t, abs=1e-12)
        eta_bar = critical_eta(params)
        at_eta = params.model_copy(update={"eta": eta_bar})
        assert epidemic_threshold(at_eta) == pytest.approx(params.c_t, abs=1e-12)


def test_critical_sigma_separates_regimes(baseline_params):
    sigma_bar = critical_sigma(baseline_params)
    assert regime(baseline_params.with_updates(sigma=sigma_bar - 0.01)) is Regime.ENDEMIC
    assert regime(baseline_params.with_updates(sigma=sigma_bar + 0.01)) is Regime.DISEASE_FREE


def test_equilibrium_solves_the_macro_system():
    endemic = [p for p in random_params(60, seed=8) if regime(p) is Regime.ENDEMIC]
    assert len(endemic) >= 5
    for params in endemic:
        state = endemic_equilibrium(params)
        assert max(abs(x) for x in macro_rhs(params, state)) < 1e-12
        assert min(state.as_tuple()) >= 0.0


def test_equilibrium_product_form_holds(caplog):
    with caplog.at_level(logging.WARNING, logger="app.core.analysis"):
        for params in random_params(40, seed=12):
            endemic_equilibrium(params)
    assert not caplog.records


def test_threshold_predicts_long_run_behaviour():
    candidates = random_params(120, seed=21)
    separated = [p for p in candidates if abs(p.c_t - epidemic_threshold(p)) >= 0.05][:12]
    assert len(separated) == 12
    start = MacroState(0.9, 0.1, 0.0)
    for params in separated:
        final = integrate(params, start, horizon=2000.0, sampling=10.0).final_state()
        if regime(params) is Regime.ENDEMIC:
            assert final.distance(endemic_equilibrium(params)) < 1e-3
        else:
            assert final.y_i < 1e-6


@pytest.mark.slow
def test_threshold_predicts_long_run_behaviour_wide():
    candidates = random_params(400, seed=22)
    separated = [p for p in candidates if abs(p.c_t - epidemic_threshold(p)) >= 0.05][:100]
    start = MacroState(0.9, 0.1, 0.0)
    for params in separated:
        final = integrate(params, start, horizon=2000.0, sampling=10.0).final_state()
        if regime(params) is Regime.ENDEMIC:
            assert final.distance(endemic_equilibrium(params)) < 1e-3
        else:
            assert final.y_i < 1e-6


def _interior_coverage(sets, seed):
    """Redraw v away from the ends of [0, 1]."""
    rng = np.random.default_rng(seed)
    return [params.with_updates(v=float(rng.uniform(0.05, 0.95))) for params in sets]


def test_coverage_derivative_matches_finite_difference():
    for params in _interior_coverage(random_params(100, seed=4), seed=5):
        numeric = _central_difference(epidemic_threshold, params, "v", h=1e-5)
        assert d_ctbar_dv(params) == pytest.approx(numeric, abs=1e-6)


def test_prevalence_derivative_matches_finite_difference():
    candidates = _interior_coverage(random_params(10000, seed=6), seed=7)
    endemic = [p for p in candidates if epidemic_threshold(p) - p.c_t > 0.05][:100]
    assert len(endemic) == 100
    for params in endemic:
        numeric = _central_difference(severe_prevalence, params, "v", h=1e-5)
        assert d_xi_dv(params) == pytest.approx(numeric, abs=1e-6)


def test_threshold_gradient_matches_finite_differences():
    for params in random_params(10, seed=9, gamma_t=0.5, gamma_q=0.5, v=0.5):
        gradient = threshold_gradient(params)
        for key, value in gradient.items():
            numeric = _central_difference(epidemic_threshold, params, key)
            assert value == pytest.approx(numeric, abs=1e-7), key


def test_threshold_decreases_with_each_control(baseline_params):
    grid = np.linspace(0.0, 1.0, 21)
    for key in ("sigma", "eta"):
        values = [epidemic_threshold(baseline_params.with_updates(**{key: x})) for x in grid]
        assert np.all(np.diff(values) <= 0.0), key
    gradient = threshold_gradient(baseline_params)
    assert gradient["sigma"] < 0 and gradient["eta"] < 0 and gradient["beta"] == -1.0


def test_infectious_equilibrium_falls_with_testing(baseline_params):
    rates = np.linspace(0.0, 0.1, 11)
    y_i = [endemic_equilibrium(baseline_params.with_updates(c_t=c)).y_i for c in rates]
    assert np.all(np.diff(y_i) < 0.0)


def test_disease_free_eigenvalues(baseline_params):
    quarantine, infectious = disease_free_eigenvalues(baseline_params)
    assert quarantine == -0.02
    assert infectious == pytest.approx(0.05816, abs=1e-12)
    assert disease_free_eigenvalues(baseline_params.with_updates(c_t=0.2))[1] < 0.0


def test_dulac_divergence_is_negative(baseline_params):
    for y_s in np.linspace(0.05, 0.95, 10):
        for y_i in np.linspace(0.01, 1.0 - y_s, 10):
            assert dulac_divergence(baseline_params, y_s, y_i) < 0.0
    with pytest.raises(ValueError):
        dulac_divergence(baseline_params, 0.5, 0.0)


def test_vaccination_effect_labels():
    assert vaccination_effect(-0.1) == "reduces severe prevalence"
    assert vaccination_effect(0.1) == "increases severe prevalence"
    assert vaccination_effect(0.0) == "no effect"


def test_report_document(baseline_params):
    document = analyze(baseline_params).to_dict()
    assert document["regime"] == "endemic"
    assert document["vaccination_effect"] == "reduces severe prevalence"
    assert document["y_s_star"] == pytest.approx(0.546192, abs=1e-6)
    assert document["sigma_bar_reason"] is None
    assert document["coverage_turning_point"] == pytest.approx(-1.222222, abs=1e-6)
    assert document["favours_eradication_at_start"] is True
