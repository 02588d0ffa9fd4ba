"""
Closed-form results of the mean-field model: epidemic threshold, critical
control levels, endemic equilibrium, severe-illness prevalence and their
sensitivities to vaccination coverage.
"""
from typing import Any, Dict, Optional, Tuple
from dataclasses import dataclass
from enum import Enum
import logging

from app.core.errors import UndefinedCriticalValueError
from app.core.model import MacroState, ModelParams, effective_rates

logger = logging.getLogger(__name__)

PRODUCT_FORM_TOL = 1e-10


class Regime(str, Enum):
    DISEASE_FREE = "disease-free"
    ENDEMIC = "endemic"


def _transmission_base(params: ModelParams) -> float:
    """2(1 - eta) lambda (1 - gamma_t v): contact scale without the responsibility factor."""
    return 2.0 * (1.0 - params.eta) * params.lambda_ * (1.0 - params.gamma_t * params.v)


def _mild_share(params: ModelParams) -> float:
    """1 - p_q (1 - gamma_q v)."""
    return 1.0 - effective_rates(params).p_severe


def epidemic_threshold(params: ModelParams) -> float:
    """Critical testing rate; may be negative, in which case no testing is needed."""
    return _transmission_base(params) * (1.0 - params.sigma) * _mild_share(params) - params.beta


def regime(params: ModelParams) -> Regime:
    """Endemic iff c_t < c_t_bar; the boundary itself is disease-free."""
    if params.c_t < epidemic_threshold(params):
        return Regime.ENDEMIC
    return Regime.DISEASE_FREE


def critical_sigma(params: ModelParams) -> float:
    """
    Responsibility level above which the disease-free equilibrium is stable.

    Uses the actual testing rate c_t in the numerator, so that
    epidemic_threshold(params with sigma = result) == c_t.

    Raises:
        UndefinedCriticalValueError: if transmission is impossible regardless of sigma
    """
    denominator = _transmission_base(params) * _mild_share(params)
    if denominator <= 0.0:
        raise UndefinedCriticalValueError(
            "sigma_bar", "transmission is impossible for every responsibility level"
        )
    return 1.0 - (params.beta + params.c_t) / denominator


def critical_eta(params: ModelParams) -> float:
    """NPI effectiveness above which the disease-free equilibrium is stable."""
    denominator = (
        2.0 * (1.0 - params.sigma) * params.lambda_
        * (1.0 - params.gamma_t * params.v) * _mild_share(params)
    )
    if denominator <= 0.0:
        raise UndefinedCriticalValueError(
            "eta_bar", "transmission is impossible for every NPI effectiveness"
        )
    return 1.0 - (params.beta + params.c_t) / denominator


def endemic_equilibrium(params: ModelParams) -> MacroState:
    """
    Globally attracting equilibrium of the macroscopic system.

    Returns (1, 0, 0) when c_t >= c_t_bar.
    """
    if regime(params) is Regime.DISEASE_FREE:
        logger.debug("Disease-free regime: equilibrium is (1, 0, 0)")
        return MacroState.disease_free()

    contact = _transmission_base(params) * (1.0 - params.sigma)
    mild = _mild_share(params)
    recovery_and_testing = params.beta + params.c_t

    y_s = recovery_and_testing / (contact * mild)
    y_i = params.beta * mild / recovery_and_testing - params.beta / contact
    y_q = 1.0 - y_s - y_i

    product_form = (1.0 - params.beta * mild / recovery_and_testing) * (1.0 - y_s)
    if abs(product_form - y_q) > PRODUCT_FORM_TOL:
        logger.warning(f"Equilibrium y_q mismatch: {y_q!r} vs product form {product_form!r}")
    return MacroState(y_s, y_i, y_q)


def severe_prevalence(params: ModelParams) -> float:
    """Steady-state fraction of the population with severe symptoms."""
    if regime(params) is Regime.DISEASE_FREE:
        return 0.0
    y_s = endemic_equilibrium(params).y_s
    return (1.0 - y_s) * effective_rates(params).p_severe


def d_ctbar_dv(params: ModelParams) -> float:
    """Derivative of the epidemic threshold with respect to vaccination coverage."""
    p_q, g_t, g_q, v = params.p_q, params.gamma_t, params.gamma_q, params.v
    scale = 2.0 * (1.0 - params.eta) * (1.0 - params.sigma) * params.lambda_
    return scale * (p_q * g_q - g_t * (1.0 - p_q) - 2.0 * p_q * g_t * g_q * v)


def d_xi_dv(params: ModelParams) -> float:
    """
    Derivative of severe prevalence with respect to vaccination coverage.

    Zero in the disease-free regime, where severe prevalence vanishes identically.
    """
    if regime(params) is Regime.DISEASE_FREE:
        return 0.0
    p_q, g_q, v = params.p_q, params.gamma_q, params.v
    beta_ct = params.beta + params.c_t
    beta_ctbar = params.beta + epidemic_threshold(params)
    return (
        beta_ct / beta_ctbar ** 2 * d_ctbar_dv(params) * p_q * (1.0 - g_q * v)
        - (1.0 - beta_ct / beta_ctbar) * p_q * g_q
    )


def threshold_gradient(params: ModelParams) -> Dict[str, float]:
    """Partial derivatives of the epidemic threshold with respect to each parameter."""
    sigma, eta, lam = params.sigma, params.eta, params.lambda_
    p_q, g_t, g_q, v = params.p_q, params.gamma_t, params.gamma_q, params.v
    mild = _mild_share(params)
    vac_t = 1.0 - g_t * v
    contact = 2.0 * (1.0 - eta) * (1.0 - sigma) * lam * vac_t
    return {
        "sigma": -2.0 * (1.0 - eta) * lam * vac_t * mild,
        "eta": -2.0 * (1.0 - sigma) * lam * vac_t * mild,
        "lambda": 2.0 * (1.0 - eta) * (1.0 - sigma) * vac_t * mild,
        "p_q": -contact * (1.0 - g_q * v),
        "beta": -1.0,
        "gamma_t": -2.0 * (1.0 - eta) * (1.0 - sigma) * lam * v * mild,
        "gamma_q": contact * p_q * v,
        "v": d_ctbar_dv(params),
    }


def coverage_turning_point(params: ModelParams) -> Optional[float]:
    """
    Coverage at which d c_t_bar / dv changes sign.

    Returns None when the derivative's sign does not depend on v. The root
    may fall outside [0, 1].
    """
    p_q, g_t, g_q = params.p_q, params.gamma_t, params.gamma_q
    slope = 2.0 * p_q * g_t * g_q
    if slope == 0.0:
        return None
    return (p_q * g_q - g_t * (1.0 - p_q)) / slope


def favours_eradication_at_start(params: ModelParams) -> bool:
    """True when the first vaccinations lower the threshold: gamma_t (1 - p_q) > p_q gamma_q."""
    return params.gamma_t * (1.0 - params.p_q) > params.p_q * params.gamma_q


def disease_free_eigenvalues(params: ModelParams) -> Tuple[float, float]:
    """Eigenvalues of the (y_i, y_q) linearization at the disease-free state."""
    return (-params.beta, epidemic_threshold(params) - params.c_t)


def dulac_divergence(params: ModelParams, y_s: float, y_i: float) -> float:
    """
    Divergence of phi * f with phi = 1 / (y_s y_i) on the (y_s, y_i) plane.

    Strictly negative on the interior of the simplex, so the macroscopic
    system has no periodic orbits.
    """
    if y_s <= 0.0 or y_i <= 0.0:
        raise ValueError("Dulac function is defined for y_s > 0 and y_i > 0 only")
    return -params.beta / y_s ** 2 * (1.0 + (1.0 - y_i) / y_i)


def vaccination_effect(derivative: float) -> str:
    if derivative < 0.0:
        return "reduces severe prevalence"
    if derivative > 0.0:
        return "increases severe prevalence"
    return "no effect"


@dataclass(frozen=True)
class AnalysisReport:
    """Bundle of every closed-form quantity for one parameter set."""
    c_t_bar: float
    sigma_bar: Optional[float]
    sigma_bar_reason: Optional[str]
    eta_bar: Optional[float]
    eta_bar_reason: Optional[str]
    equilibrium: MacroState
    xi: float
    d_ctbar_dv: float
    d_xi_dv: float
    regime: Regime
    vaccination_effect: str
    coverage_turning_point: Optional[float]
    favours_eradication_at_start: bool
    eigenvalues: Tuple[float, float]

    def to_dict(self) -> Dict[str, Any]:
        """Flat key-value document; the equilibrium is spread over y_*_star keys."""
        return {
            "c_t_bar": self.c_t_bar,
            "sigma_bar": self.sigma_bar,
            "sigma_bar_reason": self.sigma_bar_reason,
            "eta_bar": self.eta_bar,
            "eta_bar_reason": self.eta_bar_reason,
            "y_s_star": self.equilibrium.y_s,
            "y_i_star": self.equilibrium.y_i,
            "y_q_star": self.equilibrium.y_q,
            "xi": self.xi,
            "d_ctbar_dv": self.d_ctbar_dv,
            "d_xi_dv": self.d_xi_dv,
            "regime": self.regime.value,
            "vaccination_effect": self.vaccination_effect,
            "coverage_turning_point": self.coverage_turning_point,
            "favours_eradication_at_start": self.favours_eradication_at_start,
            "eigenvalue_quarantine": self.eigenvalues[0],
            "eigenvalue_infectious": self.eigenvalues[1],
        }


def analyze(params: ModelParams) -> AnalysisReport:
    """
    Compute the full report.

    Undefined critical values are reported as None with a reason instead of
    raising.
    """
    try:
        sigma_bar, sigma_reason = critical_sigma(params), None
    except UndefinedCriticalValueError as e:
        sigma_bar, sigma_reason = None, e.reason
    try:
        eta_bar, eta_reason = critical_eta(params), None
    except UndefinedCriticalValueError as e:
        eta_bar, eta_reason = None, e.reason

    d_xi = d_xi_dv(params)
    return AnalysisReport(
        c_t_bar=epidemic_threshold(params),
        sigma_bar=sigma_bar,
        sigma_bar_reason=sigma_reason,
        eta_bar=eta_bar,
        eta_bar_reason=eta_reason,
        equilibrium=endemic_equilibrium(params),
        xi=severe_prevalence(params),
        d_ctbar_dv=d_ctbar_dv(params),
        d_xi_dv=d_xi,
        regime=regime(params),
        vaccination_effect=vaccination_effect(d_xi),
        coverage_turning_point=coverage_turning_point(params),
        favours_eradication_at_start=favours_eradication_at_start(params),
        eigenvalues=disease_free_eigenvalues(params),
    )
