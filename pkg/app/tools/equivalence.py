"""
Statistical comparison of two stochastic ensembles (aggregate vs activation engine).
"""
from dataclasses import dataclass
import logging

import numpy as np
import pandas as pd
from scipy import stats

from app.tools.ensemble import EnsembleSummary

logger = logging.getLogger(__name__)

COMPONENTS = {"s": 0, "i": 1, "q": 2}


@dataclass
class EquivalenceResult:
    """Per-time comparison of one compartment between two ensembles."""
    times: np.ndarray
    mean_a: np.ndarray
    mean_b: np.ndarray
    standard_error: np.ndarray
    p_values: np.ndarray
    alpha: float

    @property
    def corrected_alpha(self) -> float:
        """Bonferroni level across the compared grid times."""
        return self.alpha / len(self.times)

    @property
    def within_three_se(self) -> np.ndarray:
        return np.abs(self.mean_a - self.mean_b) <= 3.0 * self.standard_error

    @property
    def indistinguishable(self) -> bool:
        return bool(np.all(self.p_values >= self.corrected_alpha))

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({
            "t": self.times,
            "mean_a": self.mean_a,
            "mean_b": self.mean_b,
            "se_diff": self.standard_error,
            "p_value": self.p_values,
            "within_3se": self.within_three_se.astype(float),
        })


def compare_engines(
    a: EnsembleSummary,
    b: EnsembleSummary,
    points: int = 10,
    alpha: float = 0.05,
    component: str = "i"
) -> EquivalenceResult:
    """
    Welch two-sample tests at evenly spaced grid times.

    Args:
        a, b: Ensembles on the same sampling grid
        points: Number of grid times to test (t = 0 is skipped)
        alpha: Family-wise significance level
        component: Compartment to compare ("s", "i" or "q")

    Returns:
        EquivalenceResult
    """
    if a.times.shape != b.times.shape or not np.allclose(a.times, b.times):
        raise ValueError("Ensembles must share their sampling grid")
    column = COMPONENTS[component]
    indices = np.unique(np.linspace(1, len(a.times) - 1, points).round().astype(int))

    x = a.samples[:, indices, column]
    y = b.samples[:, indices, column]
    p_values = np.empty(len(indices))
    for k in range(len(indices)):
        if np.ptp(x[:, k]) == 0.0 and np.ptp(y[:, k]) == 0.0:
            p_values[k] = 1.0 if x[0, k] == y[0, k] else 0.0
            continue
        p_values[k] = stats.ttest_ind(x[:, k], y[:, k], equal_var=False).pvalue

    se = np.sqrt(
        a.standard_error()[indices, column] ** 2 + b.standard_error()[indices, column] ** 2
    )
    result = EquivalenceResult(
        times=a.times[indices],
        mean_a=a.mean[indices, column],
        mean_b=b.mean[indices, column],
        standard_error=se,
        p_values=p_values,
        alpha=alpha,
    )
    logger.info(
        f"Engine comparison on y_{component}: min p={p_values.min():.3g}, "
        f"{int(result.within_three_se.sum())}/{len(indices)} points within 3 SE"
    )
    return result
