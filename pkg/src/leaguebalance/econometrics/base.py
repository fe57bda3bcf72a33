"""Result containers shared by the estimation and testing routines."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass
class TestResult:
    """A test statistic with its reference distribution and p-value."""

    name: str
    statistic: float
    df: int | tuple[int, int] | None
    p_value: float
    note: str = ""

    def __post_init__(self) -> None:
        if np.isfinite(self.p_value) and not (0.0 <= self.p_value <= 1.0):
            raise ValueError(f"{self.name}: p-value {self.p_value} outside [0, 1]")


@dataclass
class FitResult:
    """Pooled regression estimates plus the per-country residual structure.

    ``residuals`` is stacked in design row order; ``residuals_by_country``
    and ``years_by_country`` hold the same residuals split by country and
    sorted by year.  ``sigma`` is the cross-country residual covariance in
    ``sigma_countries`` order; ``cov`` is the classical coefficient
    covariance and ``cov_robust`` the year-clustered sandwich when set.
    """

    coef_names: list[str]
    beta: np.ndarray
    cov: np.ndarray
    residuals: np.ndarray
    fitted: np.ndarray
    nobs: int = 0
    k: int = 0
    loglik: float = float("nan")
    r2_adj: float = float("nan")
    iterations: int = 0
    residuals_by_country: dict[str, np.ndarray] = field(default_factory=dict)
    years_by_country: dict[str, np.ndarray] = field(default_factory=dict)
    resid_var_by_country: dict[str, float] = field(default_factory=dict)
    sigma: np.ndarray | None = None
    sigma_countries: list[str] = field(default_factory=list)
    corr: np.ndarray | None = None
    cov_robust: np.ndarray | None = None

    def coef(self, name: str) -> float:
        return float(self.beta[self.coef_names.index(name)])

    def se(self, name: str, robust: bool = False) -> float:
        cov = self.cov_robust if (robust and self.cov_robust is not None) else self.cov
        return float(np.sqrt(cov[self.coef_names.index(name), self.coef_names.index(name)]))
