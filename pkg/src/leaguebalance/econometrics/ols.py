"""Ordinary least squares on a plain design matrix."""

from __future__ import annotations

import math

import numpy as np

from ..errors import NumericalError
from .base import FitResult

_RCOND = 1e-10


def _dependent_columns(X: np.ndarray, names: list[str]) -> list[str]:
    """Columns whose addition does not raise the rank (reported on failure)."""
    bad: list[str] = []
    basis = np.empty((X.shape[0], 0))
    rank = 0
    for j in range(X.shape[1]):
        trial = np.column_stack([basis, X[:, j]])
        r = np.linalg.matrix_rank(trial, tol=None)
        if r > rank:
            basis = trial
            rank = r
        else:
            bad.append(names[j])
    return bad


def gaussian_loglik(residuals: np.ndarray) -> float:
    """Concentrated Gaussian log-likelihood of a residual vector."""
    n = residuals.size
    rss = float(residuals @ residuals)
    if rss <= 0.0:
        return float("inf")
    return -0.5 * n * (math.log(2.0 * math.pi) + math.log(rss / n) + 1.0)


def ols_fit(y, X, names: list[str] | None = None) -> FitResult:
    """Least-squares fit of y on X with classical covariance.

    Raises a singular-design error naming the linearly dependent columns
    when X is not of full column rank.
    """
    y = np.asarray(y, dtype=float).reshape(-1)
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[0] != y.size:
        raise NumericalError(f"design shape {X.shape} does not match response length {y.size}")
    n, k = X.shape
    if n <= k:
        raise NumericalError(f"not enough rows ({n}) for {k} coefficients")
    names = names if names is not None else [f"x{j}" for j in range(k)]

    q, r = np.linalg.qr(X)
    diag = np.abs(np.diag(r))
    if diag.min() <= _RCOND * max(diag.max(), 1.0):
        raise NumericalError(
            "singular design: dependent columns " + ", ".join(_dependent_columns(X, names))
        )
    beta = np.linalg.solve(r, q.T @ y)
    fitted = X @ beta
    resid = y - fitted
    rss = float(resid @ resid)
    sigma2 = rss / (n - k)
    rinv = np.linalg.solve(r, np.eye(k))
    cov = sigma2 * (rinv @ rinv.T)

    tss = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - rss / tss if tss > 0 else 0.0
    r2_adj = 1.0 - (1.0 - r2) * (n - 1) / (n - k) if n > k else float("nan")

    return FitResult(
        coef_names=list(names),
        beta=beta,
        cov=cov,
        residuals=resid,
        fitted=fitted,
        nobs=n,
        k=k,
        loglik=gaussian_loglik(resid),
        r2_adj=r2_adj,
    )
