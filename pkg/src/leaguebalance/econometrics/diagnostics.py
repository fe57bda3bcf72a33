"""Residual diagnostics for the pooled attendance model."""

from __future__ import annotations

import math

import numpy as np
from scipy import stats

from ..errors import InputError, NumericalError
from .base import FitResult, TestResult
from .design import DesignMatrix
from .ols import ols_fit


def breusch_pagan_lm(fit: FitResult) -> TestResult:
    """LM test for zero contemporaneous correlation across country equations.

    lambda = sum_{i<j} T_ij * r_ij^2 with r_ij the residual correlation over
    the T_ij overlapping years of countries i and j; chi-squared with one
    degree of freedom per included pair.  Pairs with no overlap are dropped
    and noted.
    """
    countries = sorted(fit.residuals_by_country)
    if len(countries) < 2:
        raise InputError("LM test needs residuals from at least 2 countries")
    series = {
        c: dict(zip(fit.years_by_country[c].tolist(), fit.residuals_by_country[c].tolist()))
        for c in countries
    }
    lam = 0.0
    pairs = 0
    skipped: list[str] = []
    for i in range(len(countries)):
        for j in range(i + 1, len(countries)):
            common = sorted(set(series[countries[i]]) & set(series[countries[j]]))
            if len(common) < 2:
                skipped.append(f"{countries[i]}/{countries[j]}")
                continue
            ei = np.array([series[countries[i]][t] for t in common])
            ej = np.array([series[countries[j]][t] for t in common])
            denom = math.sqrt(float(ei @ ei) * float(ej @ ej))
            if denom == 0.0:
                skipped.append(f"{countries[i]}/{countries[j]}")
                continue
            r = float(ei @ ej) / denom
            lam += len(common) * r * r
            pairs += 1
    if pairs == 0:
        raise InputError("no country pair has overlapping residual years")
    note = f"excluded pairs without overlap: {', '.join(skipped)}" if skipped else ""
    return TestResult(
        name="breusch_pagan_lm",
        statistic=lam,
        df=pairs,
        p_value=float(stats.chi2.sf(lam, pairs)),
        note=note,
    )


def durbin_watson_panel(fit: FitResult) -> TestResult:
    """Pooled Durbin-Watson statistic over the country residual series.

    d = sum_i sum_{t>=2} (e_it - e_i,t-1)^2 / sum_i sum_t e_it^2, with
    differences taken within countries only.  The p-value uses the normal
    approximation d ~ N(2, 4/N) around the no-autocorrelation value.
    """
    num = 0.0
    den = 0.0
    nobs = 0
    for country, e in fit.residuals_by_country.items():
        if e.size < 2:
            raise InputError(f"residual series for {country} shorter than 2")
        num += float(np.sum(np.diff(e) ** 2))
        den += float(e @ e)
        nobs += e.size
    if den <= 0.0:
        raise NumericalError("degenerate residuals: zero sum of squares")
    d = num / den
    z = abs(d - 2.0) / math.sqrt(4.0 / nobs)
    return TestResult(
        name="durbin_watson_panel",
        statistic=d,
        df=None,
        p_value=float(2.0 * stats.norm.sf(z)),
        note="normal approximation around 2",
    )


def jarque_bera_stat(residuals) -> tuple[float, float]:
    """Jarque-Bera statistic and chi2(2) p-value for one residual series."""
    e = np.asarray(residuals, dtype=float).reshape(-1)
    if e.size < 8:
        raise InputError(f"need at least 8 residuals for Jarque-Bera, got {e.size}")
    e = e - e.mean()
    m2 = float(np.mean(e**2))
    if m2 <= 0.0:
        raise NumericalError("degenerate residuals: zero variance")
    skew = float(np.mean(e**3)) / m2**1.5
    kurt = float(np.mean(e**4)) / m2**2
    jb = e.size / 6.0 * (skew**2 + (kurt - 3.0) ** 2 / 4.0)
    return jb, float(stats.chi2.sf(jb, 2))


def jarque_bera(residuals_by_country) -> dict[str, TestResult]:
    """Per-country Jarque-Bera normality tests."""
    out: dict[str, TestResult] = {}
    for country in sorted(residuals_by_country):
        jb, p = jarque_bera_stat(residuals_by_country[country])
        out[country] = TestResult(name=f"jarque_bera[{country}]", statistic=jb, df=2, p_value=p)
    return out


def ramsey_reset(fit: FitResult, design: DesignMatrix, powers=(2, 3)) -> TestResult:
    """RESET specification test: F-test that powers of the fitted values add
    nothing to the design."""
    powers = tuple(powers)
    if not powers:
        raise InputError("powers is empty: nothing to test")
    if any(p < 2 for p in powers):
        raise InputError("powers must all be >= 2")
    yhat = fit.fitted
    if yhat is None or yhat.size != design.nobs:
        raise NumericalError("fit does not carry fitted values matching the design")
    scale = float(yhat.std())
    if scale == 0.0:
        raise NumericalError("fitted values are constant; RESET undefined")
    z = (yhat - yhat.mean()) / scale  # standardised to keep the powers well conditioned
    extra = np.column_stack([z**p for p in powers])
    x_aug = np.column_stack([design.X, extra])
    names_aug = design.columns + [f"fitted^{p}" for p in powers]

    restricted = ols_fit(design.y, design.X, design.columns)
    try:
        unrestricted = ols_fit(design.y, x_aug, names_aug)
    except NumericalError as exc:
        raise NumericalError(f"RESET augmentation is collinear with the design: {exc}") from exc
    rss_r = float(restricted.residuals @ restricted.residuals)
    rss_u = float(unrestricted.residuals @ unrestricted.residuals)
    q = len(powers)
    dof = design.nobs - x_aug.shape[1]
    f = ((rss_r - rss_u) / q) / (rss_u / dof)
    return TestResult(
        name="ramsey_reset",
        statistic=float(f),
        df=(q, dof),
        p_value=float(stats.f.sf(f, q, dof)),
    )
