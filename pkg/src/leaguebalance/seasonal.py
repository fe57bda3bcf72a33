"""Within-season competitive-balance indices.

Every index runs from 0 (perfect balance) to 1 (complete imbalance) and is
normalised against the completely unbalanced reference season, in which the
rank-i team beats every lower-ranked team in both legs, giving winning
percentages (n-i)/(n-1).

The concentration-ratio family weights ranking places by their sporting
value: the title race, the K continental-qualification places and the I
relegation places.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import InputError


class IndexRangeWarning(UserWarning):
    """An index left [0, 1] by more than tolerance and was clamped."""


class IncompleteScheduleWarning(UserWarning):
    """Winning percentages do not average 0.5; deviations were renormalised."""


_RANGE_TOL = 1e-9


def cu_percentages(n: int) -> np.ndarray:
    """Winning percentages of the completely unbalanced n-team season."""
    if n < 2:
        raise InputError(f"degenerate league with n={n} (need n >= 2)")
    return (n - 1.0 - np.arange(n)) / (n - 1.0)


@dataclass(frozen=True)
class ReferenceDistribution:
    """Reference vectors for an n-team league: completely unbalanced and balanced."""

    n: int
    w_cu: np.ndarray
    share_cu: np.ndarray
    w_pb: np.ndarray

    @classmethod
    def for_league(cls, n: int) -> "ReferenceDistribution":
        w_cu = cu_percentages(n)
        return cls(n=n, w_cu=w_cu, share_cu=w_cu / w_cu.sum(), w_pb=np.full(n, 0.5))


@dataclass(frozen=True)
class WeightScheme:
    """Rank weights for the three-level concentration indices.

    Top-K places get K+2-r (strictly decreasing, all above the relegation
    weight), relegation places get 1, middle places get 0.
    """

    K: int
    I: int
    n: int
    weights: np.ndarray

    @classmethod
    def for_league(cls, K: int, I: int, n: int) -> "WeightScheme":
        _check_levels(K, I, n)
        w = np.zeros(n)
        ranks = np.arange(1, n + 1)
        w[ranks <= K] = K + 2 - ranks[ranks <= K]
        w[ranks > n - I] = 1.0
        return cls(K=K, I=I, n=n, weights=w)


def _check_levels(K: int, I: int, n: int) -> None:
    if not (1 <= K < n):
        raise InputError(f"K={K} out of range for n={n}")
    if not (1 <= I < n):
        raise InputError(f"I={I} out of range for n={n}")
    if K + I >= n:
        raise InputError(f"K+I={K + I} must be < n={n}")


def _as_percentages(w, name: str) -> np.ndarray:
    """Validate a winning-percentage vector and renormalise its mean to 0.5.

    A complete double round robin always averages exactly 0.5 and is passed
    through untouched.  Other inputs (abandoned schedules, foreign point
    scales) are rescaled so deviation formulas stay comparable, with a
    warning.
    """
    arr = np.asarray(w, dtype=float)
    if arr.ndim != 1 or arr.size < 2:
        raise InputError(f"{name}: degenerate league (need a vector of >= 2 winning percentages)")
    if not np.all(np.isfinite(arr)) or np.any(arr < 0.0):
        raise InputError(f"{name}: winning percentages must be finite and non-negative")
    mean = arr.mean()
    if mean <= 0.0:
        raise InputError(f"{name}: degenerate all-zero winning percentages")
    if abs(mean - 0.5) <= _RANGE_TOL:
        return arr
    warnings.warn(
        f"{name}: winning percentages average {mean:.6g} instead of 0.5 "
        "(incomplete schedule?); deviations renormalised",
        IncompleteScheduleWarning,
        stacklevel=3,
    )
    return arr * (0.5 / mean)


def _clamp01(value: float, name: str) -> float:
    if value < -_RANGE_TOL or value > 1.0 + _RANGE_TOL:
        warnings.warn(
            f"{name}={value:.6g} outside [0, 1]; clamped (check input data)",
            IndexRangeWarning,
            stacklevel=3,
        )
    return float(min(1.0, max(0.0, value)))


def namsi(w) -> float:
    """Ratio of the observed winning-percentage standard deviation to the
    completely unbalanced one.

    sqrt( sum (w_i - 0.5)^2 / sum (w_cu_i - 0.5)^2 ).
    """
    arr = _as_percentages(w, "namsi")
    w_cu = cu_percentages(arr.size)
    num = float(np.sum((arr - 0.5) ** 2))
    den = float(np.sum((w_cu - 0.5) ** 2))
    return _clamp01(np.sqrt(num / den), "namsi")


def hhi_star(w) -> float:
    """Normalised Herfindahl-Hirschman concentration of win-point shares.

    (HHI - 1/n) / (HHI_cu - 1/n) with shares s_i = w_i / sum(w); the
    completely unbalanced HHI equals 2(2n-1) / (3n(n-1)).
    """
    arr = _as_percentages(w, "hhi_star")
    n = arr.size
    shares = arr / arr.sum()
    hhi = float(np.sum(shares**2))
    ref = ReferenceDistribution.for_league(n)
    hhi_cu = float(np.sum(ref.share_cu**2))
    return _clamp01((hhi - 1.0 / n) / (hhi_cu - 1.0 / n), "hhi_star")


def _gini(x: np.ndarray) -> float:
    diffs = np.abs(x[:, None] - x[None, :])
    return float(diffs.sum() / (2.0 * x.size**2 * x.mean()))


def adjusted_gini(w) -> float:
    """Gini coefficient of winning percentages relative to the completely
    unbalanced season: Gini(w) / Gini(w_cu)."""
    arr = _as_percentages(w, "adjusted_gini")
    w_cu = cu_percentages(arr.size)
    return _clamp01(_gini(arr) / _gini(w_cu), "adjusted_gini")


def ncr_champion(w) -> float:
    """Concentration ratio for the champion: 2 * (w_rank1 - 0.5)."""
    arr = _as_percentages(w, "ncr_champion")
    return _clamp01(2.0 * (arr[0] - 0.5), "ncr_champion")


def acr_top(w, K: int) -> float:
    """Adjusted concentration ratio over the top K ranking places.

    Weighted top-K excess over the balanced level, normalised by the same
    expression at the completely unbalanced season; weights v_j = K+1-j.
    """
    arr = _as_percentages(w, "acr_top")
    n = arr.size
    if not (1 <= K < n):
        raise InputError(f"K={K} out of range for n={n}")
    v = np.arange(K, 0, -1, dtype=float)
    w_cu = cu_percentages(n)
    s = float(v @ arr[:K])
    s_pb = 0.5 * v.sum()
    s_cu = float(v @ w_cu[:K])
    return _clamp01((s - s_pb) / (s_cu - s_pb), "acr_top")


def ncr_relegation(w, I: int) -> float:
    """Concentration ratio for the relegation zone.

    (0.5*I - B) / (0.5*I - I(I-1)/(2(n-1))) where B is the bottom-I sum of
    winning percentages; the floor term is what the bottom I teams collect
    from playing each other.
    """
    arr = _as_percentages(w, "ncr_relegation")
    n = arr.size
    if not (1 <= I < n):
        raise InputError(f"I={I} out of range for n={n}")
    bottom = float(arr[n - I:].sum())
    floor = I * (I - 1) / (2.0 * (n - 1))
    return _clamp01((0.5 * I - bottom) / (0.5 * I - floor), "ncr_relegation")


def scr(w, K: int, I: int) -> float:
    """Special concentration ratio over all three levels.

    Weighted sum of top-K excesses and relegation shortfalls relative to
    the balanced level, normalised at the completely unbalanced season.
    """
    arr = _as_percentages(w, "scr")
    n = arr.size
    scheme = WeightScheme.for_league(K, I, n)
    w_cu = cu_percentages(n)

    def level_spread(x: np.ndarray) -> float:
        top = scheme.weights[:K] @ (x[:K] - 0.5)
        rel = scheme.weights[n - I:] @ (0.5 - x[n - I:])
        return float(top + rel)

    return _clamp01(level_spread(arr) / level_spread(w_cu), "scr")
