"""Return-volatility cross-correlation, autocorrelation and decay fits."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateSeriesError, InsufficientDataError, InvalidArgumentError


@dataclass
class CrossCorrResult:
    lags: np.ndarray
    values: np.ndarray
    d: float
    n_pairs: np.ndarray

    def at(self, j: int) -> float:
        idx = np.flatnonzero(self.lags == j)
        if idx.size == 0:
            raise KeyError(j)
        return float(self.values[idx[0]])

    def window(self, j_min: int, j_max: int) -> np.ndarray:
        mask = (self.lags >= j_min) & (self.lags <= j_max)
        return self.values[mask]


@dataclass
class DecayFit:
    tau: float
    amplitude: float
    r_squared: float
    lags_used: np.ndarray
    ok: bool = True

    @property
    def n_used(self) -> int:
        return int(self.lags_used.size)


def _standardize(x: np.ndarray, name: str) -> np.ndarray:
    sd = x.std()
    if not sd > 0:
        raise DegenerateSeriesError(f"{name} has zero standard deviation")
    return (x - x.mean()) / sd


def _lagged_means(a: np.ndarray, b: np.ndarray, lags: np.ndarray):
    """Mean of a[t] * b[t + j] over every valid t, per lag j."""
    n = a.size
    values = np.empty(lags.size)
    counts = np.empty(lags.size, dtype=int)
    for i, j in enumerate(lags):
        j = int(j)
        if j >= 0:
            prod = a[: n - j] * b[j:]
        else:
            prod = a[-j:] * b[: n + j]
        values[i] = prod.mean()
        counts[i] = prod.size
    return values, counts


def cross_correlation(r, sigma2, d: float = 2.0, j_min: int = -100, j_max: int = 100) -> CrossCorrResult:
    """Standardized covariance between ``r_t`` and ``sigma_{t+j}^d``.

    ``sigma2`` holds variances, so the second channel is ``sigma2 ** (d / 2)``.
    Means and standard deviations are taken once over the full series.
    """
    r = np.asarray(r, dtype=float)
    sigma2 = np.asarray(sigma2, dtype=float)
    if r.shape != sigma2.shape or r.ndim != 1:
        raise InvalidArgumentError("r and sigma2 must be 1-D and of equal length")
    if not d > 0:
        raise InvalidArgumentError("d must be > 0")
    n = r.size
    if j_min > j_max:
        raise InvalidArgumentError("j_min must not exceed j_max")
    if max(abs(j_min), abs(j_max)) >= n:
        raise InvalidArgumentError(f"|j| must be < N = {n}")
    if np.any(sigma2 < 0):
        raise InvalidArgumentError("sigma2 must be non-negative")
    rs = _standardize(r, "r")
    vs = _standardize(sigma2 ** (d / 2.0), f"sigma^{d}")
    lags = np.arange(j_min, j_max + 1)
    values, counts = _lagged_means(rs, vs, lags)
    return CrossCorrResult(lags, values, float(d), counts)


def autocorrelation(x, max_lag: int) -> np.ndarray:
    """ACF for lags 0..max_lag, normalized by the global mean and variance."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.size <= max_lag:
        raise InvalidArgumentError("series must be longer than max_lag")
    if max_lag < 0:
        raise InvalidArgumentError("max_lag must be >= 0")
    z = _standardize(x, "series")
    values, _ = _lagged_means(z, z, np.arange(max_lag + 1))
    return values


def fit_exp_decay(c: CrossCorrResult, j_min: int = 1, j_max: int = 60) -> DecayFit:
    """Fit ``-C(j) ~ A exp(-j / tau)`` by least squares on ``log(-C(j))``.

    Lags with ``C(j) >= 0`` inside the window are skipped.
    """
    if j_min < 1 or j_max < j_min:
        raise InvalidArgumentError("fit window must satisfy 1 <= j_min <= j_max")
    mask = (c.lags >= j_min) & (c.lags <= j_max) & (c.values < 0)
    j = c.lags[mask].astype(float)
    if j.size < 3:
        raise InsufficientDataError(
            f"only {j.size} negative-valued lags in [{j_min}, {j_max}]; need at least 3"
        )
    y = np.log(-c.values[mask])
    slope, intercept = np.polyfit(j, y, 1)
    resid = y - (slope * j + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / ss_tot if ss_tot > 0 else 1.0
    r2 = min(max(r2, 0.0), 1.0)
    if slope < 0:
        tau, ok = -1.0 / slope, True
    else:
        tau, ok = math.inf, False
    return DecayFit(float(tau), float(math.exp(intercept)), r2, c.lags[mask], ok)
