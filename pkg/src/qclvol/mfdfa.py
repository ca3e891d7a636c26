"""Multifractal detrended fluctuation analysis (MFDFA).

The profile of the series is cut into ``floor(N/s)`` non-overlapping
segments from the start and as many again from the end.  A degree-``m``
polynomial is removed from each, and the q-th order average of the residual
variances gives ``F_q(s)``.  The slope of ``log F_q(s)`` against ``log s`` is
the generalized Hurst exponent ``h(q)``.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateSegmentError, InsufficientDataError, InvalidArgumentError

# residual variance below (ZERO_RTOL * max|Y_segment|)^2 counts as an exact fit
ZERO_RTOL = 1e-12


def default_scales(n: int, count: int = 20, s_min: int = 16) -> np.ndarray:
    s_max = n // 4
    if s_max < s_min:
        raise InsufficientDataError(f"series of length {n} is too short for scales from {s_min}")
    return np.unique(np.round(np.geomspace(s_min, s_max, count)).astype(int))


def default_qs() -> np.ndarray:
    return np.round(np.arange(-5.0, 5.0 + 1e-9, 0.5), 10)


@dataclass(frozen=True)
class MfdfaConfig:
    scales: tuple
    qs: tuple
    poly_order: int = 1

    def __post_init__(self):
        object.__setattr__(self, "scales", tuple(int(s) for s in self.scales))
        object.__setattr__(self, "qs", tuple(float(q) for q in self.qs))
        if self.poly_order < 0:
            raise InvalidArgumentError("poly_order must be >= 0")
        if any(b <= a for a, b in zip(self.scales, self.scales[1:])):
            raise InvalidArgumentError("scales must be strictly increasing")
        if not self.qs or not np.all(np.isfinite(self.qs)):
            raise InvalidArgumentError("qs must be a non-empty sequence of finite values")

    @classmethod
    def default(cls, n: int, poly_order: int = 1, qs=None) -> MfdfaConfig:
        return cls(tuple(default_scales(n)), tuple(default_qs() if qs is None else qs), poly_order)

    def validate(self, n: int) -> None:
        if len(self.scales) < 4:
            raise InsufficientDataError(f"need at least 4 scales, got {len(self.scales)}")
        if self.scales[0] < self.poly_order + 2:
            raise InvalidArgumentError(
                f"smallest scale {self.scales[0]} must be >= poly_order + 2 = {self.poly_order + 2}"
            )
        if self.scales[-1] > n / 4:
            raise InsufficientDataError(f"largest scale {self.scales[-1]} exceeds N/4 = {n / 4}")


@dataclass
class MfdfaResult:
    scales: np.ndarray
    qs: np.ndarray
    fq: np.ndarray  # shape (len(qs), len(scales))
    hq: np.ndarray
    fit_r2: np.ndarray
    tau_q: np.ndarray
    alpha: np.ndarray
    f_alpha: np.ndarray

    @property
    def spectrum_qs(self) -> np.ndarray:
        return self.qs[1:-1]

    def h(self, q: float) -> float:
        idx = np.flatnonzero(np.isclose(self.qs, q))
        if idx.size == 0:
            raise KeyError(q)
        return float(self.hq[idx[0]])

    @property
    def alpha_width(self) -> float:
        return float(self.alpha.max() - self.alpha.min()) if self.alpha.size else 0.0


def profile(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.size < 2:
        raise InvalidArgumentError("profile needs a 1-D series of length >= 2")
    return np.cumsum(x - x.mean())


def _detrend_basis(s: int, m: int) -> np.ndarray:
    t = np.linspace(-1.0, 1.0, s)
    q, _ = np.linalg.qr(np.vander(t, m + 1))
    return q


def segment_variances(Y, s: int, m: int = 1) -> np.ndarray:
    """Residual mean squares of the ``2 floor(N/s)`` detrended segments.

    The first half of the returned array holds the segments taken from the
    start, the second half those taken from the end.
    """
    Y = np.asarray(Y, dtype=float)
    n = Y.size
    ns = n // s
    if s < m + 2:
        raise InvalidArgumentError(f"scale {s} must be >= poly_order + 2")
    if 2 * ns < 4:
        raise InsufficientDataError(f"scale {s} leaves only {2 * ns} segments in {n} points")
    segs = np.concatenate([Y[: ns * s].reshape(ns, s), Y[n - ns * s:].reshape(ns, s)])
    basis = _detrend_basis(s, m)
    resid = segs - (segs @ basis) @ basis.T
    f2 = np.mean(resid**2, axis=1)
    exact = f2 <= (ZERO_RTOL * np.max(np.abs(segs), axis=1)) ** 2
    f2[exact] = 0.0
    return f2


def fluctuation_from_variances(f2: np.ndarray, q: float, scale: int | None = None) -> float:
    zero = np.flatnonzero(f2 == 0.0)
    if q > 0:
        return float(np.mean(f2 ** (q / 2.0)) ** (1.0 / q))
    if zero.size:
        raise DegenerateSegmentError(
            f"segment {zero[0]} has zero residual variance; q = {q} is undefined",
            segment=int(zero[0]),
            scale=scale,
        )
    if q == 0:
        return float(np.exp(0.5 * np.mean(np.log(f2))))
    return float(np.mean(f2 ** (q / 2.0)) ** (1.0 / q))


def fluctuation(Y, s: int, q: float, m: int = 1) -> float:
    return fluctuation_from_variances(segment_variances(Y, s, m), q, scale=s)


def _slope_r2(x: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / ss_tot if ss_tot > 0 else 1.0
    return float(slope), r2


def hurst(x, config: MfdfaConfig | None = None, threads: int = 1) -> MfdfaResult:
    x = np.asarray(x, dtype=float)
    if config is None:
        config = MfdfaConfig.default(x.size)
    config.validate(x.size)
    Y = profile(x)
    scales = np.array(config.scales)
    qs = np.array(config.qs)
    m = config.poly_order

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            variances = list(pool.map(lambda s: segment_variances(Y, int(s), m), scales))
    else:
        variances = [segment_variances(Y, int(s), m) for s in scales]

    fq = np.empty((qs.size, scales.size))
    for j, (s, f2) in enumerate(zip(scales, variances)):
        for i, q in enumerate(qs):
            fq[i, j] = fluctuation_from_variances(f2, q, scale=int(s))
    if np.any(~(fq > 0)):
        raise DegenerateSegmentError("fluctuation function vanished; log-log fit undefined")

    logs = np.log(scales)
    hq = np.empty(qs.size)
    r2 = np.empty(qs.size)
    for i in range(qs.size):
        hq[i], r2[i] = _slope_r2(logs, np.log(fq[i]))

    tau_q = qs * hq - 1.0
    if qs.size >= 3:
        alpha = (tau_q[2:] - tau_q[:-2]) / (qs[2:] - qs[:-2])
        f_alpha = qs[1:-1] * alpha - tau_q[1:-1]
    else:
        alpha = f_alpha = np.empty(0)
    return MfdfaResult(scales, qs, fq, hq, r2, tau_q, alpha, f_alpha)


def rolling_hurst(x, window: int = 1095, shift: int = 100, config: MfdfaConfig | None = None,
                  threads: int = 1) -> list[tuple[int, float]]:
    """h(2) over windows ``[t, t + window)`` advancing by ``shift``.

    A trailing window shorter than ``window`` is dropped.  Only the scales and
    detrending order of ``config`` are used; the moment is always q = 2.
    """
    x = np.asarray(x, dtype=float)
    if shift < 1:
        raise InvalidArgumentError("shift must be >= 1")
    if window > x.size:
        raise InsufficientDataError(f"window {window} exceeds series length {x.size}")
    if config is None:
        config = MfdfaConfig.default(window)
    if window < 4 * config.scales[0]:
        raise InsufficientDataError(
            f"window {window} is shorter than 4 x smallest scale ({config.scales[0]})"
        )
    cfg2 = MfdfaConfig(config.scales, (2.0,), config.poly_order)
    starts = range(0, x.size - window + 1, shift)

    def one(t):
        return t, hurst(x[t: t + window], cfg2).hq[0]

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return [(int(t), float(h)) for t, h in pool.map(one, starts)]
    return [(int(t), float(h)) for t, h in map(one, starts)]
