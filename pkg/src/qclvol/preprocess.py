"""Scaling into the angle-encoding domain and log-volatility increments."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateScaleError, InvalidArgumentError
from .rgarch import MarketSeries


@dataclass(frozen=True)
class ScaleFactors:
    r_scale: float
    v_scale: float

    def __post_init__(self):
        if not (self.r_scale > 0 and self.v_scale > 0):
            raise InvalidArgumentError("scale factors must be positive")


def rescale(s: MarketSeries) -> tuple[MarketSeries, ScaleFactors]:
    """Divide returns by max|r| and volatilities by max sigma2."""
    if len(s) == 0:
        raise InvalidArgumentError("cannot rescale an empty series")
    r_scale = float(np.max(np.abs(s.r)))
    if r_scale == 0:
        raise DegenerateScaleError("all returns are zero; no return scale can be defined")
    v_scale = float(np.max(s.sigma2))
    factors = ScaleFactors(r_scale, v_scale)
    meta = dict(s.meta, scaled=True, r_scale=r_scale, v_scale=v_scale)
    # clip guards the 1-ulp overshoot that division can produce on the max element
    r = np.clip(s.r / r_scale, -1.0, 1.0)
    v = np.minimum(s.sigma2 / v_scale, 1.0)
    return MarketSeries(r, v, meta), factors


def unscale(s: MarketSeries, f: ScaleFactors) -> MarketSeries:
    meta = {k: v for k, v in s.meta.items() if k not in ("r_scale", "v_scale")}
    meta["scaled"] = False
    return MarketSeries(s.r * f.r_scale, s.sigma2 * f.v_scale, meta)


def log_increments(v) -> np.ndarray:
    """``dV_t = log v_t - log v_{t-1}``; one element shorter than ``v``."""
    v = np.asarray(v, dtype=float)
    if v.ndim != 1 or v.size < 2:
        raise InvalidArgumentError("need a 1-D series with at least 2 points")
    bad = np.flatnonzero(~(v > 0))
    if bad.size:
        raise InvalidArgumentError(f"volatility must be positive; v[{bad[0]}] = {v[bad[0]]}")
    return np.diff(np.log(v))
