"""Rational GARCH simulation.

Two volatility recursions are provided.  The rational form divides the GARCH
numerator by ``1 + gamma * r``, the exponential form by ``exp(gamma * r)``;
both reduce to GARCH(1,1) when ``gamma == 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .errors import InvalidArgumentError, NonPositiveDenominatorError

VARIANTS = ("rational", "exponential")
RNG_ALGORITHM = "numpy.random.Generator(PCG64).standard_normal"


@dataclass(frozen=True)
class RGarchParams:
    omega: float
    alpha: float
    beta: float
    gamma: float = 0.0

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.omega, self.alpha, self.beta, self.gamma)):
            raise InvalidArgumentError("RGARCH parameters must be finite")
        if self.omega <= 0:
            raise InvalidArgumentError(f"omega must be > 0, got {self.omega}")
        if self.alpha < 0 or self.beta < 0:
            raise InvalidArgumentError("alpha and beta must be non-negative")
        if self.alpha + self.beta >= 1:
            raise InvalidArgumentError(
                f"alpha + beta must be < 1 for a stationary GARCH reduction, got {self.alpha + self.beta}"
            )

    @property
    def unconditional_variance(self) -> float:
        return self.omega / (1.0 - self.alpha - self.beta)

    def as_dict(self) -> dict[str, float]:
        return {"omega": self.omega, "alpha": self.alpha, "beta": self.beta, "gamma": self.gamma}


# The parameter set used for every experiment in the reference study.
PAPER_PARAMS = RGarchParams(omega=0.005, alpha=0.11, beta=0.85, gamma=0.1)


@dataclass
class MarketSeries:
    """Paired returns and volatilities plus provenance metadata."""

    r: np.ndarray
    sigma2: np.ndarray
    meta: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        self.r = np.asarray(self.r, dtype=float)
        self.sigma2 = np.asarray(self.sigma2, dtype=float)
        if self.r.shape != self.sigma2.shape or self.r.ndim != 1:
            raise InvalidArgumentError("r and sigma2 must be 1-D sequences of equal length")
        if np.any(~(self.sigma2 > 0)):
            raise InvalidArgumentError("every sigma2 must be > 0")
        if self.scaled and (np.any(np.abs(self.r) > 1) or np.any(self.sigma2 > 1)):
            raise InvalidArgumentError("scaled series must satisfy |r| <= 1 and sigma2 <= 1")

    def __len__(self) -> int:
        return self.r.size

    @property
    def scaled(self) -> bool:
        return bool(self.meta.get("scaled", False))


def step_rational(p: RGarchParams, r_prev: float, sigma2_prev: float) -> float:
    if not sigma2_prev > 0:
        raise InvalidArgumentError(f"sigma2_prev must be > 0, got {sigma2_prev}")
    denom = 1.0 + p.gamma * r_prev
    if denom <= 0:
        raise NonPositiveDenominatorError(f"1 + gamma*r = {denom} <= 0 (r_prev = {r_prev})")
    return (p.omega + p.alpha * r_prev * r_prev + p.beta * sigma2_prev) / denom


def step_exponential(p: RGarchParams, r_prev: float, sigma2_prev: float) -> float:
    # sigma2_prev == 0 is tolerated so the recursion's constant term can be probed directly.
    if sigma2_prev < 0:
        raise InvalidArgumentError(f"sigma2_prev must be >= 0, got {sigma2_prev}")
    return (p.omega + p.alpha * r_prev * r_prev + p.beta * sigma2_prev) / math.exp(p.gamma * r_prev)


def simulate(
    p: RGarchParams,
    variant: str = "exponential",
    n: int = 1095,
    burn_in: int = 1000,
    seed: int = 0,
) -> MarketSeries:
    """Simulate ``n`` points after discarding ``burn_in`` leading steps.

    The recursion starts at the GARCH unconditional variance
    ``omega / (1 - alpha - beta)`` with ``r_1 = sigma_1 * eps_1``.
    """
    if variant not in VARIANTS:
        raise InvalidArgumentError(f"variant must be one of {VARIANTS}, got {variant!r}")
    if n < 1:
        raise InvalidArgumentError("n must be >= 1")
    if burn_in < 0:
        raise InvalidArgumentError("burn_in must be >= 0")
    total = n + burn_in
    eps = np.random.Generator(np.random.PCG64(seed)).standard_normal(total).tolist()

    omega, alpha, beta, gamma = p.omega, p.alpha, p.beta, p.gamma
    rational = variant == "rational"
    exp = math.exp
    r_out = [0.0] * total
    s_out = [0.0] * total

    s2 = p.unconditional_variance
    r = math.sqrt(s2) * eps[0]
    s_out[0], r_out[0] = s2, r
    for t in range(1, total):
        num = omega + alpha * r * r + beta * s2
        if rational:
            denom = 1.0 + gamma * r
            if denom <= 0:
                raise NonPositiveDenominatorError(
                    f"non-positive denominator {denom} at step {t} (r_prev = {r})", step=t
                )
            s2 = num / denom
        else:
            s2 = num / exp(gamma * r)
        r = math.sqrt(s2) * eps[t]
        s_out[t], r_out[t] = s2, r

    meta = {
        "seed": seed,
        "params": p.as_dict(),
        "variant": variant,
        "burn_in": burn_in,
        "n": n,
        "rng": RNG_ALGORITHM,
        "scaled": False,
    }
    return MarketSeries(np.array(r_out[burn_in:]), np.array(s_out[burn_in:]), meta)
