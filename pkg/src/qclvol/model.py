"""Single-qubit volatility model.

An input ``(r, sigma2)`` is angle-encoded onto |0> by

    RY(arcsin r) -> RZ(arccos r^2) -> RY(arcsin(2 sigma2 - 1)) -> RZ(arccos sigma2^2)

followed by the trainable unitary ``U(theta, lam, phi)``.  The probability of
reading |0> is the predicted next-step volatility.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import qubit
from .errors import InvalidArgumentError
from .qubit import CircuitParams, QubitState
from .rgarch import RNG_ALGORITHM, MarketSeries

LOG_FLOOR = 1e-10


@dataclass(frozen=True)
class ModelInput:
    r: float
    sigma2: float

    def __post_init__(self):
        if not (-1.0 <= self.r <= 1.0):
            raise InvalidArgumentError(f"scaled return must lie in [-1, 1], got {self.r!r}")
        if not (0.0 <= self.sigma2 <= 1.0):
            raise InvalidArgumentError(f"scaled volatility must lie in [0, 1], got {self.sigma2!r}")


def encoding_angles(r, sigma2):
    """The four rotation angles (ry1, rz1, ry2, rz2); works on scalars or arrays."""
    return (
        np.arcsin(r),
        np.arccos(r * r),
        np.arcsin(2.0 * sigma2 - 1.0),
        np.arccos(sigma2 * sigma2),
    )


def encode(x: ModelInput) -> QubitState:
    a, b, c, d = (float(v) for v in encoding_angles(x.r, x.sigma2))
    s = qubit.ZERO
    for gate in (qubit.ry(a), qubit.rz(b), qubit.ry(c), qubit.rz(d)):
        s = qubit.apply(gate, s)
    return s


def forward(p: CircuitParams, x: ModelInput) -> float:
    return qubit.prob0(qubit.apply(qubit.u_gate(p), encode(x)))


def encode_batch(r, sigma2) -> np.ndarray:
    """Vectorized ``encode``: returns an ``(n, 2)`` complex amplitude array."""
    r = np.asarray(r, dtype=float)
    sigma2 = np.asarray(sigma2, dtype=float)
    if np.any(~(np.abs(r) <= 1.0)) or np.any(~((sigma2 >= 0.0) & (sigma2 <= 1.0))):
        raise InvalidArgumentError("inputs outside the encoding domain |r| <= 1, 0 <= sigma2 <= 1")
    a, b, c, d = encoding_angles(r, sigma2)
    x0 = np.cos(a / 2) * np.exp(-0.5j * b)
    x1 = np.sin(a / 2) * np.exp(0.5j * b)
    cc, sc = np.cos(c / 2), np.sin(c / 2)
    y0 = (cc * x0 - sc * x1) * np.exp(-0.5j * d)
    y1 = (sc * x0 + cc * x1) * np.exp(0.5j * d)
    return np.stack([y0, y1], axis=1)


def forward_batch(p: CircuitParams, amps: np.ndarray) -> np.ndarray:
    out = qubit.apply_batch(qubit.u_gate(CircuitParams(*p)), amps)
    return np.abs(out[:, 0]) ** 2


def _check_scaled(data: MarketSeries) -> None:
    if not data.scaled:
        raise InvalidArgumentError("loss requires a scaled series (see preprocess.rescale)")
    if len(data) < 2:
        raise InvalidArgumentError("loss requires at least 2 observations")


def fitted(p: CircuitParams, data: MarketSeries) -> np.ndarray:
    """One-step-ahead predictions for ``sigma2[1:]`` from inputs ``[:-1]``."""
    _check_scaled(data)
    return forward_batch(p, encode_batch(data.r[:-1], data.sigma2[:-1]))


def loss(p: CircuitParams, data: MarketSeries) -> float:
    """Sum of squared one-step-ahead errors against the teacher volatility."""
    return float(np.sum((fitted(p, data) - data.sigma2[1:]) ** 2))


def make_objective(data: MarketSeries):
    """A fast closure ``params -> loss`` with the encoded inputs precomputed."""
    _check_scaled(data)
    amps = encode_batch(data.r[:-1], data.sigma2[:-1])
    teacher = data.sigma2[1:].copy()

    def objective(p) -> float:
        return float(np.sum((forward_batch(p, amps) - teacher) ** 2))

    return objective


@dataclass
class PredictionSeries:
    v: np.ndarray
    rp: np.ndarray
    clamp_count: int
    seed: int
    meta: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return self.v.size


def _forward_scalar(u: qubit.Unitary2, r: float, v: float) -> float:
    # Same gate chain as encode_batch, unrolled on Python scalars for the rollout loop.
    a, b = math.asin(r), math.acos(r * r)
    c, d = math.asin(2.0 * v - 1.0), math.acos(v * v)
    pb = complex(math.cos(b / 2), -math.sin(b / 2))
    x0 = math.cos(a / 2) * pb
    x1 = math.sin(a / 2) * pb.conjugate()
    cc, sc = math.cos(c / 2), math.sin(c / 2)
    pd = complex(math.cos(d / 2), -math.sin(d / 2))
    y0 = (cc * x0 - sc * x1) * pd
    y1 = (sc * x0 + cc * x1) * pd.conjugate()
    z = u.u00 * y0 + u.u01 * y1
    return z.real * z.real + z.imag * z.imag


def rollout(p: CircuitParams, x0: ModelInput, n: int, seed: int, scale=None) -> PredictionSeries:
    """Autoregressive generation of ``n`` (v, r^p) pairs.

    ``v_{t+1} = forward(p, (rp_t, v_t))`` and ``rp_{t+1} = k sqrt(v_{t+1}) eps_{t+1}``,
    with ``rp`` clamped to [-1, 1] so every emitted pair stays encodable.

    ``scale`` is the :class:`~qclvol.preprocess.ScaleFactors` of the training
    data.  When given, the return is drawn in original units and mapped back
    to the encoding domain, ``k = sqrt(v_scale) / r_scale``; without it
    ``k = 1`` and both channels are treated as if they shared one scale.
    """
    if n < 1:
        raise InvalidArgumentError("rollout length must be >= 1")
    if not isinstance(x0, ModelInput):
        x0 = ModelInput(*x0)
    k = 1.0 if scale is None else math.sqrt(scale.v_scale) / scale.r_scale
    u = qubit.u_gate(CircuitParams(*p))
    eps = np.random.Generator(np.random.PCG64(seed)).standard_normal(n).tolist()
    v_out = [0.0] * n
    r_out = [0.0] * n
    r, v = x0.r, x0.sigma2
    clamps = 0
    roundoff = 0
    for t in range(n):
        v = _forward_scalar(u, r, v)
        if v > 1.0:
            v = 1.0
            roundoff += 1
        r = k * math.sqrt(v) * eps[t]
        if r > 1.0:
            r = 1.0
            clamps += 1
        elif r < -1.0:
            r = -1.0
            clamps += 1
        v_out[t] = v
        r_out[t] = r
    meta = {
        "rng": RNG_ALGORITHM,
        "x0": [x0.r, x0.sigma2],
        "params": list(map(float, p)),
        "return_factor": k,
        "v_roundoff_clips": roundoff,
    }
    return PredictionSeries(np.array(v_out), np.array(r_out), clamps, seed, meta)
