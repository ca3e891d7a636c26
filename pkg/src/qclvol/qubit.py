"""Exact single-qubit state-vector arithmetic.

Gates use the half-angle convention::

    RY(a) = [[cos a/2, -sin a/2], [sin a/2, cos a/2]]
    RZ(a) = diag(exp(-i a/2), exp(+i a/2))

Global phase is never observable here; only the |0> probability is read out.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import InvalidArgumentError

TWO_PI = 2.0 * math.pi
_NORM_TOL = 1e-9


def _check_finite(*values: float) -> None:
    for v in values:
        if not math.isfinite(v):
            raise InvalidArgumentError(f"angle must be finite, got {v!r}")


@dataclass(frozen=True)
class QubitState:
    a0: complex
    a1: complex

    def __post_init__(self):
        norm = abs(self.a0) ** 2 + abs(self.a1) ** 2
        if not abs(norm - 1.0) <= _NORM_TOL:
            raise InvalidArgumentError(f"state is not normalized (|a|^2 = {norm!r})")

    @property
    def norm2(self) -> float:
        return abs(self.a0) ** 2 + abs(self.a1) ** 2


ZERO = QubitState(1.0 + 0j, 0j)
ONE = QubitState(0j, 1.0 + 0j)


@dataclass(frozen=True)
class Unitary2:
    """A 2x2 complex matrix stored row-major as ``(u00, u01, u10, u11)``."""

    u00: complex
    u01: complex
    u10: complex
    u11: complex

    def __matmul__(self, other: Unitary2) -> Unitary2:
        return Unitary2(
            self.u00 * other.u00 + self.u01 * other.u10,
            self.u00 * other.u01 + self.u01 * other.u11,
            self.u10 * other.u00 + self.u11 * other.u10,
            self.u10 * other.u01 + self.u11 * other.u11,
        )

    def dagger(self) -> Unitary2:
        return Unitary2(
            self.u00.conjugate(), self.u10.conjugate(),
            self.u01.conjugate(), self.u11.conjugate(),
        )

    def as_array(self) -> np.ndarray:
        return np.array([[self.u00, self.u01], [self.u10, self.u11]], dtype=complex)

    def unitarity_error(self) -> float:
        """Largest entrywise deviation of U^dagger U from the identity."""
        g = (self.dagger() @ self).as_array()
        return float(np.max(np.abs(g - np.eye(2))))


IDENTITY = Unitary2(1 + 0j, 0j, 0j, 1 + 0j)


class CircuitParams(NamedTuple):
    """Trainable angles of the readout unitary, in radians."""

    theta: float
    lam: float
    phi: float

    def canonical(self) -> CircuitParams:
        return CircuitParams(*(float(np.mod(a, TWO_PI)) for a in self))

    def is_finite(self) -> bool:
        return all(math.isfinite(a) for a in self)


def ry(angle: float) -> Unitary2:
    _check_finite(angle)
    c, s = math.cos(angle / 2), math.sin(angle / 2)
    return Unitary2(complex(c), complex(-s), complex(s), complex(c))


def rz(angle: float) -> Unitary2:
    _check_finite(angle)
    return Unitary2(cmath.exp(-0.5j * angle), 0j, 0j, cmath.exp(0.5j * angle))


def u_gate(p: CircuitParams) -> Unitary2:
    theta, lam, phi = p
    _check_finite(theta, lam, phi)
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return Unitary2(
        complex(c),
        -cmath.exp(1j * lam) * s,
        cmath.exp(1j * phi) * s,
        cmath.exp(1j * (lam + phi)) * c,
    )


def apply(u: Unitary2, s: QubitState) -> QubitState:
    return QubitState(u.u00 * s.a0 + u.u01 * s.a1, u.u10 * s.a0 + u.u11 * s.a1)


def prob0(s: QubitState) -> float:
    return abs(s.a0) ** 2


def apply_batch(u: Unitary2, amps: np.ndarray) -> np.ndarray:
    """Apply ``u`` to every row of an ``(n, 2)`` amplitude array."""
    out = np.empty_like(amps)
    out[:, 0] = u.u00 * amps[:, 0] + u.u01 * amps[:, 1]
    out[:, 1] = u.u10 * amps[:, 0] + u.u11 * amps[:, 1]
    return out
