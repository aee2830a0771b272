"""Exact two-level dynamics for H(J) = 4 J sigma_z + h sigma_x.

States and propagators are small immutable value types built on Python
complex numbers; for 2x2 algebra this is considerably faster than numpy and
keeps every operation pure.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from qstatebench.errors import InvalidInputError

_POLE_EPS = 1e-9


@dataclass(frozen=True)
class PhysicsConfig:
    """Transverse field ``h`` (the energy unit) and total evolution time."""

    h: float = 1.0
    total_time: float = 2 * math.pi

    def __post_init__(self):
        if not (math.isfinite(self.h) and self.h > 0):
            raise InvalidInputError(f"h must be positive and finite, got {self.h}")
        if not (math.isfinite(self.total_time) and self.total_time > 0):
            raise InvalidInputError(f"total_time must be positive, got {self.total_time}")


@dataclass(frozen=True)
class QubitState:
    """Pure state amp0|0> + amp1|1>, normalized on construction."""

    amp0: complex
    amp1: complex

    def __post_init__(self):
        a, b = complex(self.amp0), complex(self.amp1)
        norm = math.sqrt(abs(a) ** 2 + abs(b) ** 2)
        if not math.isfinite(norm) or norm == 0.0:
            raise InvalidInputError("state amplitudes must be finite and not both zero")
        object.__setattr__(self, "amp0", a / norm)
        object.__setattr__(self, "amp1", b / norm)

    @property
    def norm(self) -> float:
        return math.sqrt(abs(self.amp0) ** 2 + abs(self.amp1) ** 2)

    def as_array(self) -> np.ndarray:
        return np.array([self.amp0, self.amp1], dtype=complex)


KET0 = QubitState(1.0, 0.0)
KET1 = QubitState(0.0, 1.0)


@dataclass(frozen=True)
class Unitary2:
    """2x2 matrix [[u00, u01], [u10, u11]]."""

    u00: complex
    u01: complex
    u10: complex
    u11: complex

    def as_array(self) -> np.ndarray:
        return np.array([[self.u00, self.u01], [self.u10, self.u11]], dtype=complex)

    def dagger(self) -> Unitary2:
        c = complex.conjugate
        return Unitary2(c(self.u00), c(self.u10), c(self.u01), c(self.u11))

    def __matmul__(self, other: Unitary2) -> Unitary2:
        return Unitary2(
            self.u00 * other.u00 + self.u01 * other.u10,
            self.u00 * other.u01 + self.u01 * other.u11,
            self.u10 * other.u00 + self.u11 * other.u10,
            self.u10 * other.u01 + self.u11 * other.u11,
        )

    @classmethod
    def identity(cls) -> Unitary2:
        return cls(1.0 + 0j, 0j, 0j, 1.0 + 0j)


def _propagator_entries(J: float, dt: float, h: float):
    # exp(-i H dt) = cos(W dt) I - i sin(W dt) H / W,  W = sqrt((4J)^2 + h^2) >= h > 0
    jz = 4.0 * J
    w = math.sqrt(jz * jz + h * h)
    c = math.cos(w * dt)
    s = math.sin(w * dt) / w
    off = complex(0.0, -s * h)
    return complex(c, -s * jz), off, off, complex(c, s * jz)


def propagator(J: float, dt: float, cfg: PhysicsConfig = PhysicsConfig()) -> Unitary2:
    """Closed-form exp{-i (4 J sigma_z + h sigma_x) dt}."""
    if not (math.isfinite(J) and math.isfinite(dt)):
        raise InvalidInputError(f"J and dt must be finite, got J={J}, dt={dt}")
    if dt < 0:
        raise InvalidInputError(f"dt must be nonnegative, got {dt}")
    return Unitary2(*_propagator_entries(J, dt, cfg.h))


def evolve(state: QubitState, U: Unitary2) -> QubitState:
    a, b = state.amp0, state.amp1
    return QubitState(U.u00 * a + U.u01 * b, U.u10 * a + U.u11 * b)


def fidelity(a: QubitState, b: QubitState) -> float:
    """|<a|b>|^2."""
    overlap = a.amp0.conjugate() * b.amp0 + a.amp1.conjugate() * b.amp1
    return min(1.0, abs(overlap) ** 2)


def bloch_angles(state: QubitState) -> tuple[float, float]:
    """Polar and azimuthal angles; azimuth is 0 at either pole."""
    r0 = min(1.0, abs(state.amp0))
    theta = 2.0 * math.acos(r0)
    if r0 < _POLE_EPS or math.sin(theta / 2) < _POLE_EPS:
        return theta, 0.0
    phi = (cmath.phase(state.amp1) - cmath.phase(state.amp0)) % (2 * math.pi)
    if phi >= 2 * math.pi:
        phi = 0.0
    return theta, phi


def state_from_angles(theta: float, phi: float) -> QubitState:
    if not (0.0 <= theta <= math.pi) or not (0.0 <= phi < 2 * math.pi):
        raise InvalidInputError(f"angles out of range: theta={theta}, phi={phi}")
    return QubitState(math.cos(theta / 2), cmath.exp(1j * phi) * math.sin(theta / 2))


def equator_target(phi: float) -> QubitState:
    """(|0> + e^{i phi}|1>)/sqrt(2)."""
    if not (0.0 <= phi < 2 * math.pi):
        raise InvalidInputError(f"phi must lie in [0, 2pi), got {phi}")
    return QubitState(1.0, cmath.exp(1j * phi))


def bloch_vector(state: QubitState) -> tuple[float, float, float]:
    """Cartesian Bloch coordinates (x, y, z)."""
    rho01 = state.amp0 * state.amp1.conjugate()
    x = 2.0 * rho01.real
    y = -2.0 * rho01.imag
    z = abs(state.amp0) ** 2 - abs(state.amp1) ** 2
    return x, y, z
