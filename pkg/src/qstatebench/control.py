"""Piecewise-constant control sequences and the constraints placed on them."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from qstatebench.errors import ConstraintError, InvalidInputError
from qstatebench.qubit import (
    PhysicsConfig,
    QubitState,
    _propagator_entries,
)


@dataclass(frozen=True)
class ConstraintSpec:
    """Admissible controls: bounds, optional M+1 level grid, and max pieces N.

    ``levels_minus_one`` is M; ``None`` means the field is continuous.
    """

    j_min: float = -math.inf
    j_max: float = math.inf
    levels_minus_one: int | None = None
    max_pieces: int = 20

    def __post_init__(self):
        if math.isnan(self.j_min) or math.isnan(self.j_max):
            raise ConstraintError("bounds must not be NaN")
        if self.j_min >= self.j_max:
            raise ConstraintError(f"need j_min < j_max, got [{self.j_min}, {self.j_max}]")
        if self.max_pieces < 1:
            raise ConstraintError(f"max_pieces must be >= 1, got {self.max_pieces}")
        if self.levels_minus_one is not None:
            if self.levels_minus_one < 1:
                raise ConstraintError("levels_minus_one (M) must be >= 1")
            if not self.bounded:
                raise ConstraintError("discrete levels require finite bounds")

    @property
    def bounded(self) -> bool:
        return math.isfinite(self.j_min) and math.isfinite(self.j_max)

    @property
    def has_bounds(self) -> bool:
        return math.isfinite(self.j_min) or math.isfinite(self.j_max)

    @property
    def discrete(self) -> bool:
        return self.levels_minus_one is not None

    def with_pieces(self, n: int) -> ConstraintSpec:
        return ConstraintSpec(self.j_min, self.j_max, self.levels_minus_one, n)


@dataclass(frozen=True)
class ControlSequence:
    """Field values J_1..J_{i_f}, each held for ``dt``."""

    values: tuple[float, ...]
    dt: float

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        if not math.isfinite(self.dt) or self.dt < 0:
            raise InvalidInputError(f"dt must be finite and nonnegative, got {self.dt}")

    def __len__(self) -> int:
        return len(self.values)

    @property
    def i_f(self) -> int:
        return len(self.values)

    def to_record(self) -> dict:
        return {"dt": self.dt, "values": list(self.values)}

    @classmethod
    def from_record(cls, rec: dict) -> ControlSequence:
        return cls(tuple(rec["values"]), rec["dt"])

    def profile_rows(self) -> list[tuple[int, float]]:
        """(step_index, J) rows, 1-based steps."""
        return [(i + 1, v) for i, v in enumerate(self.values)]


@dataclass(frozen=True)
class Trajectory:
    times: tuple[float, ...]
    states: tuple[QubitState, ...] = field(repr=False)

    def __len__(self) -> int:
        return len(self.times)


def action_set(spec: ConstraintSpec) -> list[float]:
    """The M+1 uniformly spaced admissible values, J_min first, J_max last."""
    if not spec.bounded:
        raise ConstraintError("action set needs finite bounds")
    if spec.levels_minus_one is None:
        raise ConstraintError("action set needs a level count M")
    m = spec.levels_minus_one
    step = (spec.j_max - spec.j_min) / m
    values = [spec.j_min + k * step for k in range(m)]
    values.append(spec.j_max)
    return values


def clamp(J: float, spec: ConstraintSpec) -> float:
    return min(max(J, spec.j_min), spec.j_max)


def clamp_array(J: np.ndarray, spec: ConstraintSpec) -> np.ndarray:
    if not spec.has_bounds:
        return J
    return np.clip(J, spec.j_min, spec.j_max)


def snap_values(values: Iterable[float], grid: Sequence[float]) -> list[float]:
    """Nearest grid value per entry; exact ties go to the larger grid value."""
    g = sorted(float(x) for x in grid)
    if not g:
        raise InvalidInputError("grid must be nonempty")
    out = []
    for v in values:
        best = g[0]
        best_d = abs(v - best)
        for x in g[1:]:
            d = abs(v - x)
            if d <= best_d:
                best, best_d = x, d
        out.append(best)
    return out


def snap_to_grid(seq: ControlSequence, grid: Sequence[float]) -> ControlSequence:
    return ControlSequence(tuple(snap_values(seq.values, grid)), seq.dt)


def posthoc_grid(seq: ControlSequence, levels_minus_one: int) -> list[float]:
    """M+1 level grid spanning the sequence's own min and max.

    A constant sequence yields the single-point grid.
    """
    lo, hi = min(seq.values), max(seq.values)
    if lo == hi:
        return [lo]
    return action_set(ConstraintSpec(lo, hi, levels_minus_one, max(1, len(seq))))


def evolve_amplitudes(a: complex, b: complex, values: Iterable[float], dt: float, h: float):
    """Final amplitudes after applying each piece in order."""
    for J in values:
        u00, u01, u10, u11 = _propagator_entries(J, dt, h)
        a, b = u00 * a + u01 * b, u10 * a + u11 * b
    return a, b


def evolve_sequence(
    psi0: QubitState, seq: ControlSequence, cfg: PhysicsConfig = PhysicsConfig()
) -> tuple[QubitState, Trajectory]:
    times = [0.0]
    states = [psi0]
    psi = psi0
    for i, J in enumerate(seq.values, start=1):
        u00, u01, u10, u11 = _propagator_entries(J, seq.dt, cfg.h)
        psi = QubitState(u00 * psi.amp0 + u01 * psi.amp1, u10 * psi.amp0 + u11 * psi.amp1)
        times.append(i * seq.dt)
        states.append(psi)
    return psi, Trajectory(tuple(times), tuple(states))


def sequence_fidelity(
    seq: ControlSequence,
    psi0: QubitState,
    target: QubitState,
    cfg: PhysicsConfig = PhysicsConfig(),
) -> float:
    return values_fidelity(seq.values, seq.dt, psi0, target, cfg.h)


def values_fidelity(
    values: Iterable[float], dt: float, psi0: QubitState, target: QubitState, h: float
) -> float:
    a, b = evolve_amplitudes(psi0.amp0, psi0.amp1, values, dt, h)
    overlap = target.amp0.conjugate() * a + target.amp1.conjugate() * b
    norm2 = abs(a) ** 2 + abs(b) ** 2
    return min(1.0, abs(overlap) ** 2 / norm2)


__all__ = [
    "ConstraintSpec",
    "ControlSequence",
    "Trajectory",
    "action_set",
    "clamp",
    "clamp_array",
    "evolve_amplitudes",
    "evolve_sequence",
    "posthoc_grid",
    "sequence_fidelity",
    "snap_to_grid",
    "snap_values",
    "values_fidelity",
]
