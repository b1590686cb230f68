"""Electromagnetic actuation primitives: Laplace forces and coil torques.

All coils sit in a spatially uniform static field, so a closed circuit feels
zero net force and actuation reduces to the moment-field couple m x B.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constants import CURRENT_LIMIT
from .design import CoilLayout, DesignError


class ActuationError(ValueError):
    pass


@dataclass(frozen=True)
class MagneticField:
    """Uniform static field: unit direction and magnitude in tesla."""

    direction: tuple[float, float, float]
    magnitude: float

    def __post_init__(self):
        d = np.asarray(self.direction, dtype=float)
        norm = float(np.linalg.norm(d))
        if abs(norm - 1.0) > 1e-12:
            if norm == 0:
                raise ActuationError("field direction must be a unit vector")
            d = d / norm
        if self.magnitude < 0:
            raise ActuationError("field magnitude must be >= 0")
        object.__setattr__(self, "direction", tuple(float(x) for x in d))

    @property
    def vector(self) -> np.ndarray:
        return np.asarray(self.direction) * self.magnitude

    @property
    def plane_angle(self) -> float:
        """Angle of the in-plane (x, y) component, radians."""
        return math.atan2(self.direction[1], self.direction[0])


@dataclass(frozen=True)
class CurrentCommand:
    """One module's drive: signed amplitude (A) for a duration (s)."""

    module_id: int
    amplitude: float
    duration: float

    def __post_init__(self):
        if abs(self.amplitude) > CURRENT_LIMIT + 1e-12:
            raise ActuationError(
                f"|amplitude| {abs(self.amplitude):.3f} A exceeds the "
                f"{CURRENT_LIMIT:.0f} A driver limit")
        if self.duration <= 0:
            raise ActuationError("duration must be > 0")
        if self.module_id < 0:
            raise ActuationError("module_id must be >= 0")


def segment_force(current: float, segment: np.ndarray,
                  field: MagneticField) -> np.ndarray:
    """Laplace force on a straight conductor: F = I * (L x B)."""
    seg = np.asarray(segment, dtype=float)
    return current * np.cross(seg, field.vector)


def coil_moment(coil: CoilLayout, current: float) -> np.ndarray:
    """Magnetic moment of a closed polygonal circuit: m = (I/2) * sum r x dl.

    Exact for any closed polyline; for a planar loop this is I * area * n,
    scaled by the winding count.
    """
    if not coil.is_closed():
        raise ActuationError("coil circuit is open; moment undefined")
    acc = np.zeros(3)
    for (p0, p1), sign in zip(coil.segments, coil.signs):
        acc += sign * np.cross(p0, p1 - p0)
    return 0.5 * current * coil.turns * acc


def module_torque(moment: np.ndarray, field: MagneticField) -> np.ndarray:
    """Torque on a coil of moment m in a uniform field: tau = m x B."""
    return np.cross(np.asarray(moment, dtype=float), field.vector)


def net_coil_force(coil: CoilLayout, current: float,
                   field: MagneticField) -> np.ndarray:
    """Sum of segment forces around the circuit; ~0 for any closed coil."""
    if not coil.is_closed():
        raise ActuationError("coil circuit is open")
    total = np.zeros(3)
    for (p0, p1), sign in zip(coil.segments, coil.signs):
        total += segment_force(current * sign * coil.turns, p1 - p0, field)
    return total


def planar_moment_magnitude(coil: CoilLayout, current: float) -> float:
    """|m| for the planar default coil, used by the rolling-plane models."""
    return float(np.linalg.norm(coil_moment(coil, current)))
