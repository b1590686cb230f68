"""Terrain profiles as piecewise-linear chains with contact queries.

The ground is the solid region below a left-to-right polyline; vertical
risers are allowed (steps).  Contact queries return penetration depth and
the outward surface normal for robot vertices.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field

import numpy as np


class TerrainError(ValueError):
    pass


@dataclass
class TerrainProfile:
    kind: str
    points: np.ndarray  # (N, 2), x non-decreasing
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) < 2:
            raise TerrainError("terrain needs at least two (x, y) points")
        if np.any(np.diff(pts[:, 0]) < -1e-12):
            raise TerrainError("terrain x coordinates must be non-decreasing")
        if not np.all(np.isfinite(pts)):
            raise TerrainError("terrain points must be finite")
        self.points = pts
        self._xs = pts[:, 0]
        self._flat = bool(np.allclose(pts[:, 1], pts[0, 1]))
        self._y0 = float(pts[0, 1])
        # Precomputed segment geometry.
        a = pts[:-1]
        b = pts[1:]
        d = b - a
        lengths = np.hypot(d[:, 0], d[:, 1])
        keep = lengths > 1e-12
        self._a = a[keep]
        self._d = d[keep]
        self._len2 = (lengths[keep]) ** 2
        normals = np.stack([-d[keep][:, 1], d[keep][:, 0]], axis=1)
        self._n = normals / np.linalg.norm(normals, axis=1, keepdims=True)
        self._seg_xlo = np.minimum(self._a[:, 0], self._a[:, 0] + self._d[:, 0])
        self._seg_xhi = np.maximum(self._a[:, 0], self._a[:, 0] + self._d[:, 0])

    def height(self, x: float) -> float:
        """Upper envelope height at x (max over covering segments)."""
        if self._flat:
            return self._y0
        pts = self.points
        if x <= pts[0, 0]:
            return float(pts[0, 1])
        if x >= pts[-1, 0]:
            return float(pts[-1, 1])
        i = bisect.bisect_right(self._xs, x) - 1
        best = -math.inf
        for j in (i - 1, i, i + 1):
            if j < 0 or j >= len(pts) - 1:
                continue
            x0, y0 = pts[j]
            x1, y1 = pts[j + 1]
            if x0 - 1e-12 <= x <= x1 + 1e-12:
                if x1 - x0 > 1e-12:
                    y = y0 + (y1 - y0) * (x - x0) / (x1 - x0)
                else:
                    y = max(y0, y1)
                best = max(best, y)
        return best if best > -math.inf else float(pts[i, 1])

    def contact(self, px: float, py: float, margin: float = 0.02):
        """Deepest-feature contact at a point.

        Returns (depth, normal) with depth > 0 when penetrating, else None.
        """
        if self._flat:
            depth = self._y0 - py
            return (depth, (0.0, 1.0)) if depth > 0 else None
        lo = bisect.bisect_left(self._seg_xhi, px - margin)
        hi = bisect.bisect_right(self._seg_xlo, px + margin)
        best = None
        for j in range(lo, min(hi, len(self._a))):
            ax, ay = self._a[j]
            dx, dy = self._d[j]
            t = ((px - ax) * dx + (py - ay) * dy) / self._len2[j]
            if t <= 1e-9 or t >= 1 - 1e-9:
                continue
            qx, qy = ax + t * dx, ay + t * dy
            nx, ny = self._n[j]
            d_signed = (px - qx) * nx + (py - qy) * ny
            if d_signed < 0:
                depth = -d_signed
                if best is None or depth < best[0]:
                    best = (depth, (float(nx), float(ny)))
        if best is None:
            h = self.height(px)
            if py < h:
                return (h - py, (0.0, 1.0))
        return best


def flat(length: float = 10.0, y: float = 0.0) -> TerrainProfile:
    return TerrainProfile("flat", [(-length / 2, y), (length / 2, y)])


def wedge_series(base_mm: float = 20.0, angle_deg: float = 20.0,
                 count: int = 3, start_x: float = 0.05,
                 lead: float = 1.0) -> TerrainProfile:
    """Triangular wedge blocks in a row on otherwise flat ground."""
    base = base_mm * 1e-3
    h = (base / 2.0) * math.tan(math.radians(angle_deg))
    pts = [(-lead, 0.0), (start_x, 0.0)]
    x = start_x
    for _ in range(count):
        pts.append((x + base / 2, h))
        pts.append((x + base, 0.0))
        x += base
    pts.append((x + lead, 0.0))
    return TerrainProfile("wedge_series", pts,
                          {"base_mm": base_mm, "angle_deg": angle_deg,
                           "count": count, "start_x": start_x})


def step_series(height_mm: float = 10.0, width_mm: float = 120.0,
                count: int = 1, start_x: float = 0.06,
                lead: float = 1.0) -> TerrainProfile:
    """Rectangular obstacles: vertical riser, flat top, vertical drop."""
    h = height_mm * 1e-3
    w = width_mm * 1e-3
    pts = [(-lead, 0.0), (start_x, 0.0)]
    x = start_x
    for _ in range(count):
        pts.append((x, h))
        pts.append((x + w, h))
        pts.append((x + w, 0.0))
        x += w + 0.04
    pts.append((x + lead, 0.0))
    return TerrainProfile("step_series", pts,
                          {"height_mm": height_mm, "width_mm": width_mm,
                           "count": count, "start_x": start_x})


def square_wave(period_mm: float = 30.0, amplitude_mm: float = 3.0,
                count: int = 12, start_x: float = 0.05,
                lead: float = 1.0) -> TerrainProfile:
    p = period_mm * 1e-3
    a = amplitude_mm * 1e-3
    pts = [(-lead, 0.0), (start_x, 0.0)]
    x = start_x
    for _ in range(count):
        pts.append((x, a))
        pts.append((x + p / 2, a))
        pts.append((x + p / 2, 0.0))
        pts.append((x + p, 0.0))
        x += p
    pts.append((x + lead, 0.0))
    return TerrainProfile("square_wave", pts,
                          {"period_mm": period_mm, "amplitude_mm": amplitude_mm})


def sine_wave(period_mm: float = 30.0, amplitude_mm: float = 3.0,
              count: int = 12, start_x: float = 0.05, lead: float = 1.0,
              pts_per_period: int = 16) -> TerrainProfile:
    p = period_mm * 1e-3
    a = amplitude_mm * 1e-3
    pts = [(-lead, 0.0)]
    n = count * pts_per_period
    for i in range(n + 1):
        x = start_x + i * p / pts_per_period
        pts.append((x, a * 0.5 * (1 - math.cos(2 * math.pi * i / pts_per_period))))
    pts.append((start_x + count * p + lead, 0.0))
    return TerrainProfile("sine_wave", pts,
                          {"period_mm": period_mm, "amplitude_mm": amplitude_mm})


def rugae(period_mm: float = 25.0, amplitude_mm: float = 2.5,
          count: int = 16, start_x: float = 0.05,
          lead: float = 1.0) -> TerrainProfile:
    """Ridged soft-tissue-like profile: two superposed harmonics."""
    p = period_mm * 1e-3
    a = amplitude_mm * 1e-3
    pts = [(-lead, 0.0)]
    n = count * 20
    for i in range(n + 1):
        u = 2 * math.pi * i / 20
        x = start_x + i * p / 20
        y = a * (0.5 * (1 - math.cos(u)) + 0.2 * (1 - math.cos(2 * u + 0.7)))
        pts.append((x, y))
    pts.append((start_x + count * p + lead, 0.0))
    return TerrainProfile("rugae", pts, {"period_mm": period_mm})


def shore(water_x: float = 0.12, depth_mm: float = 25.0,
          ramp_mm: float = 60.0, lead: float = 1.0) -> TerrainProfile:
    """Submerged flat bed ramping up to dry land at water_x."""
    d = depth_mm * 1e-3
    r = ramp_mm * 1e-3
    pts = [(-lead, -d), (water_x - r, -d), (water_x, 0.0), (water_x + lead, 0.0)]
    return TerrainProfile("shore", pts, {"water_x": water_x, "depth_mm": depth_mm})


_BUILDERS = {
    "flat": flat,
    "wedge_series": wedge_series,
    "step_series": step_series,
    "square_wave": square_wave,
    "sine_wave": sine_wave,
    "rugae": rugae,
    "shore": shore,
}


def build_terrain(kind: str, **params) -> TerrainProfile:
    if kind not in _BUILDERS:
        raise TerrainError(f"unknown terrain kind {kind!r}")
    return _BUILDERS[kind](**params)
