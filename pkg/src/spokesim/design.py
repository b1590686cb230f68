"""Robot body parameterization and design-selection models.

The robot is a wheel of ``n`` identical flat modules (spokes), each an
elastomer plate with an embedded liquid-metal coil, joined at a central hub.
This module holds the geometric/electrical data types plus the scalar models
used to size the robot: envelope roundness, rolling smoothness, module-count
trade-off scoring, spoke buckling, coil resistance, and folded-volume
estimates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .constants import GALINSTAN_RESISTIVITY, GRAVITY


class DesignError(ValueError):
    """Raised for invalid design parameters."""


@dataclass(frozen=True)
class ModuleDims:
    """Single-module plate dimensions, millimetres."""

    length: float = 16.0
    width: float = 14.0
    thickness: float = 2.0
    channel_width: float = 0.5
    channel_height: float = 0.4
    channel_gap: float = 1.0

    def __post_init__(self):
        for name in ("length", "width", "thickness", "channel_width",
                     "channel_height", "channel_gap"):
            if getattr(self, name) <= 0:
                raise DesignError(f"module dimension {name} must be > 0")
        if self.channel_width > self.width:
            raise DesignError("channel_width must not exceed module width")

    @property
    def conductor_area_m2(self) -> float:
        return (self.channel_width * 1e-3) * (self.channel_height * 1e-3)


@dataclass(frozen=True)
class CoilLayout:
    """Closed conductor path of one module's coil.

    ``segments`` is an (N, 2, 3) array of start/end points in metres;
    ``signs`` carries the current direction of each segment (+1 along the
    segment vector).  ``turns`` means the drawn circuit is traversed that
    many times: path length and loop area both scale with it.
    """

    segments: np.ndarray
    signs: np.ndarray
    turns: int = 1
    conductor_area: float = 2.0e-7  # m^2

    def __post_init__(self):
        seg = np.asarray(self.segments, dtype=float)
        if seg.ndim != 3 or seg.shape[1:] != (2, 3):
            raise DesignError("segments must have shape (N, 2, 3)")
        if self.turns < 1:
            raise DesignError("turns must be >= 1")
        if self.conductor_area <= 0:
            raise DesignError("conductor_area must be > 0")
        object.__setattr__(self, "segments", seg)
        object.__setattr__(self, "signs", np.asarray(self.signs, dtype=float))

    def is_closed(self, tol: float = 1e-9) -> bool:
        seg = self.segments
        for i in range(len(seg)):
            nxt = seg[(i + 1) % len(seg)]
            if np.linalg.norm(seg[i][1] - nxt[0]) > tol:
                return False
        return True

    @property
    def path_length(self) -> float:
        """Total conductor length in metres, including turns."""
        per_pass = float(np.linalg.norm(
            self.segments[:, 1, :] - self.segments[:, 0, :], axis=1).sum())
        return per_pass * self.turns


@dataclass(frozen=True)
class RobotDesign:
    """Full robot parameterization.

    Geometric fields are in the units conventional for desk-scale robots
    (mm, g); SI accessors are provided for the physics code.  The default
    values describe the reference six-spoke build: 31.5 mm rolling diameter,
    3.84 g, 0.19 ohm per module.
    """

    n_modules: int = 6
    module: ModuleDims = field(default_factory=ModuleDims)
    coil: CoilLayout | None = None
    hub_radius: float = 2.0          # mm
    circumradius: float = 15.75      # mm
    total_mass: float = 3.84         # g
    resistance_per_module: float = 0.19  # ohm
    elastomer_modulus: float = 6.0e5     # Pa
    hinge_stiffness: float = 2.5e-3      # N*m/rad, calibrated

    def __post_init__(self):
        if self.n_modules < 3:
            raise DesignError("n_modules must be >= 3")
        if self.circumradius <= 0 or self.total_mass <= 0:
            raise DesignError("circumradius and total_mass must be > 0")
        if self.circumradius > self.hub_radius + self.module.length:
            raise DesignError(
                "circumradius cannot exceed hub_radius + module length")
        if self.coil is None:
            object.__setattr__(self, "coil", make_spiral_coil(self.module))

    @property
    def mass_kg(self) -> float:
        return self.total_mass * 1e-3

    @property
    def circumradius_m(self) -> float:
        return self.circumradius * 1e-3

    @property
    def side_length_m(self) -> float:
        """Envelope polygon side length (= circumradius for n=6)."""
        return 2.0 * self.circumradius_m * math.sin(math.pi / self.n_modules)

    @property
    def sector_angle(self) -> float:
        return 2.0 * math.pi / self.n_modules

    def body_inertia(self) -> float:
        """Central inertia of a uniform regular-polygon lamina, kg*m^2."""
        return polygon_lamina_inertia(self.n_modules, self.circumradius_m,
                                      self.mass_kg)

    def pivot_inertia(self) -> float:
        """Inertia about a rim vertex (parallel axis), kg*m^2."""
        return self.body_inertia() + self.mass_kg * self.circumradius_m ** 2

    def module_hinge_inertia(self) -> float:
        """Swing inertia of one module plate about its hub-side hinge."""
        m_mod = self.mass_kg / self.n_modules
        length_m = self.module.length * 1e-3
        return m_mod * length_m ** 2 / 3.0

    def posture_heights(self, axial_margin: float = 2.0) -> dict:
        """Characteristic heights in mm: static standing, rolling max, lying.

        ``axial_margin`` accounts for the hub prism protruding past the
        module stack when the robot lies flat.
        """
        r = self.circumradius
        return {
            "standing": 2.0 * r * math.cos(math.pi / self.n_modules),
            "rolling": 2.0 * r,
            "lying": self.module.width + axial_margin,
        }


def polygon_lamina_inertia(n: int, circumradius: float, mass: float) -> float:
    """Moment of inertia of a uniform regular n-gon lamina about its center.

    Exact triangle decomposition; for a hexagon this equals (5/12) m R^2.
    """
    if n < 3:
        raise DesignError("polygon needs n >= 3")
    alpha = math.pi / n
    verts = [(circumradius * math.cos(2 * alpha * k),
              circumradius * math.sin(2 * alpha * k)) for k in range(n)]
    num = 0.0
    den = 0.0
    for i in range(n):
        x0, y0 = verts[i]
        x1, y1 = verts[(i + 1) % n]
        cross = x0 * y1 - x1 * y0
        num += cross * (x0 * x0 + x0 * x1 + x1 * x1 +
                        y0 * y0 + y0 * y1 + y1 * y1)
        den += cross
    return mass * num / (6.0 * den)


def envelope_roundness(n: int) -> float:
    """Inradius/circumradius of the regular n-gon envelope, cos(pi/n)."""
    if n < 3:
        raise DesignError("envelope needs n >= 3")
    return math.cos(math.pi / n)


def com_oscillation(n: int, circumradius_mm: float) -> float:
    """Vertical CoM travel amplitude during ideal polygon rolling, mm."""
    if n < 3:
        raise DesignError("polygon rolling needs n >= 3")
    if circumradius_mm <= 0:
        raise DesignError("circumradius must be > 0")
    return circumradius_mm * (1.0 - math.cos(math.pi / n))


# Normalization anchors for the module-count trade-off, chosen once over the
# physically sensible range of spoke counts.
_N_LO, _N_HI = 3, 12
_DEFAULT_WEIGHTS = (1.0, 0.2, 0.2)


def _normalized_inverse_n(n: int) -> float:
    return (1.0 / n - 1.0 / _N_HI) / (1.0 / _N_LO - 1.0 / _N_HI)


def foldability_metric(n: int) -> float:
    """Fold compactness proxy: fewer spokes fold into a thinner stack."""
    return _normalized_inverse_n(n)


def clearance_metric(n: int, design: RobotDesign | None = None) -> float:
    """Obstacle-clearance proxy: normalized free sector angle between spokes."""
    d = design or RobotDesign()
    width_ang = 2.0 * math.atan((d.module.thickness / 2.0) / d.circumradius)

    def gap(k):
        return 2.0 * math.pi / k - width_ang

    return (gap(n) - gap(_N_HI)) / (gap(_N_LO) - gap(_N_HI))


def design_score(n: int, weights: tuple[float, float, float] = _DEFAULT_WEIGHTS,
                 design: RobotDesign | None = None) -> float:
    """Weighted module-count score: roundness vs foldability vs clearance."""
    w_r, w_f, w_c = weights
    if w_r < 0 or w_f < 0 or w_c < 0 or (w_r + w_f + w_c) == 0:
        raise DesignError("weights must be >= 0 and not all zero")
    return (w_r * envelope_roundness(n)
            + w_f * foldability_metric(n)
            + w_c * clearance_metric(n, design))


def select_module_count(weights: tuple[float, float, float] = _DEFAULT_WEIGHTS,
                        n_range: range | list | None = None) -> int:
    """Spoke count maximizing the trade-off score; smallest n breaks ties."""
    candidates = list(n_range) if n_range is not None else list(range(3, 13))
    if not candidates:
        raise DesignError("empty module-count range")
    best_n, best_s = None, -math.inf
    for n in sorted(candidates):
        s = design_score(n, weights)
        if s > best_s + 1e-12:
            best_n, best_s = n, s
    return best_n


def buckling_safety(dims: ModuleDims, modulus: float, load: float,
                    end_factor: float = 2.0) -> dict:
    """Euler column check of a single supporting spoke.

    Fixed-free end condition by default (clamped at the hub, free at the
    ground tip).  ``modulus`` in Pa, ``load`` in N.  Returns critical load
    and safety factor; a zero modulus is accepted as a degenerate limit.
    """
    if modulus < 0 or load <= 0:
        raise DesignError("modulus must be >= 0 and load > 0")
    width_m = dims.width * 1e-3
    thick_m = dims.thickness * 1e-3
    length_m = dims.length * 1e-3
    i_min = width_m * thick_m ** 3 / 12.0
    p_cr = math.pi ** 2 * modulus * i_min / (end_factor * length_m) ** 2
    return {"critical_load": p_cr, "safety_factor": p_cr / load}


def coil_resistance(coil: CoilLayout) -> float:
    """DC resistance of the liquid-metal path, ohms."""
    if not coil.is_closed():
        raise DesignError("coil circuit is not closed")
    if coil.conductor_area <= 0:
        raise DesignError("conductor area must be > 0")
    return GALINSTAN_RESISTIVITY * coil.path_length / coil.conductor_area


def make_rect_loop(length_m: float, width_m: float, turns: int = 1,
                   conductor_area: float = 2.0e-7) -> CoilLayout:
    """Single rectangular loop in the x-y plane, for tests and simple models."""
    a, b = length_m, width_m
    pts = [(0, 0, 0), (a, 0, 0), (a, b, 0), (0, b, 0)]
    segments = [(pts[i], pts[(i + 1) % 4]) for i in range(4)]
    return CoilLayout(segments=np.array(segments, dtype=float),
                      signs=np.ones(4), turns=turns,
                      conductor_area=conductor_area)


def make_spiral_coil(dims: ModuleDims | None = None, loops: int = 3) -> CoilLayout:
    """Default planar coil: inward rectangular spiral plus a closing return.

    Spiral pitch is channel width plus insulation gap.  With the default
    module dimensions the summed path is ~0.15 m, giving ~0.22 ohm, within
    the build tolerance of the measured 0.19 ohm per module.
    """
    d = dims or ModuleDims()
    pitch = (d.channel_width + d.channel_gap) * 1e-3
    a = d.length * 1e-3
    b = d.width * 1e-3
    pts = [np.array([0.0, 0.0, 0.0])]
    x0, y0, x1, y1 = 0.0, 0.0, a, b
    for _ in range(loops):
        pts.append(np.array([x1, y0, 0.0]))
        pts.append(np.array([x1, y1, 0.0]))
        pts.append(np.array([x0 + pitch, y1, 0.0]))
        x0 += pitch
        y0 += pitch
        x1 -= pitch
        y1 -= pitch
        pts.append(np.array([x0, y0, 0.0]))
    pts.append(pts[0].copy())  # closing return jumper
    segments = [(pts[i], pts[i + 1]) for i in range(len(pts) - 1)]
    return CoilLayout(segments=np.array(segments, dtype=float),
                      signs=np.ones(len(segments)),
                      turns=1, conductor_area=d.conductor_area_m2)


def fold_metrics(design: RobotDesign, compression: float = 0.795) -> dict:
    """Folded-configuration estimate: spokes wrapped around the hub.

    Wrapping conserves cross-section area: each module contributes
    length * effective thickness of wall, where ``compression`` models the
    squeeze of the soft plates in the wrap (<1).  Returns folded diameter
    (mm) and folded/unfolded bounding-cylinder volume ratio.
    """
    r_h = design.hub_radius * 1e-3
    length_m = design.module.length * 1e-3
    t_eff = design.module.thickness * 1e-3 * compression
    wrap_area = design.n_modules * length_m * t_eff
    r_f = math.sqrt(r_h ** 2 + wrap_area / math.pi)
    if length_m > 2.0 * math.pi * max(r_f, r_h):
        raise DesignError("module longer than wrap circumference; fold infeasible")
    folded_diameter = 2.0 * r_f * 1e3
    ratio = (r_f / design.circumradius_m) ** 2
    return {"folded_diameter": folded_diameter, "volume_ratio": ratio}


def build_default_design() -> RobotDesign:
    """The reference six-spoke robot with all default parameters."""
    return RobotDesign()


def weight_newtons(design: RobotDesign) -> float:
    return design.mass_kg * GRAVITY


# --- design file I/O -------------------------------------------------------

_DESIGN_KEYS = {
    "n_modules": int,
    "module.length": float,
    "module.width": float,
    "module.thickness": float,
    "module.channel_width": float,
    "module.channel_height": float,
    "module.channel_gap": float,
    "hub_radius": float,
    "circumradius": float,
    "total_mass": float,
    "resistance_per_module": float,
    "elastomer_modulus": float,
    "hinge_stiffness": float,
    "coil.loops": int,
}


def load_design(path) -> RobotDesign:
    """Load a key-value design file; unknown keys or bad values are rejected."""
    from .config import parse_kv_file

    raw = parse_kv_file(path, allowed=_DESIGN_KEYS)
    module_kwargs = {}
    design_kwargs = {}
    loops = 3
    for key, value in raw.items():
        if key.startswith("module."):
            module_kwargs[key.split(".", 1)[1]] = value
        elif key == "coil.loops":
            loops = value
        else:
            design_kwargs[key] = value
    dims = ModuleDims(**module_kwargs)
    design = RobotDesign(module=dims, coil=make_spiral_coil(dims, loops=loops),
                         **design_kwargs)
    return design


def save_design(design: RobotDesign, path) -> None:
    lines = [
        f"n_modules = {design.n_modules}",
        f"module.length = {design.module.length:g}",
        f"module.width = {design.module.width:g}",
        f"module.thickness = {design.module.thickness:g}",
        f"module.channel_width = {design.module.channel_width:g}",
        f"module.channel_height = {design.module.channel_height:g}",
        f"module.channel_gap = {design.module.channel_gap:g}",
        f"hub_radius = {design.hub_radius:g}",
        f"circumradius = {design.circumradius:g}",
        f"total_mass = {design.total_mass:g}",
        f"resistance_per_module = {design.resistance_per_module:g}",
        f"elastomer_modulus = {design.elastomer_modulus:g}",
        f"hinge_stiffness = {design.hinge_stiffness:g}",
    ]
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
