"""Deterministic planar rigid-body engine for the rolling plane.

Semi-implicit Euler with velocity-level contact impulses (inelastic,
Coulomb friction) and positional projection.  Contacts are the spoke tips
against a terrain chain; actuation is the per-module coil torque in the
uniform field.  Optional fluid adds buoyancy, translational and rotational
drag; optional surface adhesion resists vertex detachment.

Everything here is plain float arithmetic with fixed iteration counts, so
identical inputs produce bit-identical traces.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .constants import DEFAULT_DT, GRAVITY, PENETRATION_TOL
from .design import RobotDesign
from .em import MagneticField, planar_moment_magnitude
from .pivot import FIELD_TILT, MOMENT_SPOKE_OFFSET, SPOKE_ANGLE_0
from .schedule import ActuationSchedule
from .terrain import TerrainProfile, flat
from .trace import RobotState, Trace

# Body-frame phase of spoke tip 0; at theta=0 the robot stands on the facet
# between tips 0 and 1.
VERTEX_PHASE = -2.0 * math.pi / 3.0
# Body-frame angle of module 0's coil moment (perpendicular to its spoke).
MOMENT_PHASE = SPOKE_ANGLE_0 + MOMENT_SPOKE_OFFSET


class SimulationBlowup(RuntimeError):
    def __init__(self, message, last_state=None):
        super().__init__(message)
        self.last_state = last_state


@dataclass(frozen=True)
class FluidModel:
    density: float = 1000.0          # kg/m^3
    viscosity: float = 1.0e-3        # Pa*s
    drag_linear: float = 0.0         # N*s/m
    drag_quadratic: float = 0.0      # N*s^2/m^2
    buoyancy_volume: float = 2.75e-6  # m^3
    rot_drag_per_viscosity: float = 0.12  # N*m*s/rad per Pa*s, calibrated

    def __post_init__(self):
        for name in ("density", "viscosity", "drag_linear", "drag_quadratic",
                     "buoyancy_volume", "rot_drag_per_viscosity"):
            if getattr(self, name) < 0:
                raise ValueError(f"fluid {name} must be >= 0")


@dataclass(frozen=True)
class Environment:
    gravity: float = GRAVITY
    terrain: TerrainProfile = field(default_factory=flat)
    friction_mu: float = 0.5
    adhesion: float = 0.0            # N/m of detachment line force
    fluid: FluidModel | None = None
    water_level: float | None = None  # fluid surface y; None = fully immersed
    ceiling: tuple | None = None      # (x0, x1, height) overhead constraint
    rolling_resistance: float = 0.045  # soft-tip hysteresis coefficient

    def __post_init__(self):
        if self.gravity <= 0:
            raise ValueError("gravity must be > 0")
        if self.friction_mu < 0 or self.adhesion < 0:
            raise ValueError("friction and adhesion must be >= 0")
        if self.rolling_resistance < 0:
            raise ValueError("rolling_resistance must be >= 0")


class PlanarEngine:
    """One robot in one environment; owns its state; single-threaded."""

    def __init__(self, design: RobotDesign, env: Environment,
                 b_field: MagneticField, dt: float = DEFAULT_DT,
                 x0: float = 0.0, theta0: float = 0.0,
                 mu_scale: float = 1.0):
        if not (0 < dt <= 1e-3):
            raise ValueError("dt must be in (0, 1 ms]")
        self.design = design
        self.env = env
        self.dt = dt
        self.n = design.n_modules
        self.mass = design.mass_kg
        self.inertia = design.body_inertia()
        self.radius = design.circumradius_m
        self.mu = env.friction_mu * mu_scale
        self.moment_per_amp = planar_moment_magnitude(design.coil, 1.0)
        b = b_field.vector
        self._b_plane = math.hypot(b[0], b[1])
        self._b_angle = math.atan2(b[1], b[0])
        self.sector = design.sector_angle

        self.t = 0.0
        self.step_count = 0
        self.x = x0
        self.theta = theta0
        self.vx = 0.0
        self.vy = 0.0
        self.om = 0.0
        self.y = 0.0
        self._settle_on_ground()
        self.contact_ids: tuple = ()
        self._prev_contact = [False] * self.n
        self.work_input = 0.0
        self._active: list = []   # (module, amplitude) currently on

    # -- geometry -----------------------------------------------------------

    def vertex(self, k: int):
        a = self.theta + VERTEX_PHASE + k * self.sector
        return (self.x + self.radius * math.cos(a),
                self.y + self.radius * math.sin(a))

    def vertices(self):
        return [self.vertex(k) for k in range(self.n)]

    def _settle_on_ground(self):
        drop = -math.inf
        for k in range(self.n):
            a = self.theta + VERTEX_PHASE + k * self.sector
            px = self.x + self.radius * math.cos(a)
            py = self.radius * math.sin(a)
            need = self.env.terrain.height(px) - py
            drop = max(drop, need)
        self.y = drop

    # -- forces -------------------------------------------------------------

    def _submerged_fraction(self) -> float:
        if self.env.fluid is None:
            return 0.0
        if self.env.water_level is None:
            return 1.0
        top = self.y + self.radius
        bottom = self.y - self.radius
        if self.env.water_level <= bottom:
            return 0.0
        if self.env.water_level >= top:
            return 1.0
        return (self.env.water_level - bottom) / (2.0 * self.radius)

    def module_torque_z(self, module: int, amplitude: float) -> float:
        psi = self.theta + MOMENT_PHASE + module * self.sector
        m = amplitude * self.moment_per_amp
        return -m * self._b_plane * math.sin(psi - self._b_angle)

    # -- stepping -----------------------------------------------------------

    def set_active(self, commands):
        self._active = list(commands)

    def step(self):
        dt = self.dt
        env = self.env

        tau = 0.0
        for module, amp in self._active:
            tau += self.module_torque_z(module, amp)
        fx = 0.0
        fy = -self.mass * env.gravity

        # Rolling resistance: soft-tip deformation hysteresis, active only
        # while in ground contact.
        if env.rolling_resistance > 0.0 and self.contact_ids:
            tau_rr = env.rolling_resistance * self.mass * env.gravity \
                * self.radius
            tau += -tau_rr * math.tanh(self.om / 0.5)

        frac = self._submerged_fraction()
        if frac > 0.0:
            fl = env.fluid
            fy += frac * fl.density * fl.buoyancy_volume * env.gravity
            sp = math.hypot(self.vx, self.vy)
            c1 = frac * fl.drag_linear
            c2 = frac * fl.drag_quadratic
            fx += -(c1 + c2 * sp) * self.vx
            fy += -(c1 + c2 * sp) * self.vy
            r2 = self.radius ** 2
            tau += -frac * (fl.drag_linear * r2
                            + fl.rot_drag_per_viscosity * fl.viscosity) * self.om
            tau += -frac * fl.drag_quadratic * r2 * self.radius \
                * abs(self.om) * self.om

        # Adhesion: vertices that just left the surface are pulled back
        # until they clear a small band.
        if env.adhesion > 0.0:
            band = 5e-4
            pull = env.adhesion * self.design.module.width * 1e-3
            for k in range(self.n):
                if not self._prev_contact[k]:
                    continue
                px, py = self.vertex(k)
                gap = py - env.terrain.height(px)
                if 0.0 < gap < band:
                    fy -= pull
                    rx = px - self.x
                    tau += -rx * pull

        self.vx += fx / self.mass * dt
        self.vy += fy / self.mass * dt
        self.om += tau / self.inertia * dt

        self._solve_contacts()

        self.x += self.vx * dt
        self.y += self.vy * dt
        self.theta += self.om * dt

        self._project_positions()

        self.work_input += sum(
            self.module_torque_z(m, a) for m, a in self._active) * self.om * dt
        self.t += dt
        self.step_count += 1

        if not (math.isfinite(self.x) and math.isfinite(self.y)
                and math.isfinite(self.theta)) or abs(self.vx) > 100 \
                or abs(self.vy) > 100 or abs(self.om) > 5000:
            raise SimulationBlowup(
                f"simulation diverged at t={self.t:.6f}", self.snapshot())

    def _gather_contacts(self, slop: float = 1e-4):
        contacts = []
        terrain = self.env.terrain
        for k in range(self.n):
            px, py = self.vertex(k)
            hit = terrain.contact(px, py)
            if hit is None:
                probe = terrain.contact(px, py - slop)
                if probe is None:
                    continue
                depth, normal = probe[0] - slop, probe[1]
            else:
                depth, normal = hit
            if depth > -slop:
                contacts.append((k, px, py, normal[0], normal[1], depth))
        ceil = self.env.ceiling
        if ceil is not None:
            x0, x1, height = ceil
            for k in range(self.n):
                px, py = self.vertex(k)
                if x0 <= px <= x1:
                    depth = py - height
                    if depth > -slop:
                        contacts.append((k + self.n, px, py, 0.0, -1.0, depth))
        return contacts

    def _solve_contacts(self, iterations: int = 8):
        contacts = self._gather_contacts()
        if not contacts:
            self.contact_ids = ()
            self._prev_contact = [False] * self.n
            return
        m_inv = 1.0 / self.mass
        i_inv = 1.0 / self.inertia
        jn_acc = [0.0] * len(contacts)
        jt_acc = [0.0] * len(contacts)
        data = []
        for (k, px, py, nx, ny, depth) in contacts:
            rx, ry = px - self.x, py - self.y
            rn = rx * ny - ry * nx
            kn = m_inv + rn * rn * i_inv
            tx, ty = -ny, nx
            rt = rx * ty - ry * tx
            kt = m_inv + rt * rt * i_inv
            data.append((rx, ry, nx, ny, tx, ty, kn, kt))
        for _ in range(iterations):
            for i, (rx, ry, nx, ny, tx, ty, kn, kt) in enumerate(data):
                ux = self.vx - self.om * ry
                uy = self.vy + self.om * rx
                un = ux * nx + uy * ny
                jn = -un / kn
                new_jn = max(jn_acc[i] + jn, 0.0)
                jn = new_jn - jn_acc[i]
                jn_acc[i] = new_jn
                self.vx += jn * nx * m_inv
                self.vy += jn * ny * m_inv
                self.om += jn * (rx * ny - ry * nx) * i_inv
                ux = self.vx - self.om * ry
                uy = self.vy + self.om * rx
                ut = ux * tx + uy * ty
                jt = -ut / kt
                cap = self.mu * jn_acc[i]
                new_jt = min(max(jt_acc[i] + jt, -cap), cap)
                jt = new_jt - jt_acc[i]
                jt_acc[i] = new_jt
                self.vx += jt * tx * m_inv
                self.vy += jt * ty * m_inv
                self.om += jt * (rx * ty - ry * tx) * i_inv
        touching = []
        prev = [False] * self.n
        for i, (k, *_rest) in enumerate(contacts):
            if jn_acc[i] > 0.0 or contacts[i][5] > 0.0:
                touching.append(k)
                if k < self.n:
                    prev[k] = True
        self.contact_ids = tuple(touching)
        self._prev_contact = prev

    def _project_positions(self):
        for _ in range(2):
            worst = None
            for k in range(self.n):
                px, py = self.vertex(k)
                hit = self.env.terrain.contact(px, py)
                if hit and hit[0] > PENETRATION_TOL:
                    if worst is None or hit[0] > worst[0]:
                        worst = hit
            ceil = self.env.ceiling
            if ceil is not None:
                x0, x1, height = ceil
                for k in range(self.n):
                    px, py = self.vertex(k)
                    if x0 <= px <= x1 and py - height > PENETRATION_TOL:
                        d = py - height
                        if worst is None or d > worst[0]:
                            worst = (d, (0.0, -1.0))
            if worst is None:
                return
            depth, (nx, ny) = worst
            self.x += nx * depth
            self.y += ny * depth

    # -- observation --------------------------------------------------------

    def snapshot(self, posture: str = "standing") -> RobotState:
        return RobotState(
            posture=posture,
            pose=(self.x, self.y, self.theta),
            planar_pose=(self.x, 0.0, 0.0),
            hinge_angles=(0.0,) * self.n,
            velocities=(self.vx, self.vy, self.om),
            contact_ids=frozenset(self.contact_ids),
            t=self.t,
        )

    def top_y(self) -> float:
        return max(py for _, py in self.vertices())

    def com_height(self) -> float:
        return self.y - self.env.terrain.height(self.x)

    def energy(self) -> float:
        ke = 0.5 * self.mass * (self.vx ** 2 + self.vy ** 2) \
            + 0.5 * self.inertia * self.om ** 2
        pe = self.mass * self.env.gravity * self.y
        return ke + pe


def default_field(magnitude: float) -> MagneticField:
    return MagneticField((math.cos(FIELD_TILT), math.sin(FIELD_TILT), 0.0),
                         magnitude)


def _compile_schedule(schedule: ActuationSchedule | None, dt: float):
    if schedule is None:
        return []
    spans = []
    for start, cmd in schedule.events:
        s = int(round(start / dt))
        e = int(round((start + cmd.duration) / dt))
        spans.append((s, e, cmd.module_id, cmd.amplitude))
    spans.sort()
    return spans


def step(engine: PlanarEngine, commands, n_steps: int = 1):
    """Advance the engine with a fixed command set; returns its snapshot."""
    engine.set_active(commands)
    for _ in range(n_steps):
        engine.step()
    return engine.snapshot()


def simulate(design: RobotDesign, schedule: ActuationSchedule | None,
             env: Environment, b_field: MagneticField, horizon: float,
             dt: float = DEFAULT_DT, sample_dt: float = 1e-3,
             x0: float = 0.0, theta0: float = 0.0, mu_scale: float = 1.0,
             posture: str = "standing") -> Trace:
    """Run a schedule through the engine and sample a trace."""
    engine = PlanarEngine(design, env, b_field, dt=dt, x0=x0, theta0=theta0,
                          mu_scale=mu_scale)
    spans = _compile_schedule(schedule, dt)
    sample_every = max(1, int(round(sample_dt / dt)))
    n_steps = int(round(horizon / dt))

    times = [0.0]
    xs = [engine.x]
    ys = [engine.y]
    thetas = [engine.theta]
    postures = [posture]
    com_heights = [engine.com_height()]
    speeds = [0.0]
    contact_counts = [len(engine._gather_contacts())]
    actives = ["-"]
    powers = [0.0]
    top_ys = [engine.top_y()]
    states = [engine.snapshot(posture)]

    span_idx = 0
    active: list = []
    for i in range(n_steps):
        while span_idx < len(spans) and spans[span_idx][0] <= i:
            spans_i = spans[span_idx]
            active.append(spans_i)
            span_idx += 1
        if active:
            active = [sp for sp in active if sp[1] > i]
        engine.set_active([(sp[2], sp[3]) for sp in active])
        engine.step()
        if (i + 1) % sample_every == 0:
            times.append(engine.t)
            xs.append(engine.x)
            ys.append(engine.y)
            thetas.append(engine.theta)
            postures.append(posture)
            com_heights.append(engine.com_height())
            speeds.append(math.hypot(engine.vx, engine.vy))
            contact_counts.append(len(engine.contact_ids))
            mods = sorted({sp[2] for sp in active})
            actives.append("|".join(str(m) for m in mods) if mods else "-")
            powers.append(sum(engine.module_torque_z(sp[2], sp[3])
                              for sp in active) * engine.om)
            top_ys.append(engine.top_y())
            states.append(engine.snapshot(posture))

    return Trace(
        dt=sample_every * dt,
        times=np.array(times),
        x=np.array(xs),
        y=np.array(ys),
        theta=np.array(thetas),
        postures=postures,
        com_height=np.array(com_heights),
        speed=np.array(speeds),
        contact_count=np.array(contact_counts),
        active_modules=actives,
        power=np.array(powers),
        top_y=np.array(top_ys),
        states=states,
        metadata={"engine_dt": dt, "work_input": engine.work_input,
                  "final_energy": engine.energy()},
    )
