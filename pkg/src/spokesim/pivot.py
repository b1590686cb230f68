"""Reduced rollover models for the startup phase of rolling.

The body is treated as a regular polygon pivoting about its leading ground
vertex.  Two variants:

* rigid: the whole body is one lamina; the coil torque acts on it directly.
* semi-rigid: the actuated module swings on a torsional spring-damper hinge
  at the hub.  The module's fast swing absorbs far more work from the field
  early on and feeds it to the body through the hinge, which is why the
  hinged model rolls over sooner than the rigid one.

Rollover coordinate ``rho`` is the forward (clockwise) body rotation from
standing.  State 2 is reached at half the rollover angle, state 3 when the
center of mass passes vertically over the pivot (rho = pi/n), after which
the fall onto the next facet is irreversible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constants import GRAVITY
from .design import RobotDesign
from .em import MagneticField, planar_moment_magnitude

# The active module's moment sits perpendicular to its spoke, 150 degrees
# ahead of the horizontal at standstill; tilting the field below horizontal
# by FIELD_TILT makes the initial misalignment more obtuse.  Obtuse on
# purpose: the rigid body starts torque-starved, while a hinged module can
# swing into the strong-torque zone and hold there, which is what makes the
# semi-rigid rollover faster than the rigid one.
MOMENT_SPOKE_OFFSET = math.pi / 2
SPOKE_ANGLE_0 = math.pi / 3
FIELD_TILT = -math.radians(20.0)
MOMENT_MISALIGNMENT_0 = SPOKE_ANGLE_0 + MOMENT_SPOKE_OFFSET - FIELD_TILT


@dataclass(frozen=True)
class SemiRigidParams:
    """Torsional hinge of the actuated module."""

    hinge_stiffness: float           # N*m/rad
    hinge_damping: float = 5e-6      # N*m*s/rad
    hinge_limit: float = math.radians(35.0)

    def __post_init__(self):
        if self.hinge_stiffness <= 0:
            raise ValueError("hinge_stiffness must be > 0")
        if self.hinge_damping < 0:
            raise ValueError("hinge_damping must be >= 0")


@dataclass
class StartupResult:
    success: bool
    time_to_state3: float | None
    t_state2: float | None
    t_state3: float | None
    times: np.ndarray
    rho: np.ndarray
    omega: np.ndarray
    power: np.ndarray
    work: float

    @property
    def state_times(self):
        return [self.t_state2, self.t_state3]


def peak_torque(design: RobotDesign, field: MagneticField,
                current: float) -> float:
    """Maximum coil torque magnitude m*B for one module, N*m."""
    return planar_moment_magnitude(design.coil, abs(current)) * field.magnitude


def _integrate_startup(design: RobotDesign, field: MagneticField,
                       current: float, pulse_duration: float,
                       params: SemiRigidParams | None,
                       dt: float, t_max: float,
                       rot_drag: float) -> StartupResult:
    if pulse_duration <= 0:
        raise ValueError("pulse_duration must be > 0")
    n = design.n_modules
    rho3 = math.pi / n
    rho2 = rho3 / 2.0
    m = design.mass_kg
    radius = design.circumradius_m
    i_pivot = design.pivot_inertia()
    tau0 = peak_torque(design, field, current)
    mg_r = m * GRAVITY * radius

    hinged = params is not None
    if hinged:
        i_mod = design.module_hinge_inertia()
        i_body = i_pivot - i_mod
        k_h = params.hinge_stiffness
        c_h = params.hinge_damping
        phi_lim = params.hinge_limit
        m_mod = m / n
        # Module CoM radius from the hub; its forward deflection shifts the
        # system CoM and with it the gravity torque and the state-3 line.
        r_mc = max(radius - design.module.length * 1e-3 / 2.0, 1e-4)
        alpha0 = SPOKE_ANGLE_0
    else:
        i_body = i_pivot

    rho = 0.0
    omega = 0.0
    phi = 0.0
    phi_dot = 0.0
    at_stop = False
    t = 0.0
    t2 = None
    t3 = None
    work = 0.0

    times = [0.0]
    rhos = [0.0]
    omegas = [0.0]
    powers = [0.0]

    def com_x(rho_v, phi_v):
        """System CoM horizontal offset from the pivot (forward positive)."""
        base = -radius * math.sin(rho3 - rho_v)
        if not hinged:
            return base
        shift = (m_mod / m) * r_mc * (math.cos(alpha0 - rho_v - phi_v)
                                      - math.cos(alpha0 - rho_v))
        return base + shift

    n_steps = int(round(t_max / dt))
    for _ in range(n_steps):
        driving = t < pulse_duration
        if hinged:
            tau_m = tau0 * math.sin(MOMENT_MISALIGNMENT_0 - rho - phi) \
                if driving else 0.0
            grav_corr = m_mod * GRAVITY * r_mc * (
                math.cos(alpha0 - rho - phi) - math.cos(alpha0 - rho))
            if at_stop:
                # Module pressed on the hinge stop: rigid coupling, the
                # field torque passes straight through to the body.
                acc_body = (tau_m + grav_corr - mg_r * math.sin(rho3 - rho)
                            - rot_drag * omega) / (i_body + i_mod)
                if tau_m - k_h * phi < 0:
                    at_stop = False
                omega += acc_body * dt
                rho += omega * dt
                p_inst = tau_m * omega
            else:
                hinge_torque = k_h * phi + c_h * phi_dot
                acc_body = (-mg_r * math.sin(rho3 - rho) + grav_corr
                            + hinge_torque - rot_drag * omega) / i_body
                acc_phi = (tau_m - hinge_torque) / i_mod - acc_body
                omega += acc_body * dt
                phi_dot += acc_phi * dt
                rho += omega * dt
                phi += phi_dot * dt
                if phi >= phi_lim and phi_dot > 0:
                    # Inelastic engagement of the stop: the module's swing
                    # momentum merges into the body.
                    omega += i_mod * phi_dot / (i_body + i_mod)
                    phi, phi_dot = phi_lim, 0.0
                    at_stop = True
                elif phi < -phi_lim:
                    phi, phi_dot = -phi_lim, max(phi_dot, 0.0)
                p_inst = tau_m * (omega + phi_dot)
        else:
            tau_m = tau0 * math.sin(MOMENT_MISALIGNMENT_0 - rho) \
                if driving else 0.0
            acc = (tau_m - mg_r * math.sin(rho3 - rho)
                   - rot_drag * omega) / i_body
            omega += acc * dt
            rho += omega * dt
            p_inst = tau_m * omega
        t += dt
        work += p_inst * dt

        times.append(t)
        rhos.append(rho)
        omegas.append(omega)
        powers.append(p_inst)

        if t2 is None and rho >= rho2:
            t2 = t
        if com_x(rho, phi) >= 0.0:
            t3 = t
            break
        if rho < -0.5:  # toppled backwards
            break
        if omega < -1e-9 and not driving:
            break  # coasting and falling back: cannot reach state 3

    success = t3 is not None
    return StartupResult(
        success=success,
        time_to_state3=t3,
        t_state2=t2,
        t_state3=t3,
        times=np.array(times),
        rho=np.array(rhos),
        omega=np.array(omegas),
        power=np.array(powers),
        work=work,
    )


def startup_rollover_rigid(design: RobotDesign, field: MagneticField,
                           current: float, pulse_duration: float,
                           dt: float = 2e-6, t_max: float = 1.0,
                           rot_drag: float = 0.0) -> StartupResult:
    """Rigid-lamina rollover about the leading contact vertex."""
    return _integrate_startup(design, field, current, pulse_duration,
                              None, dt, t_max, rot_drag)


def startup_rollover_semirigid(design: RobotDesign, field: MagneticField,
                               current: float, pulse_duration: float,
                               params: SemiRigidParams,
                               dt: float = 2e-6, t_max: float = 1.0,
                               rot_drag: float = 0.0) -> StartupResult:
    """Rollover with the actuated module on a torsional hinge."""
    return _integrate_startup(design, field, current, pulse_duration,
                              params, dt, t_max, rot_drag)


def startup_work(result: StartupResult, until: float | None = None) -> float:
    """Actuation work over [0, until] from a startup trace, joules."""
    t = result.times
    p = result.power
    if until is not None:
        mask = t <= until + 1e-12
        t, p = t[mask], p[mask]
    if len(t) < 2:
        return 0.0
    return float(np.trapezoid(p, t))
