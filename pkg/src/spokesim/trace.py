"""Time-sampled simulation traces, derived metrics, and CSV output."""

from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np


class TraceError(ValueError):
    pass


@dataclass(frozen=True)
class RobotState:
    """Snapshot of the robot at one instant.

    ``pose`` is the sagittal-plane (rolling) pose; ``planar_pose`` the
    ground-plane pose used by the crawling kinematics.  ``hinge_angles``
    are per-module deflections (all zero for the rigid engine).
    """

    posture: str = "standing"
    pose: tuple = (0.0, 0.0, 0.0)           # x, y, theta (m, m, rad)
    planar_pose: tuple = (0.0, 0.0, 0.0)    # x, y, heading
    hinge_angles: tuple = (0.0,) * 6
    velocities: tuple = (0.0, 0.0, 0.0)     # vx, vy, omega
    contact_ids: frozenset = frozenset()
    t: float = 0.0

    def __post_init__(self):
        if self.posture not in ("standing", "lying", "folded", "transitioning"):
            raise TraceError(f"unknown posture {self.posture!r}")


@dataclass
class Trace:
    """Uniformly sampled run history.

    Columns are kept as parallel arrays; ``states`` holds full snapshots at
    the same sample instants.  ``dt`` is the sample interval (not the
    integrator step; that lives in ``metadata``).
    """

    dt: float
    times: np.ndarray
    x: np.ndarray
    y: np.ndarray
    theta: np.ndarray
    postures: list
    com_height: np.ndarray
    speed: np.ndarray
    contact_count: np.ndarray
    active_modules: list
    power: np.ndarray
    top_y: np.ndarray
    states: list = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if len(self.times) == 0:
            raise TraceError("trace must contain at least one sample")
        dts = np.diff(self.times)
        if len(dts) and (np.any(dts <= 0)
                         or np.max(np.abs(dts - self.dt)) > 1e-9):
            raise TraceError("trace samples must be uniform and increasing")

    def __len__(self):
        return len(self.times)

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("t,x,y,theta,posture,com_height,speed,"
                  "contact_count,active_modules,power\n")
        for i in range(len(self.times)):
            buf.write(
                f"{self.times[i]:.9g},{self.x[i]:.9g},{self.y[i]:.9g},"
                f"{self.theta[i]:.9g},{self.postures[i]},"
                f"{self.com_height[i]:.9g},{self.speed[i]:.9g},"
                f"{int(self.contact_count[i])},{self.active_modules[i]},"
                f"{self.power[i]:.9g}\n")
        return buf.getvalue()


def actuator_work(trace) -> float:
    """Trapezoidal integral of actuation power over a trace, joules."""
    times = np.asarray(trace.times, dtype=float)
    power = np.asarray(trace.power, dtype=float)
    if len(times) == 0:
        raise TraceError("cannot integrate an empty trace")
    if len(times) == 1:
        return 0.0
    return float(np.trapezoid(power, times))


def windowed_peak_speed(times: np.ndarray, x: np.ndarray,
                        window_s: float = 10e-3) -> float:
    """Max horizontal displacement rate over a centered window, m/s."""
    if len(times) < 2:
        return 0.0
    dt = times[1] - times[0]
    half = max(1, int(round(window_s / dt / 2)))
    if 2 * half >= len(times):
        return float(abs(x[-1] - x[0]) / (times[-1] - times[0]))
    span = 2 * half * dt
    disp = np.abs(x[2 * half:] - x[:-2 * half])
    return float(disp.max() / span)


def count_jump_events(times: np.ndarray, contact_count: np.ndarray,
                      min_duration: float = 5e-3) -> int:
    """Maximal airborne intervals at least ``min_duration`` long."""
    airborne = np.asarray(contact_count) == 0
    count = 0
    run = 0
    dt = times[1] - times[0] if len(times) > 1 else 0.0
    for a in list(airborne) + [False]:
        if a:
            run += 1
        else:
            if run * dt >= min_duration and run > 0:
                count += 1
            run = 0
    return count


def trace_metrics(trace, rollover_angle: float | None = None) -> dict:
    """Headline metrics: peak/average speed (mm/s), success, heights, jumps.

    Success means the body completed its first rollover and kept rotating:
    total rotation of at least half a revolution with continued rotation in
    the final 40% of the run.
    """
    if len(trace.times) == 0:
        raise TraceError("empty trace")
    t = np.asarray(trace.times)
    x = np.asarray(trace.x)
    theta = np.asarray(trace.theta)
    duration = t[-1] - t[0] if len(t) > 1 else 0.0
    peak = windowed_peak_speed(t, x) * 1e3
    avg = (abs(x[-1] - x[0]) / duration * 1e3) if duration > 0 else 0.0
    total_rot = abs(theta[-1] - theta[0])
    tail_start = int(len(t) * 0.6)
    tail_rot = abs(theta[-1] - theta[tail_start]) if len(t) > 2 else 0.0
    first_roll = rollover_angle if rollover_angle is not None else np.pi / 6
    success = bool(total_rot >= np.pi
                   and tail_rot >= 0.5 * first_roll
                   and np.max(np.abs(theta - theta[0])) >= first_roll)
    return {
        "peak_speed": peak,
        "avg_speed": avg,
        "success": success,
        "max_height": float(np.max(trace.top_y)) * 1e3,
        "jump_events": count_jump_events(t, trace.contact_count),
        "total_rotation": float(total_rot),
    }
