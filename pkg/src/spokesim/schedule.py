"""Per-module current schedules for every locomotion mode.

A schedule is an ordered list of timed :class:`CurrentCommand` events.  The
sequencing rate of module-to-module handoff (the "global" frequency) is
distinct from the intra-pulse waveform; PWM duty at the waveform level is
folded into an effective amplitude, since the mechanical response low-passes
the carrier.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field

from .constants import CURRENT_LIMIT
from .em import ActuationError, CurrentCommand


@dataclass(frozen=True)
class WaveSpec:
    """Square wave: amplitude (A), frequency (Hz), duty, phase, polarity."""

    amplitude: float
    frequency: float
    duty: float = 0.5
    phase: float = 0.0
    polarity: int = 1

    def __post_init__(self):
        if not (0 < self.amplitude <= CURRENT_LIMIT):
            raise ActuationError("amplitude must be in (0, 2] A")
        if self.frequency <= 0:
            raise ActuationError("frequency must be > 0")
        if not (0 < self.duty <= 1):
            raise ActuationError("duty must be in (0, 1]")
        if self.polarity not in (1, -1):
            raise ActuationError("polarity must be +1 or -1")


def square_wave_sample(spec: WaveSpec, t: float) -> float:
    """Waveform value at time t: polarity*amplitude in the on-window, else 0."""
    if t < 0:
        raise ActuationError("t must be >= 0")
    period = 1.0 / spec.frequency
    local = (t / period - spec.phase) % 1.0
    if local < spec.duty:
        return spec.polarity * spec.amplitude
    return 0.0


@dataclass(frozen=True)
class ActuationSchedule:
    """Time-ordered per-module commands over a horizon."""

    events: tuple  # of (start_s, CurrentCommand)
    horizon: float
    label: str = ""

    def __post_init__(self):
        events = tuple(sorted(self.events, key=lambda e: (e[0], e[1].module_id)))
        object.__setattr__(self, "events", events)
        self.validate()

    def validate(self):
        last_end: dict[int, float] = {}
        for start, cmd in self.events:
            if start < 0:
                raise ActuationError("event start must be >= 0")
            prev = last_end.get(cmd.module_id, -math.inf)
            if start < prev - 1e-12:
                raise ActuationError(
                    f"module {cmd.module_id} has overlapping commands")
            last_end[cmd.module_id] = max(prev, start + cmd.duration)

    def active_at(self, t: float) -> list[CurrentCommand]:
        return [cmd for start, cmd in self.events
                if start <= t < start + cmd.duration]

    def module_sequence(self) -> list[int]:
        return [cmd.module_id for _, cmd in self.events]

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("start,module,amplitude,duration\n")
        for start, cmd in self.events:
            buf.write(f"{start:.9g},{cmd.module_id},"
                      f"{cmd.amplitude:.9g},{cmd.duration:.9g}\n")
        return buf.getvalue()


def _sequential_events(start_t: float, start_module: int, n_pulses: int,
                       slot: float, amplitude: float, n_modules: int,
                       step: int, duty: float = 1.0) -> list:
    events = []
    on = slot * duty
    for j in range(n_pulses):
        module = (start_module + step * j) % n_modules
        events.append((start_t + j * slot,
                       CurrentCommand(module, amplitude, on)))
    return events


def rolling_schedule(f_global: float, direction: int = 1, duration: float = 1.0,
                     amplitude: float = 1.5, n_modules: int = 6,
                     start_module: int = 0, duty: float = 1.0) -> ActuationSchedule:
    """Sequential one-module-per-slot drive for continuous rolling.

    Module order ascends (anticlockwise) for direction=+1 and is reversed,
    with flipped polarity, for direction=-1.  ``duty`` is the on fraction
    of each slot (square-wave on-window).
    """
    if f_global <= 0:
        raise ActuationError("f_global must be > 0")
    if direction not in (1, -1):
        raise ActuationError("direction must be +1 or -1")
    slot = 1.0 / f_global
    n_pulses = max(1, int(math.floor(duration / slot + 1e-9)))
    events = _sequential_events(0.0, start_module, n_pulses, slot,
                                direction * amplitude, n_modules,
                                step=direction, duty=duty)
    return ActuationSchedule(tuple(events), horizon=duration,
                             label=f"rolling_{f_global:g}Hz")


def hybrid_startup_schedule(f_low: float, n_low: int, f_high: float,
                            duration: float = 1.0, amplitude: float = 1.5,
                            n_modules: int = 6, start_module: int = 0,
                            duty_high: float = 1.0) -> ActuationSchedule:
    """Low-frequency lead-in pulses, then seamless high-frequency sequencing.

    The module index continues across the splice with no skip or repeat.
    """
    if f_low >= f_high:
        raise ActuationError("f_low must be < f_high")
    if n_low < 1:
        raise ActuationError("n_low must be >= 1")
    slot_low = 1.0 / f_low
    slot_high = 1.0 / f_high
    events = _sequential_events(0.0, start_module, n_low, slot_low,
                                amplitude, n_modules, step=1)
    t_splice = n_low * slot_low
    remaining = duration - t_splice
    n_high = max(0, int(math.floor(remaining / slot_high + 1e-9)))
    events += _sequential_events(t_splice, (start_module + n_low) % n_modules,
                                 n_high, slot_high, amplitude,
                                 n_modules, step=1, duty=duty_high)
    return ActuationSchedule(tuple(events), horizon=duration,
                             label=f"hybrid_{f_low:g}to{f_high:g}Hz")


_WALK_MODULES = {
    # top/bottom module ids for the standing posture with module 0 forward-up.
    "walk1": (1,),
    "walk2": (4,),
    "walk3": (1, 2),
}


def walk_schedule(mode: str, f: float = 5.0, duration: float = 2.0,
                  amplitude: float = 1.5, mirror: bool = False,
                  n_modules: int = 6) -> ActuationSchedule:
    """Walking drives: one top module, one bottom module, or a phased pair."""
    if mode not in _WALK_MODULES:
        raise ActuationError(f"unknown walk mode {mode!r}")
    if f <= 0:
        raise ActuationError("frequency must be > 0")
    modules = _WALK_MODULES[mode]
    if mirror:
        modules = tuple((n_modules - m) % n_modules for m in modules)
    period = 1.0 / f
    on = 0.5 * period
    events = []
    n_cycles = int(math.floor(duration / period + 1e-9))
    for k in range(n_cycles):
        for i, module in enumerate(modules):
            phase = 0.5 * i  # walk3 pair runs half a period out of phase
            events.append((k * period + phase * period,
                           CurrentCommand(module, amplitude, on)))
    return ActuationSchedule(tuple(events), horizon=duration,
                             label=f"{mode}_{f:g}Hz")


def dual_module_schedule(pair: tuple[int, int], polarization: str,
                         pulse_ms: float, rep_f: float, duration: float = 2.0,
                         amplitude: float = 1.5) -> ActuationSchedule:
    """Simultaneous two-module pulses, identical or opposite current sign."""
    a, b = pair
    if a == b:
        raise ActuationError("pair modules must be distinct")
    if polarization not in ("identical", "opposite"):
        raise ActuationError("polarization must be 'identical' or 'opposite'")
    pulse = pulse_ms * 1e-3
    period = 1.0 / rep_f
    if pulse > period + 1e-12:
        raise ActuationError("pulse longer than repetition period")
    sign_b = 1.0 if polarization == "identical" else -1.0
    events = []
    n_cycles = int(math.floor(duration / period + 1e-9))
    for k in range(n_cycles):
        t0 = k * period
        events.append((t0, CurrentCommand(a, amplitude, pulse)))
        events.append((t0, CurrentCommand(b, sign_b * amplitude, pulse)))
    return ActuationSchedule(tuple(events), horizon=duration,
                             label=f"dual_{a}{b}_{polarization}")


def standup_schedule(amplitude: float = 1.5, pulse_ms: float = 50.0,
                     n_modules: int = 6) -> ActuationSchedule:
    """Six sequential fixed-width pulses that lever the body upright."""
    pulse = pulse_ms * 1e-3
    events = [(k * pulse, CurrentCommand(k, amplitude, pulse))
              for k in range(n_modules)]
    return ActuationSchedule(tuple(events), horizon=n_modules * pulse,
                             label="standup")


def compressed_gait_schedule(f: float = 10.0, duration: float = 2.0,
                             amplitude: float = 1.5,
                             pairs: tuple = ((1, 3), (0, 4))) -> ActuationSchedule:
    """Alternating pair activation for locomotion under compression."""
    if f <= 0:
        raise ActuationError("frequency must be > 0")
    period = 1.0 / f
    on = 0.5 * period
    events = []
    n_cycles = int(math.floor(duration / period + 1e-9))
    for k in range(n_cycles):
        pair = pairs[k % len(pairs)]
        for module in pair:
            events.append((k * period, CurrentCommand(module, amplitude, on)))
    return ActuationSchedule(tuple(events), horizon=duration,
                             label="compressed_gait")
