"""Parametric control schedules with analytic derivatives.

Time is always measured in units of 1/K and angles in radians. Each schedule
is a pure value object exposing value(t) and derivative(t) on [0, T].
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

from scipy.integrate import quad

from .errors import CalibrationError, ParameterError

#: calibration bracket for theta_amp; beyond 0.25 the schedule minimum
#: crosses theta = 0 and the phase integral is no longer guaranteed monotone
THETA_AMP_MAX = 0.25

QUAD_ABS_TOL = 1e-10


@dataclass(frozen=True)
class Schedule:
    kind: str
    duration: float
    value: Callable[[float], float]
    derivative: Callable[[float], float]
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.duration <= 0:
            raise ParameterError(f"schedule duration must be > 0, got {self.duration}")


def constant_schedule(value: float, duration: float = math.inf) -> Schedule:
    return Schedule("constant", duration, lambda t: value, lambda t: 0.0,
                    {"value": value})


def gate_phase_schedule(duration: float, theta_amp: float) -> Schedule:
    """Pump-phase ramp for the two-qubit gate.

    theta(t) = pi/2 - theta_amp * pi * [1 - cos(2 pi t / T)]; the effective
    coupling is off (theta = pi/2) at both endpoints.
    """
    if theta_amp < 0:
        raise ParameterError(f"theta_amp must be >= 0, got {theta_amp}")
    w = 2.0 * math.pi / duration

    def value(t: float) -> float:
        return math.pi / 2 - theta_amp * math.pi * (1.0 - math.cos(w * t))

    def derivative(t: float) -> float:
        return -theta_amp * math.pi * w * math.sin(w * t)

    return Schedule("gate_phase", duration, value, derivative,
                    {"theta_amp": theta_amp})


def rotation_schedule(duration: float) -> Schedule:
    """Single-KPO rotation ramp: theta goes from 0 to pi/2 as
    theta(t) = (pi/4) * [1 - cos(pi t / T)]."""
    w = math.pi / duration

    def value(t: float) -> float:
        return (math.pi / 4.0) * (1.0 - math.cos(w * t))

    def derivative(t: float) -> float:
        return (math.pi / 4.0) * w * math.sin(w * t)

    return Schedule("rotation", duration, value, derivative, {})


def loading_schedules(duration: float, p_max: float, delta_max: float
                      ) -> tuple[Schedule, Schedule]:
    """Adiabatic-loading ramps: pump up from 0 to p_max, detuning down from
    delta_max to 0, both half-cosine."""
    w = math.pi / duration

    pump = Schedule(
        "pump_ramp", duration,
        lambda t: p_max * (1.0 - math.cos(w * t)) / 2.0,
        lambda t: p_max * w * math.sin(w * t) / 2.0,
        {"p_max": p_max},
    )
    detuning = Schedule(
        "detuning_ramp", duration,
        lambda t: delta_max * (1.0 + math.cos(w * t)) / 2.0,
        lambda t: -delta_max * w * math.sin(w * t) / 2.0,
        {"delta_max": delta_max},
    )
    return pump, detuning


def cos_theta_integral(schedule: Schedule) -> float:
    """Adaptive quadrature of cos(theta(t)) over the full schedule."""
    val, _ = quad(lambda t: math.cos(schedule.value(t)), 0.0, schedule.duration,
                  epsabs=QUAD_ABS_TOL, limit=200)
    return val


def analytic_gate_phase(params, schedule: Schedule) -> float:
    """Dynamical phase acquired by the equal-parity basis states.

    Returns (2 J p / (sqrt(r) K)) * integral of cos(theta); the opposite-parity
    branch is its negation. Reduces to 2 J |alpha|^2 * integral at r = 1.
    """
    if schedule.kind != "gate_phase":
        raise ParameterError("analytic_gate_phase expects a gate_phase schedule")
    coeff = 2.0 * params.j * params.p / (math.sqrt(params.r) * params.k)
    return coeff * cos_theta_integral(schedule)


def max_gate_phase_magnitude(params, duration: float) -> float:
    """Hard upper bound |phi| <= 2 J |alpha|^2 T on the per-branch phase."""
    return 2.0 * params.j * params.p / (math.sqrt(params.r) * params.k) * duration


def calibrate_theta_amp(params, duration: float, target_relative_phase: float,
                        tol: float = 1e-8) -> float:
    """Solve for theta_amp so that the relative phase phi_10 - phi_00 hits the
    target; bisection on [0, THETA_AMP_MAX].

    The relative phase is -2x the per-branch phase, so the reachable range is
    [-2 * phi_max(THETA_AMP_MAX), 0].
    """

    def rel_phase(theta_amp: float) -> float:
        return -2.0 * analytic_gate_phase(
            params, gate_phase_schedule(duration, theta_amp))

    lo, hi = 0.0, THETA_AMP_MAX
    f_lo, f_hi = rel_phase(lo), rel_phase(hi)
    if target_relative_phase > f_lo + 1e-12 or target_relative_phase < f_hi - 1e-12:
        raise CalibrationError(
            f"target relative phase {target_relative_phase:.6g} outside the "
            f"reachable range [{f_hi:.6g}, {f_lo:.6g}] at T={duration:g} "
            f"(per-branch bound {max_gate_phase_magnitude(params, duration):.6g})"
        )
    # rel_phase decreases monotonically from 0 on the bracket
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if rel_phase(mid) > target_relative_phase:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
