"""
Executable quench protocols built from SDS tunings.

Plans always start from the uncoupled ground state.  Protocols that need
a purification of a thermal state (cooling, heating/cooling sequences)
prepend the forward quench that creates it; only that purification is
guaranteed to cool back to the ground state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .dynamics import DEFAULT_SAMPLES, Schedule, Stage, Trajectory, evolve_schedule, free_stage, r_at
from .errors import DomainError, NotThermalError
from .sds import SdsIndex, beta_of_index, sds_params
from .state import (
    GROUND,
    INFINITE_BETA,
    RVector,
    default_tolerance,
    effective_beta,
    thermal_r,
    thermality_residual,
)


@dataclass(frozen=True)
class Checkpoint:
    time: float
    expected: RVector
    label: str = ""


@dataclass(frozen=True)
class ProtocolPlan:
    schedule: Schedule
    expected_final_beta_eg: float
    checkpoints: tuple[Checkpoint, ...]
    tail_periods: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "checkpoints", tuple(self.checkpoints))
        end = self.schedule.duration + 2 * math.pi * self.tail_periods / self.schedule.base_omega
        for c in self.checkpoints:
            if not 0 <= c.time <= end * (1 + 1e-12):
                raise DomainError(f"checkpoint at t = {c.time!r} lies outside [0, {end!r}]")


def thermal_target(beta_eg: float) -> RVector:
    if math.isinf(beta_eg):
        return GROUND
    return thermal_r(2.0 * beta_eg)


def _as_index(idx) -> SdsIndex:
    return idx if isinstance(idx, SdsIndex) else SdsIndex(*idx)


def sds_stage(idx) -> Stage:
    sp = sds_params(idx)
    return Stage.from_tilde(sp.omega_prime, sp.coupling, sp.tau)


def thermalize_plan(idx, tail_periods: float = 0.0) -> ProtocolPlan:
    idx = _as_index(idx)
    stage = sds_stage(idx)
    beta = beta_of_index(idx)
    return ProtocolPlan(
        schedule=Schedule([stage]),
        expected_final_beta_eg=beta,
        checkpoints=[Checkpoint(stage.duration, thermal_target(beta), f"thermal {idx}")],
        tail_periods=tail_periods,
    )


def cool_to_ground_plan(idx) -> ProtocolPlan:
    """Prepare the purification with one quench, then repeat it to cool."""
    idx = _as_index(idx)
    stage = sds_stage(idx)
    beta = beta_of_index(idx)
    return ProtocolPlan(
        schedule=Schedule([stage, stage]),
        expected_final_beta_eg=INFINITE_BETA,
        checkpoints=[
            Checkpoint(stage.duration, thermal_target(beta), f"thermal {idx}"),
            Checkpoint(2 * stage.duration, GROUND, "ground"),
        ],
    )


def heat_cool_plan(idx_i, idx_f, gap_periods: float = 0.0) -> ProtocolPlan:
    """
    Move oscillator 1 from the SDS temperature of ``idx_i`` to that of ``idx_f``.

    Simulated end to end: ground -> stage_i (thermal beta_i) -> stage_i
    (ground) -> optional free gap -> stage_f (thermal beta_f).
    """
    idx_i, idx_f = _as_index(idx_i), _as_index(idx_f)
    if gap_periods < 0:
        raise DomainError(f"gap must be non-negative, got {gap_periods!r}")
    s_i, s_f = sds_stage(idx_i), sds_stage(idx_f)
    stages = [s_i, s_i]
    if gap_periods > 0:
        stages.append(free_stage(2 * math.pi * gap_periods))
    stages.append(s_f)
    schedule = Schedule(stages)
    marks = schedule.boundaries()
    beta_i, beta_f = beta_of_index(idx_i), beta_of_index(idx_f)
    return ProtocolPlan(
        schedule=schedule,
        expected_final_beta_eg=beta_f,
        checkpoints=[
            Checkpoint(marks[1], thermal_target(beta_i), f"thermal {idx_i}"),
            Checkpoint(marks[2], GROUND, "ground"),
            Checkpoint(marks[-1], thermal_target(beta_f), f"thermal {idx_f}"),
        ],
    )


@dataclass(frozen=True)
class CheckpointResult:
    checkpoint: Checkpoint
    observed: RVector
    error: float
    passed: bool


@dataclass
class VerificationReport:
    checkpoints: list[CheckpointResult]
    final_r: RVector
    final_residual: tuple[float, float]
    final_beta_eg: float | None
    trajectory: Trajectory

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checkpoints)


def execute_and_verify(plan: ProtocolPlan, tol: float | None = None, samples_per_stage: int = DEFAULT_SAMPLES) -> VerificationReport:
    """
    Run ``plan`` from the ground state and compare every checkpoint.

    Checkpoint states are evaluated exactly at their times, independent of
    the trajectory sampling.  ``final_beta_eg`` is ``None`` when the final
    reduced state is not thermal.
    """
    tol = default_tolerance() if tol is None else tol
    traj = evolve_schedule(plan.schedule, samples_per_stage, plan.tail_periods)
    results = []
    for c in plan.checkpoints:
        obs = r_at(plan.schedule, c.time)
        err = obs.distance(c.expected)
        results.append(CheckpointResult(c, obs, err, err <= tol))
    final = traj.final_r
    try:
        beta_final = 0.5 * effective_beta(final, plan.schedule.base_omega, tol) * plan.schedule.base_omega
    except NotThermalError:
        beta_final = None
    return VerificationReport(results, final, thermality_residual(final), beta_final, traj)
