"""
Gaussian dynamics of the two coupled oscillators.

H = p1^2/2 + p2^2/2 + Omega^2 (x1^2 + x2^2)/2 + K (x1 - x2)^2 / 2

decouples into normal modes x+- = (x1 +- x2)/sqrt(2) with frequencies
Omega and sqrt(Omega^2 + 2K).  For piecewise-constant (Omega, K) every
segment is an exact symplectic rotation of each mode, so the general
engine propagates the 4x4 covariance segment by segment without any ODE
integration.  The closed-form Ermakov amplitudes are kept as a fast path
for the first quench out of the ground state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import DomainError, UnstableModeError
from .state import (
    QuadraticForm,
    RVector,
    SingleModeCovariance,
    covariance_to_r,
)

DEFAULT_SAMPLES = 1000
TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class Stage:
    """Constant (Omega, K) for ``duration`` (units of 1/omega)."""

    duration: float
    omega_stage: float
    coupling: float = 0.0

    def __post_init__(self):
        if not self.duration >= 0:
            raise DomainError(f"stage duration must be non-negative, got {self.duration!r}")
        if not self.omega_stage > 0:
            raise DomainError(f"stage frequency must be positive, got {self.omega_stage!r}")

    @classmethod
    def from_tilde(cls, omega_prime: float, coupling: float, tau_tilde: float, base_omega: float = 1.0) -> "Stage":
        """Build a stage from the dimensionless (omega', k, tau) triple."""
        return cls(
            duration=TWO_PI * tau_tilde / base_omega,
            omega_stage=omega_prime * base_omega,
            coupling=coupling * base_omega**2,
        )


def free_stage(duration: float, base_omega: float = 1.0) -> Stage:
    return Stage(duration, base_omega, 0.0)


@dataclass(frozen=True)
class Schedule:
    stages: tuple[Stage, ...]
    base_omega: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "stages", tuple(self.stages))
        if not self.base_omega > 0:
            raise DomainError(f"base frequency must be positive, got {self.base_omega!r}")

    @property
    def duration(self) -> float:
        return math.fsum(s.duration for s in self.stages)

    def boundaries(self) -> list[float]:
        """Cumulative stage end times, starting with 0."""
        out = [0.0]
        for s in self.stages:
            out.append(out[-1] + s.duration)
        return out


@dataclass(frozen=True)
class ModePair:
    b_plus: float
    bdot_plus: float
    b_minus: float
    bdot_minus: float


def normal_mode_frequencies(stage: Stage) -> tuple[float, float]:
    m2 = stage.omega_stage**2 + 2.0 * stage.coupling
    if not m2 > 0:
        raise UnstableModeError(
            f"minus mode is not oscillatory: Omega^2 + 2K = {m2!r} for stage {stage}"
        )
    return stage.omega_stage, math.sqrt(m2)


def _ermakov(t, freq, base_omega):
    # complex classical solution u = cos(Wt) + i (w/W) sin(Wt); b = |u|
    c = np.cos(freq * t)
    s = np.sin(freq * t)
    ratio = base_omega / freq
    b = np.sqrt(ratio * ratio * s * s + c * c)
    bdot = s * c * freq * (ratio * ratio - 1.0) / b
    return b, bdot


def b_plus_analytic(t, omega_prime: float, base_omega: float = 1.0):
    """Ermakov amplitude of x+ after a quench from the ground state.

    ``t`` may be a scalar or an array; returns ``(b, bdot)``.
    """
    if not omega_prime > 0:
        raise DomainError(f"omega_prime must be positive, got {omega_prime!r}")
    if np.any(np.asarray(t) < 0):
        raise DomainError("time must be non-negative")
    b, bd = _ermakov(np.asarray(t, dtype=float), omega_prime, base_omega)
    if np.ndim(t) == 0:
        return float(b), float(bd)
    return b, bd


def b_minus_analytic(t, omega_prime: float, eta: float, base_omega: float = 1.0):
    """Ermakov amplitude of x- with frequency ``eta * omega_prime``."""
    if not eta > 0:
        raise DomainError(f"eta must be positive, got {eta!r}")
    return b_plus_analytic(t, eta * omega_prime, base_omega)


def quadratic_form_from_modes(m: ModePair, base_omega: float = 1.0) -> QuadraticForm:
    if not (m.b_plus > 0 and m.b_minus > 0):
        raise DomainError(f"Ermakov amplitudes must be positive, got {m}")
    a_p = base_omega / (2 * m.b_plus**2) - 0.5j * m.bdot_plus / m.b_plus
    a_m = base_omega / (2 * m.b_minus**2) - 0.5j * m.bdot_minus / m.b_minus
    return QuadraticForm(a_p + a_m, a_p + a_m, a_p - a_m)


def analytic_r(times, omega_prime: float, coupling: float, base_omega: float = 1.0):
    """
    R(t) during the first active phase, via the closed-form Ermakov path.

    Vectorized over ``times``; returns arrays ``(X, Y, Z)``.
    """
    w_p, w_m = normal_mode_frequencies(Stage(0.0, omega_prime, coupling))
    t = np.asarray(times, dtype=float)
    bp, bdp = _ermakov(t, w_p, base_omega)
    bm, bdm = _ermakov(t, w_m, base_omega)
    a_p = base_omega / (2 * bp * bp) - 0.5j * bdp / bp
    a_m = base_omega / (2 * bm * bm) - 0.5j * bdm / bm
    a11 = a_p + a_m
    a12 = a_p - a_m
    re22 = a11.real
    xy = (a11 - a12 * a12 / (2 * re22)) / base_omega
    z = -(np.abs(a12) ** 2) / (2 * re22) / base_omega
    return xy.real, xy.imag, z


@dataclass(frozen=True)
class TwoModeCovariance:
    """Symmetrized covariance over (x+, p+, x-, p-)."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        if m.shape != (4, 4):
            raise DomainError(f"covariance must be 4x4, got shape {m.shape}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @classmethod
    def vacuum(cls, omega: float = 1.0) -> "TwoModeCovariance":
        return cls(np.diag([0.5 / omega, 0.5 * omega, 0.5 / omega, 0.5 * omega]))

    @property
    def det(self) -> float:
        return float(np.linalg.det(self.matrix))

    def reduced(self) -> SingleModeCovariance:
        """Second moments of oscillator 1, x1 = (x+ + x-)/sqrt(2)."""
        v = self.matrix
        return SingleModeCovariance(
            sxx=0.5 * (v[0, 0] + v[2, 2] + 2 * v[0, 2]),
            spp=0.5 * (v[1, 1] + v[3, 3] + 2 * v[1, 3]),
            sxp=0.5 * (v[0, 1] + v[2, 3] + v[0, 3] + v[2, 1]),
        )

    def is_pure_product(self, tol: float = 1e-10) -> bool:
        """True for uncorrelated pure +/- modes, the states reachable from the vacuum."""
        v = self.matrix
        if np.abs(v[:2, 2:]).max() > tol * np.abs(v).max():
            return False
        return all(abs(np.linalg.det(b) - 0.25) <= tol for b in (v[:2, :2], v[2:, 2:]))

    def r_vector(self, base_omega: float = 1.0) -> RVector:
        v = self.matrix
        if self.is_pure_product():
            x, y, z = _r_from_modes(v[0, 0], v[0, 1], v[2, 2], v[2, 3], base_omega)
            return RVector(float(x), float(y), float(z))
        return covariance_to_r(self.reduced(), base_omega)


def _r_from_modes(xx_p, xp_p, xx_m, xp_m, base_omega):
    """
    R of oscillator 1 for a pure product of +/- mode Gaussians.

    Each mode has psi ~ exp(-alpha x^2 / 2) with alpha = 1/(2<x^2>) - i<xp>/<x^2>;
    going through A_12 keeps Z = -|A_12|^2 / (2 Re A_22) non-positive exactly.
    """
    a_p = 0.5 / xx_p - 1j * xp_p / xx_p
    a_m = 0.5 / xx_m - 1j * xp_m / xx_m
    a11 = 0.5 * (a_p + a_m)
    a12 = 0.5 * (a_p - a_m)
    re22 = a11.real
    xy = (a11 - a12 * a12 / (2 * re22)) / base_omega
    z = -(np.abs(a12) ** 2) / (2 * re22) / base_omega
    return xy.real, xy.imag, z


def _rotation(w: float, t: float) -> np.ndarray:
    c, s = math.cos(w * t), math.sin(w * t)
    return np.array([[c, s / w], [-w * s, c]])


def propagate_segment(cov: TwoModeCovariance, stage: Stage, dt: float) -> TwoModeCovariance:
    """Evolve ``cov`` for ``dt`` under the constant Hamiltonian of ``stage``."""
    if not 0 <= dt <= stage.duration * (1 + 1e-12) + 1e-300:
        raise DomainError(f"dt = {dt!r} outside [0, {stage.duration!r}]")
    w_p, w_m = normal_mode_frequencies(stage)
    if dt == 0:
        return cov
    s = np.zeros((4, 4))
    s[:2, :2] = _rotation(w_p, dt)
    s[2:, 2:] = _rotation(w_m, dt)
    m = s @ cov.matrix @ s.T
    return TwoModeCovariance(0.5 * (m + m.T))


@dataclass
class Trajectory:
    """Sampled evolution of oscillator 1; one entry per sample."""

    t: np.ndarray
    omega: np.ndarray
    coupling: np.ndarray
    x: np.ndarray
    y: np.ndarray
    z: np.ndarray
    energy: np.ndarray
    sxx: np.ndarray
    spp: np.ndarray
    sxp: np.ndarray
    det: np.ndarray
    stage: np.ndarray
    base_omega: float = 1.0
    boundaries: list[float] = field(default_factory=list)
    final_covariance: TwoModeCovariance | None = None

    def __len__(self):
        return len(self.t)

    def r(self, i: int) -> RVector:
        return RVector(float(self.x[i]), float(self.y[i]), float(self.z[i]))

    @property
    def final_r(self) -> RVector:
        return self.r(-1)

    @property
    def nu(self) -> np.ndarray:
        return np.sqrt(self.sxx * self.spp - self.sxp * self.sxp)

    def index_of(self, time: float) -> int:
        """Index of the sample nearest ``time``."""
        return int(np.argmin(np.abs(self.t - time)))


def _reduce_arrays(sxx, spp, sxp, base_omega):
    s = 1.0 / (2.0 * base_omega * sxx)
    y = -2.0 * sxp * s
    d = (2.0 * spp * s / base_omega - y * y) / s
    return 0.5 * (s + d), y, 0.5 * (s - d)


def evolve_schedule(
    schedule: Schedule,
    samples_per_stage: int = DEFAULT_SAMPLES,
    tail_periods: float = 0.0,
    initial: TwoModeCovariance | None = None,
) -> Trajectory:
    """
    Sample R(t) of oscillator 1 through ``schedule``.

    The state starts as ``initial`` (default: the uncoupled ground state at
    ``schedule.base_omega``) at t = 0.  Every stage contributes
    ``samples_per_stage`` equally spaced samples ending exactly on its
    boundary; the optional free tail lasts ``tail_periods`` natural periods
    2*pi/omega and is sampled the same way.  Stage index -1 marks the
    t = 0 sample and the tail.

    R is obtained through the Gaussian wavefunction coefficients when the
    initial state is a pure product of the +/- modes (always true from the
    vacuum, and preserved by every stage); otherwise from the reduced
    covariance.
    """
    if samples_per_stage < 1:
        raise DomainError(f"samples_per_stage must be >= 1, got {samples_per_stage!r}")
    if tail_periods < 0:
        raise DomainError(f"tail must be non-negative, got {tail_periods!r}")
    w0 = schedule.base_omega
    cov = TwoModeCovariance.vacuum(w0) if initial is None else initial

    segments = [(i, s) for i, s in enumerate(schedule.stages)]
    if tail_periods > 0:
        segments.append((-1, free_stage(TWO_PI * tail_periods / w0, w0)))

    pure = cov.is_pure_product()
    r0 = cov.reduced()
    cols = {k: [np.array([v])] for k, v in (("sxx", r0.sxx), ("spp", r0.spp), ("sxp", r0.sxp))}
    cols["det"] = [np.array([cov.det])]
    m0 = cov.matrix
    cols["modes"] = [np.array([[m0[0, 0], m0[0, 1], m0[2, 2], m0[2, 3]]])]
    ts, om, kk, st = [np.array([0.0])], [np.array([w0])], [np.array([0.0])], [np.array([-1])]

    t_start = 0.0
    boundaries = [0.0]
    for idx, stage in segments:
        w_p, w_m = normal_mode_frequencies(stage)
        if stage.duration > 0:
            rel = stage.duration * np.arange(1, samples_per_stage + 1) / samples_per_stage
            rel[-1] = stage.duration
            sxx, spp, sxp, det, modes = kernels.sample_reduced(cov.matrix, w_p, w_m, rel)
            for k, v in (("sxx", sxx), ("spp", spp), ("sxp", sxp), ("det", det), ("modes", modes)):
                cols[k].append(v)
            ts.append(t_start + rel)
            n = len(rel)
            om.append(np.full(n, stage.omega_stage))
            kk.append(np.full(n, stage.coupling))
            st.append(np.full(n, idx))
            cov = propagate_segment(cov, stage, stage.duration)
        t_start += stage.duration
        if idx >= 0:
            boundaries.append(t_start)

    sxx, spp, sxp, det, modes = (np.concatenate(cols[k]) for k in ("sxx", "spp", "sxp", "det", "modes"))
    if pure:
        x, y, z = _r_from_modes(modes[:, 0], modes[:, 1], modes[:, 2], modes[:, 3], w0)
    else:
        x, y, z = _reduce_arrays(sxx, spp, sxp, w0)
    e_g = 0.5 * w0
    energy = 0.5 * e_g * (1.0 + x * x + y * y - z * z) / (x + z)
    return Trajectory(
        t=np.concatenate(ts),
        omega=np.concatenate(om),
        coupling=np.concatenate(kk),
        x=x,
        y=y,
        z=z,
        energy=energy,
        sxx=sxx,
        spp=spp,
        sxp=sxp,
        det=det,
        stage=np.concatenate(st),
        base_omega=w0,
        boundaries=boundaries,
        final_covariance=cov,
    )


def covariance_at(schedule: Schedule, time: float, initial: TwoModeCovariance | None = None) -> TwoModeCovariance:
    """Exact global covariance at ``time``; free evolution after the last stage."""
    if time < 0:
        raise DomainError(f"time must be non-negative, got {time!r}")
    w0 = schedule.base_omega
    cov = TwoModeCovariance.vacuum(w0) if initial is None else initial
    remaining = time
    for stage in schedule.stages:
        if remaining <= 0:
            return cov
        dt = min(stage.duration, remaining)
        cov = propagate_segment(cov, stage, dt)
        remaining -= stage.duration
    if remaining > 0:
        cov = propagate_segment(cov, free_stage(remaining, w0), remaining)
    return cov


def r_at(schedule: Schedule, time: float, initial: TwoModeCovariance | None = None) -> RVector:
    return covariance_at(schedule, time, initial).r_vector(schedule.base_omega)


def final_r(schedule: Schedule, initial: TwoModeCovariance | None = None) -> RVector:
    return r_at(schedule, schedule.duration, initial)


__all__ = [
    "DEFAULT_SAMPLES",
    "ModePair",
    "Schedule",
    "Stage",
    "Trajectory",
    "TwoModeCovariance",
    "analytic_r",
    "b_minus_analytic",
    "b_plus_analytic",
    "covariance_at",
    "evolve_schedule",
    "final_r",
    "free_stage",
    "normal_mode_frequencies",
    "propagate_segment",
    "quadratic_form_from_modes",
    "r_at",
]
