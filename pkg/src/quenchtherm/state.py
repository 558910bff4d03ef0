"""
Reduced single-mode Gaussian states of oscillator 1.

The reduced density matrix of an undisplaced Gaussian is fixed by three
real numbers (X, Y, Z).  Canonical units: hbar = k_B = m = 1, and the
reference frequency omega defaults to 1.
"""

from __future__ import annotations

import math
import os
import sys
from dataclasses import dataclass

from .errors import DomainError, NotThermalError

#: Sentinel for an infinite inverse temperature (the ground state).
INFINITE_BETA = math.inf

DEFAULT_THERMAL_TOL = 1e-8
#: |Z| at or below this is round-off around the ground state (beta*omega > ~34.7)
GROUND_Z_NOISE = 8 * sys.float_info.epsilon


def default_tolerance() -> float:
    """Thermality tolerance, overridable through ``QT_DEFAULT_TOL``."""
    raw = os.environ.get("QT_DEFAULT_TOL")
    if raw is None or raw == "":
        return DEFAULT_THERMAL_TOL
    try:
        tol = float(raw)
    except ValueError:
        raise DomainError(f"QT_DEFAULT_TOL is not a number: {raw!r}") from None
    if not tol > 0:
        raise DomainError(f"QT_DEFAULT_TOL must be positive, got {raw!r}")
    return tol


@dataclass(frozen=True)
class QuadraticForm:
    """Coefficients of psi(x1, x2) ~ exp(-1/2 sum_ij A_ij x_i x_j)."""

    a11: complex
    a22: complex
    a12: complex

    def is_normalizable(self) -> bool:
        return (
            self.a11.real > 0
            and self.a22.real > 0
            and 2 * self.a11.real * self.a22.real > (self.a12 * self.a12).real
        )


@dataclass(frozen=True)
class RVector:
    x: float
    y: float
    z: float

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.x, self.y, self.z)

    def distance(self, other: "RVector") -> float:
        """Componentwise infinity-norm distance."""
        return max(abs(self.x - other.x), abs(self.y - other.y), abs(self.z - other.z))


GROUND = RVector(1.0, 0.0, 0.0)


@dataclass(frozen=True)
class SingleModeCovariance:
    """Symmetrized second moments of (x, p) for one oscillator."""

    sxx: float
    spp: float
    sxp: float

    @property
    def det(self) -> float:
        return self.sxx * self.spp - self.sxp * self.sxp


def _check_omega(omega: float) -> None:
    if not omega > 0:
        raise DomainError(f"frequency must be positive, got {omega!r}")


def _check_r(r: RVector) -> float:
    s = r.x + r.z
    if not s > 0:
        raise DomainError(f"X + Z must be positive for a normalizable state, got {s!r}")
    return s


def reduce_to_r(q: QuadraticForm, omega: float = 1.0) -> RVector:
    """Trace out oscillator 2 and return the (X, Y, Z) of oscillator 1."""
    _check_omega(omega)
    re22 = q.a22.real
    if not re22 > 0:
        raise DomainError(f"Re(a22) must be positive, got {re22!r}")
    xy = (q.a11 - q.a12 * q.a12 / (2.0 * re22)) / omega
    z = -(abs(q.a12) ** 2) / (2.0 * re22) / omega
    return RVector(xy.real, xy.imag, z)


def thermal_r(beta_omega: float) -> RVector:
    """Return R_beta = (coth(beta*omega), 0, -csch(beta*omega))."""
    if not beta_omega > 0:
        raise DomainError(f"beta*omega must be positive, got {beta_omega!r}")
    if math.isinf(beta_omega) or beta_omega > 700.0:
        # csch underflows to below 1e-304 here; coth is 1 to machine precision
        return RVector(1.0, 0.0, -2.0 * math.exp(-beta_omega) if beta_omega < 745 else 0.0)
    return RVector(1.0 / math.tanh(beta_omega), 0.0, -1.0 / math.sinh(beta_omega))


def r_to_covariance(r: RVector, omega: float = 1.0) -> SingleModeCovariance:
    s = _check_r(r)
    _check_omega(omega)
    return SingleModeCovariance(
        sxx=1.0 / (2.0 * omega * s),
        spp=omega * (r.x * r.x + r.y * r.y - r.z * r.z) / (2.0 * s),
        sxp=-r.y / (2.0 * s),
    )


def covariance_to_r(cov: SingleModeCovariance, omega: float = 1.0) -> RVector:
    """Inverse of :func:`r_to_covariance`."""
    _check_omega(omega)
    if not cov.sxx > 0:
        raise DomainError(f"sxx must be positive, got {cov.sxx!r}")
    s = 1.0 / (2.0 * omega * cov.sxx)
    y = -2.0 * cov.sxp * s
    d = (2.0 * cov.spp * s / omega - y * y) / s
    return RVector(0.5 * (s + d), y, 0.5 * (s - d))


def symplectic_eigenvalue(r: RVector) -> float:
    """nu = sqrt(det Sigma); 1/2 for a pure reduced state."""
    s = _check_r(r)
    return 0.5 * math.sqrt((r.x - r.z) / s)


def thermality_residual(r: RVector) -> tuple[float, float]:
    """Return (|Y|, |X^2 - Z^2 - 1|)."""
    return abs(r.y), abs(r.x * r.x - r.z * r.z - 1.0)


def is_thermal(r: RVector, tol: float | None = None) -> bool:
    tol = default_tolerance() if tol is None else tol
    ry, rh = thermality_residual(r)
    return ry <= tol and rh <= tol and r.z <= tol


def effective_beta(r: RVector, omega: float = 1.0, tol: float | None = None) -> float:
    """
    Inverse temperature of a thermal reduced state.

    Returns ``INFINITE_BETA`` for the ground state, i.e. whenever |Z| is
    at round-off level (``GROUND_Z_NOISE``).  Raises
    :class:`NotThermalError` if ``r`` is off the thermal curve by more
    than ``tol`` or if the X- and Z-derived temperatures disagree.
    """
    _check_omega(omega)
    tol = default_tolerance() if tol is None else tol
    ry, rh = thermality_residual(r)
    if ry > tol or rh > tol or r.z > tol or r.x < 1.0 - tol:
        raise NotThermalError(f"state {r.as_tuple()} is off the thermal curve (residual {ry:.3g}, {rh:.3g})")
    if -r.z <= GROUND_Z_NOISE:
        return INFINITE_BETA
    # X = coth(bw) and Z = -csch(bw) must describe the same point
    if abs(math.sqrt(1.0 + r.z * r.z) - r.x) > tol * (1.0 + r.x):
        raise NotThermalError(f"X and Z imply different temperatures for {r.as_tuple()}")
    # asinh(1/|Z|) stays well conditioned near the ground state, atanh(1/X) does not
    bw = math.asinh(-1.0 / r.z)
    return bw / omega


def mean_energy(r: RVector, omega: float = 1.0) -> float:
    """Mean energy <H0> of oscillator 1 at base frequency ``omega``."""
    s = _check_r(r)
    _check_omega(omega)
    e_g = 0.5 * omega
    return 0.5 * e_g * (1.0 + r.x * r.x + r.y * r.y - r.z * r.z) / s
