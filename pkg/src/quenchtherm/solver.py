"""
Thermalization condition R(tau) = R_beta off the special discrete set.

The unknowns are the dimensionless active-phase parameters
(omega', k, tau_tilde); temperatures are E_g*beta as elsewhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .dynamics import Schedule, Stage, evolve_schedule
from .errors import DomainError, SingularJacobianError, UnstableModeError
from .sds import SdsIndex, beta_of_index, nearest_hotter, sds_params
from .state import thermal_r

FD_REL_STEP = 1e-6
SINGULAR_COND = 1e13


@dataclass(frozen=True)
class ParameterVector:
    omega_prime: float
    coupling: float
    tau: float

    def is_valid(self) -> bool:
        return self.omega_prime > 0 and self.tau > 0 and self.omega_prime**2 + 2 * self.coupling > 0

    def as_array(self) -> np.ndarray:
        return np.array([self.omega_prime, self.coupling, self.tau])

    @classmethod
    def from_array(cls, a) -> "ParameterVector":
        return cls(float(a[0]), float(a[1]), float(a[2]))

    @classmethod
    def from_index(cls, idx) -> "ParameterVector":
        sp = sds_params(idx)
        return cls(sp.omega_prime, sp.coupling, sp.tau)

    def schedule(self) -> Schedule:
        return Schedule([Stage.from_tilde(self.omega_prime, self.coupling, self.tau)])


@dataclass
class SolveReport:
    solution: ParameterVector
    residual_norm: float
    iterations: int
    converged: bool
    jacobian_condition: float
    message: str = ""
    history: list[float] = field(default_factory=list)
    seed: ParameterVector | None = None


def _check(p: ParameterVector, beta_eg: float) -> None:
    if not beta_eg > 0:
        raise DomainError(f"beta_eg must be positive, got {beta_eg!r}")
    if not (p.omega_prime > 0 and p.tau > 0):
        raise DomainError(f"invalid parameters {p}")
    if not p.omega_prime**2 + 2 * p.coupling > 0:
        raise UnstableModeError(f"minus mode unstable for {p}")


def residual(p: ParameterVector, beta_eg: float) -> np.ndarray:
    """R(tau; p) - R_beta for the single quench from the ground state."""
    _check(p, beta_eg)
    r = evolve_schedule(p.schedule(), samples_per_stage=1).final_r
    rb = thermal_r(2.0 * beta_eg)
    return np.array([r.x - rb.x, r.y - rb.y, r.z - rb.z])


def jacobian(p: ParameterVector, beta_eg: float) -> np.ndarray:
    """Central-difference dR^i/dP^j with relative step 1e-6."""
    _check(p, beta_eg)
    base = p.as_array()
    jac = np.empty((3, 3))
    for j in range(3):
        h = FD_REL_STEP * max(abs(base[j]), 1.0)
        for attempt in range(2):
            e = np.zeros(3)
            e[j] = h
            hi, lo = ParameterVector.from_array(base + e), ParameterVector.from_array(base - e)
            if hi.is_valid() and lo.is_valid():
                break
            if attempt == 1:
                raise UnstableModeError(f"finite-difference step leaves the stable region at {p}")
            h *= 1e-3
        jac[:, j] = (residual(hi, beta_eg) - residual(lo, beta_eg)) / (2 * h)
    return jac


def dthermal_dbeta(beta_eg: float) -> np.ndarray:
    """d R_beta / d(E_g beta), with beta*omega = 2 E_g beta."""
    if not beta_eg > 0:
        raise DomainError(f"beta_eg must be positive, got {beta_eg!r}")
    if math.isinf(beta_eg):
        return np.zeros(3)
    x = 2.0 * beta_eg
    if x > 700:
        csch = 2.0 * math.exp(-x)
        return np.array([-2.0 * csch * csch, 0.0, 2.0 * csch])
    csch = 1.0 / math.sinh(x)
    return np.array([-2.0 * csch * csch, 0.0, 2.0 * csch / math.tanh(x)])


def _solve(jac, rhs):
    cond = float(np.linalg.cond(jac))
    if not np.isfinite(cond) or cond > SINGULAR_COND:
        raise SingularJacobianError(f"Jacobian is singular (condition {cond:.3g})", cond)
    return np.linalg.solve(jac, rhs), cond


def perturbative_correction(idx, delta_beta_eg: float) -> ParameterVector:
    """First-order shift of the SDS tuning of ``idx`` for beta -> beta_nl + delta."""
    idx = idx if isinstance(idx, SdsIndex) else SdsIndex(*idx)
    if idx.is_identity:
        raise DomainError("the identity index has no finite temperature to perturb")
    p_nl = ParameterVector.from_index(idx)
    if delta_beta_eg == 0:
        return p_nl
    beta = beta_of_index(idx)
    dp, _ = _solve(jacobian(p_nl, beta), dthermal_dbeta(beta))
    return ParameterVector.from_array(p_nl.as_array() + delta_beta_eg * dp)


def newton_solve(beta_eg: float, p0: ParameterVector, tol: float = 1e-10, max_iter: int = 50) -> SolveReport:
    """
    Damped Newton iteration on :func:`residual`.

    Steps are halved (at most 30 times) until the squared 2-norm of the
    residual decreases and the parameters stay admissible; convergence is
    judged on the infinity norm.  Failure to converge is reported, not
    raised.
    """
    if not tol > 0:
        raise DomainError(f"tol must be positive, got {tol!r}")
    _check(p0, beta_eg)
    x = p0.as_array()
    r = residual(p0, beta_eg)
    norm = float(np.abs(r).max())
    merit = float(r @ r)
    history = [norm]
    cond = math.nan
    it = 0
    message = "max_iter reached"
    while True:
        if norm <= tol:
            message = "converged"
            break
        if it >= max_iter:
            break
        jac = jacobian(ParameterVector.from_array(x), beta_eg)
        step, cond = _solve(jac, -r)
        lam = 1.0
        for _ in range(31):
            trial = ParameterVector.from_array(x + lam * step)
            if trial.is_valid():
                r_trial = residual(trial, beta_eg)
                m_trial = float(r_trial @ r_trial)
                if m_trial < merit:
                    break
            lam *= 0.5
        else:
            message = "line search failed: no decrease along the Newton direction"
            break
        x, r, merit = trial.as_array(), r_trial, m_trial
        norm = float(np.abs(r).max())
        it += 1
        history.append(norm)
    if math.isnan(cond):
        try:
            cond = float(np.linalg.cond(jacobian(ParameterVector.from_array(x), beta_eg)))
        except UnstableModeError:
            cond = math.inf
    return SolveReport(
        solution=ParameterVector.from_array(x),
        residual_norm=norm,
        iterations=it,
        converged=norm <= tol,
        jacobian_condition=cond,
        message=message,
        history=history,
        seed=p0,
    )


def tune_newton(beta_eg: float, tol: float = 1e-10, max_iter: int = 50, seed_tol: float = 0.02) -> SolveReport:
    """Solve for ``beta_eg`` starting from the fastest nearby hotter SDS root."""
    seed = nearest_hotter(beta_eg, seed_tol)
    if seed is None:
        raise DomainError(f"no SDS seed within {seed_tol:.3g} of beta_eg = {beta_eg!r}")
    return newton_solve(beta_eg, ParameterVector.from_index(seed.index), tol, max_iter)
