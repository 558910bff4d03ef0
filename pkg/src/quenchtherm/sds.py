"""
Closed-form tunings on the special discrete set of temperatures.

An index (l, n) of whole numbers fixes commensurate normal modes with
frequency ratio eta = (2n+1)/(2l+1), and the active phase then ends in an
exactly thermal reduced state at E_g*beta = log((n+l+1)/|n-l|).
Temperatures are exchanged as E_g*beta throughout this module.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from . import kernels
from .errors import DomainError
from .state import INFINITE_BETA

#: Upper bound on the odd denominator 2n+1 scanned when no time limit is given.
DEFAULT_Q_MAX = 400_001


@dataclass(frozen=True, order=True)
class SdsIndex:
    l: int
    n: int

    def __post_init__(self):
        for name in ("l", "n"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, int) or v < 0:
                raise DomainError(f"{name} must be a non-negative integer, got {v!r}")

    @classmethod
    def parse(cls, text: str) -> "SdsIndex":
        """Parse ``"l,n"``."""
        try:
            l, n = (int(part) for part in text.split(","))
        except ValueError:
            raise DomainError(f"expected an index of the form l,n; got {text!r}") from None
        return cls(l, n)

    @property
    def is_identity(self) -> bool:
        return self.l == self.n

    @property
    def eta(self) -> float:
        return (2 * self.n + 1) / (2 * self.l + 1)

    def __str__(self):
        return f"{self.l},{self.n}"


@dataclass(frozen=True)
class SdsParameters:
    omega_prime: float
    coupling: float
    tau: float
    beta_eg: float
    u_thermal: float

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.omega_prime, self.coupling, self.tau)


class Branch(str, Enum):
    LOWER = "lower"  # l < n, positive coupling
    UPPER = "upper"  # l > n, negative coupling


def _as_index(idx) -> SdsIndex:
    if isinstance(idx, SdsIndex):
        return idx
    return SdsIndex(*idx)


def beta_of_index(idx) -> float:
    idx = _as_index(idx)
    if idx.is_identity:
        return INFINITE_BETA
    return math.log((idx.n + idx.l + 1) / abs(idx.n - idx.l))


def sds_params(idx) -> SdsParameters:
    """Exact tuning (omega', k, tau) and temperature for ``idx``.

    ``l == n`` yields the identity protocol: no quench, infinite beta.
    """
    idx = _as_index(idx)
    p, q = 2 * idx.l + 1, 2 * idx.n + 1
    return SdsParameters(
        omega_prime=math.sqrt(p / q),
        coupling=2.0 * (idx.n - idx.l) * (idx.n + idx.l + 1) / (p * q),
        tau=0.25 * math.sqrt(p * q),
        beta_eg=beta_of_index(idx),
        u_thermal=(p * p + q * q) / (2.0 * p * q),
    )


def envelope_params(beta_eg: float, branch: Branch | str = Branch.LOWER) -> tuple[float, float]:
    """(omega', k) as functions of temperature; exact tunings only on the SDS."""
    if not beta_eg > 0:
        raise DomainError(f"beta_eg must be positive, got {beta_eg!r}")
    branch = Branch(branch)
    if branch is Branch.LOWER:
        return math.sqrt(math.tanh(beta_eg / 2)), 1.0 / math.sinh(beta_eg)
    return math.sqrt(1.0 / math.tanh(beta_eg / 2)), -1.0 / math.sinh(beta_eg)


def degeneracy_map(idx) -> SdsIndex:
    """The l <-> n twin; same temperature and duration, reciprocal omega'."""
    idx = _as_index(idx)
    return SdsIndex(idx.n, idx.l)


@dataclass(frozen=True)
class Approximation:
    index: SdsIndex
    beta_eg: float
    rel_error: float
    tau: float

    @property
    def rel_error_percent(self) -> float:
        return 100.0 * self.rel_error


def _from_odd(p: int, q: int, beta_target: float) -> Approximation:
    idx = SdsIndex((p - 1) // 2, (q - 1) // 2)
    beta = beta_of_index(idx)
    return Approximation(idx, beta, abs(beta - beta_target) / beta_target, sds_params(idx).tau)


def approx_search(
    beta_eg_target: float,
    rel_tol: float,
    tau_max: float | None = None,
    q_max: int = DEFAULT_Q_MAX,
    limit: int | None = None,
) -> list[Approximation]:
    """
    Pareto front of SDS approximations to ``beta_eg_target``.

    Returns every canonical (l < n) index whose temperature is within
    ``rel_tol`` (relative) of the target, that no other admissible index
    beats in both duration and accuracy.  Entries are sorted by ascending
    tau, hence by strictly decreasing error; ties in tau go to the smaller
    error.  The odd denominator 2n+1 is capped at ``q_max``; the front is
    otherwise unbounded unless the target is hit exactly; ``limit`` stops
    after that many entries.
    """
    if not beta_eg_target > 0:
        raise DomainError(f"target beta_eg must be positive, got {beta_eg_target!r}")
    if not rel_tol > 0:
        raise DomainError(f"rel_tol must be positive, got {rel_tol!r}")
    if tau_max is not None and not tau_max > 0:
        raise DomainError(f"tau_max must be positive, got {tau_max!r}")

    front: list[Approximation] = []
    err = rel_tol
    inclusive = True
    while True:
        # admissible p/q lie above tanh(beta_min/2); pad by a hair for rounding
        beta_min = beta_eg_target * (1.0 - err)
        lo = math.tanh(beta_min / 2) * (1.0 - 1e-12) if beta_min > 0 else 0.0
        q_cap = q_max
        if tau_max is not None:
            # p*q <= 16 tau^2 and p >= max(1, lo*q)
            pq_max = 16.0 * tau_max * tau_max
            q_cap = min(q_cap, int(pq_max) + 2)
            if lo > 0:
                q_cap = min(q_cap, int(math.sqrt(pq_max / lo)) + 6)
        p, q, e = kernels.wedge_scan(lo, beta_eg_target, err, inclusive, q_cap)
        if p == 0:
            break
        cand = _from_odd(p, q, beta_eg_target)
        if tau_max is not None and cand.tau > tau_max:
            break
        front.append(cand)
        if cand.rel_error == 0.0 or (limit is not None and len(front) >= limit):
            break
        err = cand.rel_error
        inclusive = False
    return front


def brute_force_search(beta_eg_target: float, rel_tol: float, q_bound: int) -> Approximation | None:
    """Fastest admissible index by full enumeration of odd p < q <= q_bound."""
    best = None
    for q in range(3, q_bound + 1, 2):
        for p in range(1, q, 2):
            beta = math.log((q + p) / (q - p))
            e = abs(beta - beta_eg_target) / beta_eg_target
            if e > rel_tol:
                continue
            key = (p * q, e)
            if best is None or key < best[0]:
                best = (key, p, q)
    if best is None:
        return None
    return _from_odd(best[1], best[2], beta_eg_target)


def nearest_hotter(beta_eg_target: float, rel_tol: float = 0.02, q_max: int = DEFAULT_Q_MAX) -> Approximation | None:
    """
    Fastest SDS index with beta_nl <= target within ``rel_tol``.

    Root branches through SDS points continue smoothly towards colder
    targets, so these make the most reliable Newton seeds.
    """
    if not beta_eg_target > 0:
        raise DomainError(f"target beta_eg must be positive, got {beta_eg_target!r}")
    t_hi = math.tanh(beta_eg_target / 2)
    t_lo = math.tanh(beta_eg_target * (1 - rel_tol) / 2) if rel_tol < 1 else 0.0
    best = None
    for q in range(3, q_max + 1, 2):
        p = int(math.floor(t_hi * q))
        if p % 2 == 0:
            p -= 1
        # round-off guard on the hot side
        while p >= 1 and math.log((q + p) / (q - p)) > beta_eg_target:
            p -= 2
        if p < 1 or p / q < t_lo * (1 - 1e-12):
            continue
        cand = _from_odd(p, q, beta_eg_target)
        if cand.rel_error <= rel_tol and (best is None or (cand.tau, cand.rel_error) < (best.tau, best.rel_error)):
            best = cand
        if best is not None and max(t_lo * q * q - 4 * q, q) > 16 * best.tau**2:
            break
    return best
