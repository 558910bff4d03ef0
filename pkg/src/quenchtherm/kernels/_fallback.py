"""Pure numpy implementations of the hot kernels.

Signatures and results match the compiled ``_core`` extension exactly;
tests compare the two.
"""

import math

import numpy as np

_CHUNK = 8192


def sample_reduced(v0, omega_plus, omega_minus, times):
    """
    Rotate a two-mode covariance and reduce it onto oscillator 1.

    Parameters
    ----------
    v0 : (4, 4) array
        Covariance over (x+, p+, x-, p-) at relative time 0.
    omega_plus, omega_minus : float
        Normal-mode frequencies of the segment.
    times : (n,) array
        Relative sample times.

    Returns
    -------
    sxx, spp, sxp, det : (n,) arrays
        Symmetrized reduced covariance of oscillator 1 and the determinant
        of the full rotated covariance.
    modes : (n, 4) array
        Per-mode moments (<x+^2>, <x+p+>_sym, <x-^2>, <x-p->_sym).
    """
    v0 = np.asarray(v0, dtype=np.float64)
    t = np.asarray(times, dtype=np.float64)
    n = t.shape[0]
    s = np.zeros((n, 4, 4))
    for k, w in ((0, omega_plus), (2, omega_minus)):
        c = np.cos(w * t)
        sn = np.sin(w * t)
        s[:, k, k] = c
        s[:, k, k + 1] = sn / w
        s[:, k + 1, k] = -w * sn
        s[:, k + 1, k + 1] = c
    v = np.einsum("nij,jk,nlk->nil", s, v0, s)
    sxx = 0.5 * (v[:, 0, 0] + v[:, 2, 2] + 2.0 * v[:, 0, 2])
    spp = 0.5 * (v[:, 1, 1] + v[:, 3, 3] + 2.0 * v[:, 1, 3])
    sxp = 0.5 * (v[:, 0, 1] + v[:, 2, 3] + v[:, 0, 3] + v[:, 2, 1])
    det = np.linalg.det(v) if n else np.zeros(0)
    modes = np.stack([v[:, 0, 0], v[:, 0, 1], v[:, 2, 2], v[:, 2, 3]], axis=1) if n else np.zeros((0, 4))
    return sxx, spp, sxp, det, modes


def _errors(p, q, beta_target):
    beta = np.log((q + p) / (q - p))
    return np.abs(beta - beta_target) / beta_target


def wedge_scan(lo, beta_target, err_max, inclusive, q_max):
    """
    Odd/odd fraction p/q < 1 with the smallest p*q whose SDS temperature
    log((q+p)/(q-p)) lies within relative ``err_max`` of ``beta_target``.

    ``lo`` is a lower bound on admissible p/q (it only prunes the scan).
    Ties in p*q go to the smaller error.  Returns ``(p, q, err)`` or
    ``(0, 0, inf)`` when no odd q <= ``q_max`` qualifies.
    """
    best_pq = math.inf
    best = (0, 0, math.inf)
    q0 = 3
    while q0 <= q_max:
        # admissible p >= max(1, lo*q - 4), so p*q is bounded below by q0
        if max(lo * q0 * q0 - 4.0 * q0, float(q0)) > best_pq:
            break
        q = np.arange(q0, min(q0 + 2 * _CHUNK, q_max + 1), 2, dtype=np.int64)
        q0 = int(q[-1]) + 2
        base = np.floor(lo * q).astype(np.int64) - 2
        base -= (base + 1) % 2  # round down to odd
        base = np.maximum(base, 1)
        qf = q.astype(np.float64)
        found_p = np.zeros(q.shape, dtype=np.int64)
        found_e = np.full(q.shape, math.inf)
        for j in range(5):
            p = base + 2 * j
            ok_range = p < q
            pf = np.where(ok_range, p, 1).astype(np.float64)
            e = _errors(pf, qf, beta_target)
            ok = ok_range & ((e <= err_max) if inclusive else (e < err_max)) & (found_p == 0)
            found_p = np.where(ok, p, found_p)
            found_e = np.where(ok, e, found_e)
        mask = found_p > 0
        if not mask.any():
            continue
        pq = (found_p * q).astype(np.float64)
        pq[~mask] = math.inf
        order = np.lexsort((found_e, pq))
        k = order[0]
        cand_pq = pq[k]
        if cand_pq < best_pq or (cand_pq == best_pq and found_e[k] < best[2]):
            best_pq = cand_pq
            best = (int(found_p[k]), int(q[k]), float(found_e[k]))
    return best
