# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the hot kernels; see ``_fallback`` for the contract."""

import numpy as np
cimport numpy as cnp
from libc.math cimport cos, sin, log, fabs, floor, INFINITY



cnp.import_array()


cdef double _det4(double m[4][4]) noexcept nogil:
    cdef double a[4][4]
    cdef int i, j, k, piv
    cdef double d = 1.0, f, tmp
    for i in range(4):
        for j in range(4):
            a[i][j] = m[i][j]
    for k in range(4):
        piv = k
        for i in range(k + 1, 4):
            if fabs(a[i][k]) > fabs(a[piv][k]):
                piv = i
        if a[piv][k] == 0.0:
            return 0.0
        if piv != k:
            for j in range(4):
                tmp = a[k][j]
                a[k][j] = a[piv][j]
                a[piv][j] = tmp
            d = -d
        d *= a[k][k]
        for i in range(k + 1, 4):
            f = a[i][k] / a[k][k]
            for j in range(k, 4):
                a[i][j] -= f * a[k][j]
    return d


def sample_reduced(v0, double omega_plus, double omega_minus, times):
    cdef cnp.ndarray va = np.ascontiguousarray(v0, dtype=np.float64).reshape(4, 4)
    cdef cnp.ndarray ta = np.ascontiguousarray(times, dtype=np.float64).ravel()
    cdef Py_ssize_t n = ta.shape[0], idx
    out_xx = np.empty(n)
    out_pp = np.empty(n)
    out_xp = np.empty(n)
    out_det = np.empty(n)
    out_modes = np.empty((n, 4))
    cdef double* v = <double*> cnp.PyArray_DATA(va)
    cdef double* t = <double*> cnp.PyArray_DATA(ta)
    cdef double* oxx = <double*> cnp.PyArray_DATA(out_xx)
    cdef double* opp = <double*> cnp.PyArray_DATA(out_pp)
    cdef double* oxp = <double*> cnp.PyArray_DATA(out_xp)
    cdef double* odet = <double*> cnp.PyArray_DATA(out_det)
    cdef double* om = <double*> cnp.PyArray_DATA(out_modes)
    cdef double s[4][4]
    cdef double w[4][4]
    cdef double r[4][4]
    cdef double c, sn
    cdef int i, j, k
    for i in range(4):
        for j in range(4):
            s[i][j] = 0.0
    with nogil:
        for idx in range(n):
            c = cos(omega_plus * t[idx])
            sn = sin(omega_plus * t[idx])
            s[0][0] = c
            s[0][1] = sn / omega_plus
            s[1][0] = -omega_plus * sn
            s[1][1] = c
            c = cos(omega_minus * t[idx])
            sn = sin(omega_minus * t[idx])
            s[2][2] = c
            s[2][3] = sn / omega_minus
            s[3][2] = -omega_minus * sn
            s[3][3] = c
            for i in range(4):
                for j in range(4):
                    w[i][j] = 0.0
                    for k in range(4):
                        w[i][j] += s[i][k] * v[4 * k + j]
            for i in range(4):
                for j in range(4):
                    r[i][j] = 0.0
                    for k in range(4):
                        r[i][j] += w[i][k] * s[j][k]
            oxx[idx] = 0.5 * (r[0][0] + r[2][2] + 2.0 * r[0][2])
            opp[idx] = 0.5 * (r[1][1] + r[3][3] + 2.0 * r[1][3])
            oxp[idx] = 0.5 * (r[0][1] + r[2][3] + r[0][3] + r[2][1])
            odet[idx] = _det4(r)
            om[4 * idx] = r[0][0]
            om[4 * idx + 1] = r[0][1]
            om[4 * idx + 2] = r[2][2]
            om[4 * idx + 3] = r[2][3]
    return out_xx, out_pp, out_xp, out_det, out_modes


cdef inline double _err(double p, double q, double beta_target) noexcept nogil:
    return fabs(log((q + p) / (q - p)) - beta_target) / beta_target


def wedge_scan(double lo, double beta_target, double err_max, bint inclusive, long long q_max):
    cdef long long q, p, base, j, best_p = 0, best_q = 0
    cdef double best_pq = INFINITY, best_e = INFINITY, e, pq, bound
    cdef bint ok
    with nogil:
        q = 3
        while q <= q_max:
            bound = lo * q * q - 4.0 * q
            if bound < q:
                bound = q
            if bound > best_pq:
                break
            base = <long long>floor(lo * q) - 2
            if base % 2 == 0:
                base -= 1
            if base < 1:
                base = 1
            for j in range(5):
                p = base + 2 * j
                if p >= q:
                    break
                e = _err(<double>p, <double>q, beta_target)
                ok = (e <= err_max) if inclusive else (e < err_max)
                if ok:
                    pq = <double>p * <double>q
                    if pq < best_pq or (pq == best_pq and e < best_e):
                        best_pq = pq
                        best_e = e
                        best_p = p
                        best_q = q
                    break
            q += 2
    return int(best_p), int(best_q), float(best_e)
