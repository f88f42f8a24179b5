# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled tridiagonal eigen-kernels.

Same algorithms as the pure backend: Sturm-count bisection (identical
floating-point operation order, so eigenvalues match bitwise) and
inverse iteration, here with an explicit partial-pivoting LU whose
pivots are clamped away from zero instead of perturbing theta.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport fabs, sqrt

cnp.import_array()

cdef double EPS = 2.220446049250313e-16


cdef inline double _clamped(double x, double pivmin) nogil:
    if fabs(x) < pivmin:
        return -pivmin if x < 0.0 else pivmin
    return x


cdef inline void _factor(double[::1] d, double[::1] e, double mu,
                         double pivmin, double[::1] dl, double[::1] dd,
                         double[::1] du, double[::1] du2,
                         signed char[::1] swap, Py_ssize_t P) nogil:
    """Partial-pivoting LU of (T - mu I); pivots clamped away from zero."""
    cdef Py_ssize_t i
    cdef double fact, temp
    for i in range(P):
        dd[i] = d[i] - mu
    for i in range(P - 1):
        dl[i] = e[i]
        du[i] = e[i]
    for i in range(P - 1):
        if fabs(dd[i]) >= fabs(dl[i]):
            swap[i] = 0
            dd[i] = _clamped(dd[i], pivmin)
            fact = dl[i] / dd[i]
            dl[i] = fact
            dd[i + 1] = dd[i + 1] - fact * du[i]
            if i < P - 2:
                du2[i] = 0.0
        else:
            swap[i] = 1
            dl[i] = _clamped(dl[i], pivmin)
            fact = dd[i] / dl[i]
            dd[i] = dl[i]
            dl[i] = fact
            temp = du[i]
            du[i] = dd[i + 1]
            dd[i + 1] = temp - fact * dd[i + 1]
            if i < P - 2:
                du2[i] = du[i + 1]
                du[i + 1] = -fact * du[i + 1]
    dd[P - 1] = _clamped(dd[P - 1], pivmin)


cdef inline void _solve(double[::1] dl, double[::1] dd, double[::1] du,
                        double[::1] du2, signed char[::1] swap,
                        double[::1] v, double[::1] w, Py_ssize_t P) nogil:
    """Solve with the stored LU factors: w <- (T - mu I)^{-1} v."""
    cdef Py_ssize_t i
    cdef double temp
    for i in range(P):
        w[i] = v[i]
    for i in range(P - 1):
        if swap[i]:
            temp = w[i]
            w[i] = w[i + 1]
            w[i + 1] = temp - dl[i] * w[i + 1]
        else:
            w[i + 1] = w[i + 1] - dl[i] * w[i]
    w[P - 1] = w[P - 1] / dd[P - 1]
    if P > 1:
        w[P - 2] = (w[P - 2] - du[P - 2] * w[P - 1]) / dd[P - 2]
    for i in range(P - 3, -1, -1):
        w[i] = (w[i] - du[i] * w[i + 1] - du2[i] * w[i + 2]) / dd[i]


def bisect_range(double[::1] d, double[::1] e2, Py_ssize_t ilo, Py_ssize_t ihi,
                 double gl, double gu, double pivmin, double atol):
    """Eigenvalues ranked ilo..ihi (0-based, ascending) by bisection.

    All indices advance one bisection level per pass, so the Sturm
    counts for the whole batch share each sweep over the matrix and
    their division chains overlap instead of serializing.  Per index
    the bracket/midpoint sequence is exactly the one a scalar loop
    would produce, which keeps the results bitwise identical to the
    pure backend.
    """
    cdef Py_ssize_t P = d.shape[0]
    cdef Py_ssize_t k = ihi - ilo + 1
    out = np.empty(k, dtype=np.float64)
    lo_np = np.empty(k, dtype=np.float64)
    hi_np = np.empty(k, dtype=np.float64)
    mid_np = np.empty(k, dtype=np.float64)
    q_np = np.empty(k, dtype=np.float64)
    cnt_np = np.empty(k, dtype=np.int64)
    act_np = np.empty(k, dtype=np.int64)
    cdef double[::1] ov = out, lo = lo_np, hi = hi_np, mid = mid_np, q = q_np
    cdef long[::1] cnt = cnt_np, act = act_np
    cdef double pad = 2.0 * EPS * max(fabs(gl), fabs(gu), 1.0) + 2.0 * pivmin
    cdef Py_ssize_t jj, j, i, it, nact
    cdef double width_tol, qv, di, ei
    with nogil:
        for jj in range(k):
            lo[jj] = gl - pad
            hi[jj] = gu + pad
        for it in range(128):
            nact = 0
            for jj in range(k):
                width_tol = 2.0 * EPS * max(fabs(lo[jj]), fabs(hi[jj])) + atol
                if hi[jj] - lo[jj] > width_tol:
                    act[nact] = <long> jj
                    nact += 1
            if nact == 0:
                break
            for j in range(nact):
                jj = act[j]
                mid[j] = 0.5 * (lo[jj] + hi[jj])
                qv = d[0] - mid[j]
                if fabs(qv) < pivmin:
                    qv = -pivmin
                q[j] = qv
                cnt[j] = 1 if qv < 0.0 else 0
            for i in range(1, P):
                di = d[i]
                ei = e2[i - 1]
                for j in range(nact):
                    qv = di - mid[j] - ei / q[j]
                    if fabs(qv) < pivmin:
                        qv = -pivmin
                    q[j] = qv
                    if qv < 0.0:
                        cnt[j] += 1
            for j in range(nact):
                jj = act[j]
                if cnt[j] <= <long> (ilo + jj):
                    lo[jj] = mid[j]
                else:
                    hi[jj] = mid[j]
        for jj in range(k):
            ov[jj] = 0.5 * (lo[jj] + hi[jj])
    return out


def eigvec(double[::1] d, double[::1] e, double theta, double[::1] start,
           double[:, ::1] prior, int min_sweeps, int max_sweeps,
           double rtol, double pivmin):
    """One eigenvector by inverse iteration from the given start vector.

    Mirrors the pure backend: per-sweep solve, two Gram-Schmidt passes
    against the prior cluster block, convergence on the residual.
    Returns (v, sweeps, ok).
    """
    cdef Py_ssize_t P = d.shape[0]
    cdef Py_ssize_t nprior = prior.shape[1]

    # LU factors of (T - theta I) with partial pivoting; du2 is the
    # fill-in second superdiagonal, swap[i] records a row interchange
    dl_np = np.empty(max(P - 1, 1), dtype=np.float64)
    dd_np = np.empty(P, dtype=np.float64)
    du_np = np.empty(max(P - 1, 1), dtype=np.float64)
    du2_np = np.zeros(max(P - 2, 1), dtype=np.float64)
    swap_np = np.zeros(max(P - 1, 1), dtype=np.int8)
    v_np = np.empty(P, dtype=np.float64)
    w_np = np.empty(P, dtype=np.float64)
    cdef double[::1] dl = dl_np, dd = dd_np, du = du_np, du2 = du2_np
    cdef signed char[::1] swap = swap_np
    cdef double[::1] v = v_np, w = w_np

    cdef Py_ssize_t i, j, sweep
    cdef double nrm, coef, res, r, amax, shift
    cdef bint ok = 0
    cdef int used = 0
    cdef int retry

    with nogil:
        shift = 0.0
        _factor(d, e, theta, pivmin, dl, dd, du, du2, swap, P)

        # normalized start
        nrm = 0.0
        for i in range(P):
            nrm += start[i] * start[i]
        nrm = sqrt(nrm)
        for i in range(P):
            v[i] = start[i] / nrm

        for sweep in range(1, max_sweeps + 1):
            used = <int> sweep
            _solve(dl, dd, du, du2, swap, v, w, P)

            # a clamped pivot can blow the solution past the overflow
            # threshold; nudge theta and refactor until it is finite
            amax = 0.0
            for i in range(P):
                if fabs(w[i]) > amax:
                    amax = fabs(w[i])
            retry = 0
            while not (amax <= 1e290) and retry < 8:
                shift = 2.0 * shift + pivmin + EPS * max(fabs(theta), 1.0)
                _factor(d, e, theta + shift, pivmin, dl, dd, du, du2, swap, P)
                _solve(dl, dd, du, du2, swap, v, w, P)
                amax = 0.0
                for i in range(P):
                    if fabs(w[i]) > amax:
                        amax = fabs(w[i])
                retry += 1
            if not (amax > 0.0 and amax <= 1e290):
                break
            # rescale so squared sums below stay inside double range
            for i in range(P):
                w[i] = w[i] / amax

            # two classical Gram-Schmidt passes against the cluster block
            for j in range(nprior):
                coef = 0.0
                for i in range(P):
                    coef += prior[i, j] * w[i]
                for i in range(P):
                    w[i] -= coef * prior[i, j]
            for j in range(nprior):
                coef = 0.0
                for i in range(P):
                    coef += prior[i, j] * w[i]
                for i in range(P):
                    w[i] -= coef * prior[i, j]

            nrm = 0.0
            for i in range(P):
                nrm += w[i] * w[i]
            nrm = sqrt(nrm)
            if nrm == 0.0 or nrm != nrm:
                break
            for i in range(P):
                v[i] = w[i] / nrm

            if sweep >= min_sweeps:
                res = 0.0
                for i in range(P):
                    r = (d[i] - theta) * v[i]
                    if i > 0:
                        r += e[i - 1] * v[i - 1]
                    if i < P - 1:
                        r += e[i] * v[i + 1]
                    res += r * r
                if sqrt(res) <= rtol:
                    ok = 1
                    break

    return v_np, used, bool(ok)
