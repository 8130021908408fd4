# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the hot kernels; see ``_pykernels`` for the reference."""
import numpy as np

from libc.math cimport sqrt, fabs, pow, hypot

cdef enum:
    STATUS_OK = 0
    STATUS_UNDERFLOW = 1
    STATUS_MAXSTEPS = 2


cdef inline double cabs2(double complex z) nogil:
    return hypot(z.real, z.imag)


cdef inline double complex cconj(double complex z) nogil:
    return z.real - 1j * z.imag


cdef void matvec(const double complex[:, ::1] a, const double complex[::1] x,
                 double complex[::1] out) noexcept nogil:
    cdef Py_ssize_t n = a.shape[0], i, j
    cdef double complex acc
    for i in range(n):
        acc = 0
        for j in range(n):
            acc = acc + a[i, j] * x[j]
        out[i] = acc


cdef void rk4(const double complex[:, ::1] a, const double complex[::1] y, double h,
              double complex[::1] out, double complex[:, ::1] work) noexcept nogil:
    # work rows: k1, k2, k3, k4, tmp
    cdef Py_ssize_t n = y.shape[0], i
    matvec(a, y, work[0])
    for i in range(n):
        work[4, i] = y[i] + 0.5 * h * work[0, i]
    matvec(a, work[4], work[1])
    for i in range(n):
        work[4, i] = y[i] + 0.5 * h * work[1, i]
    matvec(a, work[4], work[2])
    for i in range(n):
        work[4, i] = y[i] + h * work[2, i]
    matvec(a, work[4], work[3])
    for i in range(n):
        out[i] = y[i] + (h / 6.0) * (work[0, i] + 2.0 * work[1, i]
                                     + 2.0 * work[2, i] + work[3, i])


def rk4_doubling(a_in, y0, t_out_in, double tol, double h_min, long max_steps):
    cdef const double complex[:, ::1] a = np.ascontiguousarray(a_in, dtype=np.complex128)
    cdef double complex[::1] y = np.array(y0, dtype=np.complex128)
    cdef const double[::1] t_out = np.ascontiguousarray(t_out_in, dtype=np.float64)
    cdef Py_ssize_t n = y.shape[0], m = t_out.shape[0], i, j, k
    ys_arr = np.empty((m, n), dtype=np.complex128)
    cdef double complex[:, ::1] ys = ys_arr
    cdef double complex[:, ::1] work = np.empty((5, n), dtype=np.complex128)
    cdef double complex[::1] full = np.empty(n, dtype=np.complex128)
    cdef double complex[::1] mid = np.empty(n, dtype=np.complex128)
    cdef double complex[::1] half = np.empty(n, dtype=np.complex128)
    cdef double scale = 1e-300, err, d, step, fac, target, t = 0.0, h
    cdef long n_acc = 0, n_try = 0
    cdef bint last
    cdef int status = STATUS_OK

    for i in range(n):
        for j in range(n):
            d = cabs2(a[i, j])
            if d > scale:
                scale = d
    h = min(0.1 / scale, 1.0)

    with nogil:
        for k in range(m):
            target = t_out[k]
            while t < target:
                if n_try >= max_steps:
                    status = STATUS_MAXSTEPS
                    break
                n_try += 1
                last = False
                step = h
                if t + step >= target:
                    step = target - t
                    last = True
                rk4(a, y, step, full, work)
                rk4(a, y, 0.5 * step, mid, work)
                rk4(a, mid, 0.5 * step, half, work)
                err = 0.0
                for i in range(n):
                    d = cabs2(half[i] - full[i])
                    if d > err:
                        err = d
                err = err / 15.0
                if err <= tol:
                    for i in range(n):
                        y[i] = half[i] + (half[i] - full[i]) / 15.0
                    if last:
                        t = target
                    else:
                        t = t + step
                    n_acc += 1
                    if not last or step >= h:
                        if err == 0.0:
                            fac = 4.0
                        else:
                            fac = min(4.0, max(0.2, 0.9 * pow(tol / err, 0.2)))
                        h = step * fac
                else:
                    fac = max(0.1, 0.9 * pow(tol / err, 0.25))
                    h = step * fac
                    if h < h_min:
                        status = STATUS_UNDERFLOW
                        break
            if status != STATUS_OK:
                for j in range(k, m):
                    for i in range(n):
                        ys[j, i] = y[i]
                break
            for i in range(n):
                ys[k, i] = y[i]
    return ys_arr, n_acc, status


def jacobi_eigh(h_in, double tol, int max_sweeps):
    a_arr = np.array(h_in, dtype=np.complex128, order="C")
    v_arr = np.eye(a_arr.shape[0], dtype=np.complex128)
    cdef double complex[:, ::1] a = a_arr
    cdef double complex[:, ::1] v = v_arr
    cdef Py_ssize_t n = a.shape[0], p, q, k
    cdef double total = 0.0, off, r, app, aqq, theta, t, c, s
    cdef double complex g, dq, upp, upq, uqp, uqq, x, y
    cdef int sweep, sweeps = -1

    for p in range(n):
        a[p, p] = a[p, p].real
    for p in range(n):
        for q in range(n):
            r = cabs2(a[p, q])
            total += r * r

    with nogil:
        for sweep in range(max_sweeps):
            off = 0.0
            for p in range(n):
                for q in range(p + 1, n):
                    r = cabs2(a[p, q])
                    off += r * r
            if off <= tol * tol * total:
                sweeps = sweep
                break
            for p in range(n - 1):
                for q in range(p + 1, n):
                    g = a[p, q]
                    r = cabs2(g)
                    if r == 0.0:
                        continue
                    dq = cconj(g) / r
                    app = a[p, p].real
                    aqq = a[q, q].real
                    theta = (aqq - app) / (2.0 * r)
                    t = 1.0 / (fabs(theta) + sqrt(theta * theta + 1.0))
                    if theta < 0.0:
                        t = -t
                    c = 1.0 / sqrt(t * t + 1.0)
                    s = t * c
                    upp = c
                    upq = s
                    uqp = -s * dq
                    uqq = c * dq
                    for k in range(n):
                        x = a[k, p]
                        y = a[k, q]
                        a[k, p] = x * upp + y * uqp
                        a[k, q] = x * upq + y * uqq
                    for k in range(n):
                        x = a[p, k]
                        y = a[q, k]
                        a[p, k] = cconj(upp) * x + cconj(uqp) * y
                        a[q, k] = cconj(upq) * x + cconj(uqq) * y
                    a[p, q] = 0
                    a[q, p] = 0
                    a[p, p] = app - t * r
                    a[q, q] = aqq + t * r
                    for k in range(n):
                        x = v[k, p]
                        y = v[k, q]
                        v[k, p] = x * upp + y * uqp
                        v[k, q] = x * upq + y * uqq

    w = np.real(np.diag(a_arr)).copy()
    order = np.argsort(w, kind="stable")
    return w[order], v_arr[:, order], sweeps
