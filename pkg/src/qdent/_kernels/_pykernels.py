"""Pure-Python reference versions of the compiled kernels.

Signatures and return values match ``_ckernels`` exactly so the two can be
swapped at import time.
"""
import math

import numpy as np

STATUS_OK = 0
STATUS_UNDERFLOW = 1
STATUS_MAXSTEPS = 2


def _rk4(a, y, h):
    k1 = a @ y
    k2 = a @ (y + 0.5 * h * k1)
    k3 = a @ (y + 0.5 * h * k2)
    k4 = a @ (y + h * k3)
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def rk4_doubling(a, y0, t_out, tol, h_min, max_steps):
    """Integrate ``dy/dt = a @ y`` from t=0, reporting ``y`` at each ``t_out``.

    Classic RK4 with step doubling: one step of size ``h`` is compared with two
    steps of ``h/2``; the difference (over 15) estimates the local error and is
    also added back as a Richardson correction.

    Returns ``(ys, n_accepted, status)``.
    """
    a = np.ascontiguousarray(a, dtype=np.complex128)
    y = np.array(y0, dtype=np.complex128)
    t_out = np.asarray(t_out, dtype=np.float64)
    ys = np.empty((t_out.shape[0], y.shape[0]), dtype=np.complex128)

    scale = max(float(np.max(np.abs(a))) if a.size else 0.0, 1e-300)
    h = min(0.1 / scale, 1.0)
    t = 0.0
    n_acc = 0
    n_try = 0
    for i, target in enumerate(t_out):
        while t < target:
            if n_try >= max_steps:
                ys[i:] = y
                return ys, n_acc, STATUS_MAXSTEPS
            n_try += 1
            last = False
            step = h
            if t + step >= target:
                step = target - t
                last = True
            full = _rk4(a, y, step)
            half = _rk4(a, _rk4(a, y, 0.5 * step), 0.5 * step)
            diff = half - full
            err = float(np.max(np.abs(diff))) / 15.0
            if err <= tol:
                y = half + diff / 15.0
                t = target if last else t + step
                n_acc += 1
                if not last or step >= h:
                    fac = 4.0 if err == 0.0 else min(4.0, max(0.2, 0.9 * (tol / err) ** 0.2))
                    h = step * fac
            else:
                fac = max(0.1, 0.9 * (tol / err) ** 0.25)
                h = step * fac
                if h < h_min:
                    ys[i:] = y
                    return ys, n_acc, STATUS_UNDERFLOW
        ys[i] = y
    return ys, n_acc, STATUS_OK


def jacobi_eigh(h, tol, max_sweeps):
    """Cyclic Jacobi diagonalization of a small Hermitian matrix.

    Each pivot is first rotated onto the real axis by a diagonal phase, then
    annihilated with a real Givens rotation. Returns ``(w, v, sweeps)`` with
    eigenvalues ascending (stable order) and eigenvectors as columns;
    ``sweeps`` is -1 if ``max_sweeps`` was exhausted.
    """
    a = np.array(h, dtype=np.complex128)
    n = a.shape[0]
    v = np.eye(n, dtype=np.complex128)
    for k in range(n):
        a[k, k] = a[k, k].real
    total = float(np.sum(np.abs(a) ** 2))
    sweeps = -1
    for sweep in range(max_sweeps):
        off = 0.0
        for p in range(n):
            for q in range(p + 1, n):
                off += abs(a[p, q]) ** 2
        if off <= tol * tol * total:
            sweeps = sweep
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                g = a[p, q]
                r = abs(g)
                if r == 0.0:
                    continue
                dq = g.conjugate() / r
                app = a[p, p].real
                aqq = a[q, q].real
                theta = (aqq - app) / (2.0 * r)
                t = 1.0 / (abs(theta) + math.sqrt(theta * theta + 1.0))
                if theta < 0.0:
                    t = -t
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                # U restricted to (p, q): [[c, s], [-s*dq, c*dq]]
                upp, upq, uqp, uqq = c, s, -s * dq, c * dq
                colp = a[:, p] * upp + a[:, q] * uqp
                colq = a[:, p] * upq + a[:, q] * uqq
                a[:, p] = colp
                a[:, q] = colq
                rowp = np.conj(upp) * a[p, :] + np.conj(uqp) * a[q, :]
                rowq = np.conj(upq) * a[p, :] + np.conj(uqq) * a[q, :]
                a[p, :] = rowp
                a[q, :] = rowq
                a[p, q] = 0.0
                a[q, p] = 0.0
                a[p, p] = app - t * r
                a[q, q] = aqq + t * r
                vp = v[:, p] * upp + v[:, q] * uqp
                vq = v[:, p] * upq + v[:, q] * uqq
                v[:, p] = vp
                v[:, q] = vq
    w = np.real(np.diag(a)).copy()
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order], sweeps
