# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled Dormand-Prince 5(4) kernel for the reduced ASD system.

Mirrors ``_rk_py.integrate`` step for step; see that module for the
status codes.
"""
import numpy as np
from libc.math cimport fabs, ceil, pow, isfinite

cdef double C2 = 1.0 / 5, C3 = 3.0 / 10, C4 = 4.0 / 5, C5 = 8.0 / 9
cdef double A21 = 1.0 / 5
cdef double A31 = 3.0 / 40, A32 = 9.0 / 40
cdef double A41 = 44.0 / 45, A42 = -56.0 / 15, A43 = 32.0 / 9
cdef double A51 = 19372.0 / 6561, A52 = -25360.0 / 2187, A53 = 64448.0 / 6561, A54 = -212.0 / 729
cdef double A61 = 9017.0 / 3168, A62 = -355.0 / 33, A63 = 46732.0 / 5247
cdef double A64 = 49.0 / 176, A65 = -5103.0 / 18656
cdef double B1 = 35.0 / 384, B3 = 500.0 / 1113, B4 = 125.0 / 192
cdef double B5 = -2187.0 / 6784, B6 = 11.0 / 84
cdef double E1 = 71.0 / 57600, E3 = -71.0 / 16695, E4 = 71.0 / 1920
cdef double E5 = -17253.0 / 339200, E6 = 22.0 / 525, E7 = -1.0 / 40
cdef double D1 = -12715105075.0 / 11282082432, D3 = 87487479700.0 / 32700410799
cdef double D4 = -10690763975.0 / 1880347072, D5 = 701980252875.0 / 199316789632
cdef double D6 = -1453857185.0 / 822651844, D7 = 69997945.0 / 29380423

cdef double SAFETY = 0.9, FACMIN = 0.2, FACMAX = 10.0
cdef double BETA = 0.04
cdef double QFAC = 0.1
cdef double QROUND = 64 * 2.220446049250313e-16
cdef double ALPHA = 0.2 - 0.75 * 0.04


cdef inline void rhs(double t, double* y, double* out) noexcept nogil:
    cdef double t2 = t * t
    cdef double k1 = (t2 - 1.0) * (t2 - 9.0) / (4.0 * t)
    cdef double k2 = 4.0 * t * (t - 3.0) * (t + 1.0) / ((t + 3.0) * (t - 1.0))
    cdef double k3 = 4.0 * t * (t + 3.0) * (t - 1.0) / ((t - 3.0) * (t + 1.0))
    out[0] = 2.0 * (y[0] - y[1] * y[2]) / k1
    out[1] = 2.0 * (y[1] - y[2] * y[0]) / k2
    out[2] = 2.0 * (y[2] - y[0] * y[1]) / k3


cdef inline void qgrad(double t, double* y, double* out) noexcept nogil:
    out[0] = 2.0 * (1 - t * t) / (9 - t * t) * y[0]
    out[1] = 2.0 * (1 + t) / (t * (3 - t)) * y[1]
    out[2] = -2.0 * (1 - t) / (t * (3 + t)) * y[2]


cdef class _Buffer:
    cdef public object ts, ys, fs
    cdef double[::1] tv
    cdef double[:, ::1] yv, fv
    cdef Py_ssize_t n, cap

    def __init__(self, Py_ssize_t cap):
        self.cap = cap
        self.n = 0
        self.ts = np.empty(cap)
        self.ys = np.empty((cap, 3))
        self.fs = np.empty((cap, 3))
        self.tv = self.ts
        self.yv = self.ys
        self.fv = self.fs

    cdef void push(self, double t, double* y, double* f):
        cdef int i
        if self.n == self.cap:
            self.cap *= 2
            self.ts = np.resize(self.ts, self.cap)
            self.ys = np.resize(self.ys, (self.cap, 3))
            self.fs = np.resize(self.fs, (self.cap, 3))
            self.tv = self.ts
            self.yv = self.ys
            self.fv = self.fs
        self.tv[self.n] = t
        for i in range(3):
            self.yv[self.n, i] = y[i]
            self.fv[self.n, i] = f[i]
        self.n += 1

    def result(self):
        n = self.n
        return self.ts[:n].copy(), self.ys[:n].copy(), self.fs[:n].copy()


cdef double _initial_step(double t, double* y, double* f, double direction,
                          double tol, double span, double atol):
    cdef double d0 = 0, d1 = 0, d2 = 0, h0, h1, dm
    cdef double y1[3]
    cdef double f1[3]
    cdef int i
    for i in range(3):
        d0 = max(d0, fabs(y[i]) / (atol + tol * fabs(y[i])))
        d1 = max(d1, fabs(f[i]) / (atol + tol * fabs(y[i])))
    if d0 < 1e-5 or d1 < 1e-5:
        h0 = 1e-6
    else:
        h0 = 0.01 * d0 / d1
    h0 = min(h0, span)
    for i in range(3):
        y1[i] = y[i] + direction * h0 * f[i]
    rhs(t + direction * h0, y1, f1)
    for i in range(3):
        d2 = max(d2, fabs(f1[i] - f[i]) / (atol + tol * fabs(y[i])))
    d2 /= h0
    dm = max(d1, d2)
    if dm <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = pow(0.01 / dm, 0.2)
    return min(100 * h0, min(h1, span))


def integrate(double t0, a0, double t_end, double tol, double overflow=1e8,
              long max_steps=1000000, double qfac=QFAC, atol=None):
    cdef double direction = 1.0 if t_end > t0 else -1.0
    cdef double span = fabs(t_end - t0)
    cdef double t = t0, t_new, h, hs, err, e, sc, herr, herm, fac, err_old = 1e-4
    cdef double th, td, remaining, ymax, eq, qs
    cdef double g[3]
    cdef double y[3]
    cdef double f[3]
    cdef double k2[3]
    cdef double k3[3]
    cdef double k4[3]
    cdef double k5[3]
    cdef double k6[3]
    cdef double k7[3]
    cdef double yt[3]
    cdef double yn[3]
    cdef double r2[3]
    cdef double r3[3]
    cdef double r4[3]
    cdef double r5[3]
    cdef double yd[3]
    cdef double fd[3]
    cdef int i, j, m
    cdef bint last, reject = False
    cdef long steps = 0
    cdef _Buffer buf = _Buffer(256)
    cdef double at = tol if atol is None else atol
    for i in range(3):
        y[i] = float(a0[i])
    rhs(t, y, f)
    buf.push(t, y, f)
    h = _initial_step(t, y, f, direction, tol, span, at)
    while True:
        if steps >= max_steps:
            return (3,) + buf.result() + (t,)
        remaining = fabs(t_end - t)
        if h >= remaining:
            h = remaining
            last = True
        else:
            last = False
        if h < 1e-14 * max(1.0, fabs(t)):
            return (2,) + buf.result() + (t,)
        hs = direction * h
        for i in range(3):
            yt[i] = y[i] + hs * A21 * f[i]
        rhs(t + C2 * hs, yt, k2)
        for i in range(3):
            yt[i] = y[i] + hs * (A31 * f[i] + A32 * k2[i])
        rhs(t + C3 * hs, yt, k3)
        for i in range(3):
            yt[i] = y[i] + hs * (A41 * f[i] + A42 * k2[i] + A43 * k3[i])
        rhs(t + C4 * hs, yt, k4)
        for i in range(3):
            yt[i] = y[i] + hs * (A51 * f[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i])
        rhs(t + C5 * hs, yt, k5)
        for i in range(3):
            yt[i] = y[i] + hs * (A61 * f[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i]
                                 + A65 * k5[i])
        t_new = t_end if last else t + hs
        rhs(t + hs, yt, k6)
        for i in range(3):
            yn[i] = y[i] + hs * (B1 * f[i] + B3 * k3[i] + B4 * k4[i] + B5 * k5[i]
                                 + B6 * k6[i])
        rhs(t_new, yn, k7)
        steps += 1

        err = 0.0
        eq = 0.0
        qs = 0.0
        qgrad(t_new, yn, g)
        for i in range(3):
            e = hs * (E1 * f[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i]
                      + E6 * k6[i] + E7 * k7[i])
            sc = at + tol * max(fabs(y[i]), fabs(yn[i]))
            err = max(err, fabs(e) / sc)
            eq += g[i] * e
            qs += 0.5 * fabs(g[i] * yn[i])
        err = max(err, fabs(eq) / max(qfac * tol, QROUND * qs))
        for i in range(3):
            if not isfinite(yn[i]):
                err = 1e300

        if err <= 1.0:
            for i in range(3):
                r2[i] = yn[i] - y[i]
                r3[i] = hs * f[i] - r2[i]
                r4[i] = r2[i] - hs * k7[i] - r3[i]
                r5[i] = hs * (D1 * f[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i]
                              + D6 * k6[i] + D7 * k7[i])
            herr = 0.0
            for i in range(3):
                yd[i] = y[i] + 0.5 * (r2[i] + 0.5 * (r3[i] + 0.5 * (r4[i] + 0.5 * r5[i])))
                herm = 0.5 * (y[i] + yn[i]) + hs * (f[i] - k7[i]) / 8.0
                sc = at + tol * fabs(yd[i])
                herr = max(herr, fabs(herm - yd[i]) / sc)
            if herr > 1.0:
                m = <int>ceil(pow(herr, 0.25)) + 1
                for j in range(1, m):
                    th = j / <double>m
                    for i in range(3):
                        yd[i] = y[i] + th * (r2[i] + (1 - th) * (r3[i] + th * (r4[i]
                                             + (1 - th) * r5[i])))
                    td = t + th * hs
                    rhs(td, yd, fd)
                    buf.push(td, yd, fd)
            t = t_new
            ymax = 0.0
            for i in range(3):
                y[i] = yn[i]
                f[i] = k7[i]
                ymax = max(ymax, fabs(y[i]))
            buf.push(t, y, f)
            if ymax > overflow:
                return (1,) + buf.result() + (t,)
            if last:
                return (0,) + buf.result() + (t,)
            fac = SAFETY * pow(max(err, 1e-10), -ALPHA) * pow(err_old, BETA)
            fac = min(FACMAX, max(FACMIN, fac))
            if reject:
                fac = min(fac, 1.0)
            h = h * fac
            err_old = max(err, 1e-4)
            reject = False
        else:
            if err < 1e300:
                fac = max(FACMIN, SAFETY * pow(err, -ALPHA))
            else:
                fac = FACMIN
            h = h * fac
            reject = True
