"""Pure-Python Dormand-Prince 5(4) kernel for the reduced ASD system.

Same contract as the compiled ``_rk`` module; used when the extension is
not built.  Returns ``(status, ts, ys, fs, t_stop)`` where ``status`` is

    0  reached t_end
    1  some |a_i| exceeded the overflow bound
    2  step size underflow
    3  step budget exhausted
"""
import math
import sys

# Butcher tableau (Dormand & Prince 1980)
C2, C3, C4, C5 = 1 / 5, 3 / 10, 4 / 5, 8 / 9
A21 = 1 / 5
A31, A32 = 3 / 40, 9 / 40
A41, A42, A43 = 44 / 45, -56 / 15, 32 / 9
A51, A52, A53, A54 = 19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729
A61, A62, A63, A64, A65 = 9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656
B1, B3, B4, B5, B6 = 35 / 384, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84
E1, E3, E4, E5, E6, E7 = (71 / 57600, -71 / 16695, 71 / 1920, -17253 / 339200,
                          22 / 525, -1 / 40)
# continuous extension (Hairer, Norsett & Wanner, dopri5)
D1, D3, D4 = -12715105075 / 11282082432, 87487479700 / 32700410799, -10690763975 / 1880347072
D5, D6, D7 = 701980252875 / 199316789632, -1453857185 / 822651844, 69997945 / 29380423

SAFETY, FACMIN, FACMAX = 0.9, 0.2, 10.0
BETA = 0.04
QFAC = 0.1
QROUND = 64 * sys.float_info.epsilon
ALPHA = 0.2 - 0.75 * BETA


def rhs(t, a1, a2, a3):
    t2 = t * t
    k1 = (t2 - 1.0) * (t2 - 9.0) / (4.0 * t)
    k2 = 4.0 * t * (t - 3.0) * (t + 1.0) / ((t + 3.0) * (t - 1.0))
    k3 = 4.0 * t * (t + 3.0) * (t - 1.0) / ((t - 3.0) * (t + 1.0))
    return (2.0 * (a1 - a2 * a3) / k1,
            2.0 * (a2 - a3 * a1) / k2,
            2.0 * (a3 - a1 * a2) / k3)


def qgrad(t, y):
    """Gradient of the first integral in a; used to weight local errors."""
    return (2.0 * (1 - t * t) / (9 - t * t) * y[0],
            2.0 * (1 + t) / (t * (3 - t)) * y[1],
            -2.0 * (1 - t) / (t * (3 + t)) * y[2])


def _initial_step(t, y, f, direction, tol, span, atol):
    # Hairer's heuristic, cut down to the 3-vector case
    d0 = max(abs(v) / (atol + tol * abs(v)) for v in y)
    d1 = max(abs(v) / (atol + tol * abs(w)) for v, w in zip(f, y))
    h0 = 1e-6 if (d0 < 1e-5 or d1 < 1e-5) else 0.01 * d0 / d1
    h0 = min(h0, span)
    y1 = [y[i] + direction * h0 * f[i] for i in range(3)]
    f1 = rhs(t + direction * h0, *y1)
    d2 = max(abs(f1[i] - f[i]) / (atol + tol * abs(y[i])) for i in range(3)) / h0
    dm = max(d1, d2)
    h1 = max(1e-6, h0 * 1e-3) if dm <= 1e-15 else (0.01 / dm) ** 0.2
    return min(100 * h0, h1, span)


def integrate(t0, a0, t_end, tol, overflow=1e8, max_steps=1_000_000, qfac=QFAC, atol=None):
    atol = tol if atol is None else atol
    direction = 1.0 if t_end > t0 else -1.0
    span = abs(t_end - t0)
    t = t0
    y = [float(v) for v in a0]
    f = list(rhs(t, *y))
    ts, ys, fs = [t], [tuple(y)], [tuple(f)]
    h = _initial_step(t, y, f, direction, tol, span, atol)
    err_old = 1e-4
    reject = False
    steps = 0
    while True:
        if steps >= max_steps:
            return 3, ts, ys, fs, t
        remaining = abs(t_end - t)
        if h >= remaining:
            h = remaining
            last = True
        else:
            last = False
        if h < 1e-14 * max(1.0, abs(t)):
            return 2, ts, ys, fs, t
        hs = direction * h
        k1 = f
        y2 = [y[i] + hs * A21 * k1[i] for i in range(3)]
        k2 = rhs(t + C2 * hs, *y2)
        y3 = [y[i] + hs * (A31 * k1[i] + A32 * k2[i]) for i in range(3)]
        k3 = rhs(t + C3 * hs, *y3)
        y4 = [y[i] + hs * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]) for i in range(3)]
        k4 = rhs(t + C4 * hs, *y4)
        y5 = [y[i] + hs * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i])
              for i in range(3)]
        k5 = rhs(t + C5 * hs, *y5)
        y6 = [y[i] + hs * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i]
                           + A65 * k5[i]) for i in range(3)]
        t_new = t_end if last else t + hs
        k6 = rhs(t + hs, *y6)
        y_new = [y[i] + hs * (B1 * k1[i] + B3 * k3[i] + B4 * k4[i] + B5 * k5[i]
                              + B6 * k6[i]) for i in range(3)]
        k7 = rhs(t_new, *y_new)
        steps += 1

        err = 0.0
        g = qgrad(t_new, y_new)
        eq = 0.0
        qs = 0.0
        for i in range(3):
            e = hs * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i]
                      + E6 * k6[i] + E7 * k7[i])
            sc = atol + tol * max(abs(y[i]), abs(y_new[i]))
            err = max(err, abs(e) / sc)
            eq += g[i] * e
            qs += 0.5 * abs(g[i] * y_new[i])
        # also bound the step's contribution to first-integral drift, but not
        # below the rounding level of Q itself (matters as |a| blows up)
        err = max(err, abs(eq) / max(qfac * tol, QROUND * qs))
        if not all(math.isfinite(v) for v in y_new):
            err = float("inf")

        if err <= 1.0:
            # dense-output check: compare Hermite cubic with the 4th-order
            # continuous extension at mid-step and subdivide if needed
            r2 = [y_new[i] - y[i] for i in range(3)]
            r3 = [hs * k1[i] - r2[i] for i in range(3)]
            r4 = [r2[i] - hs * k7[i] - r3[i] for i in range(3)]
            r5 = [hs * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i]
                        + D6 * k6[i] + D7 * k7[i]) for i in range(3)]

            def dense(th):
                return [y[i] + th * (r2[i] + (1 - th) * (r3[i] + th * (r4[i] + (1 - th) * r5[i])))
                        for i in range(3)]

            mid = dense(0.5)
            herr = 0.0
            for i in range(3):
                herm = 0.5 * (y[i] + y_new[i]) + hs * (k1[i] - k7[i]) / 8.0
                sc = atol + tol * abs(mid[i])
                herr = max(herr, abs(herm - mid[i]) / sc)
            if herr > 1.0:
                m = int(math.ceil(herr ** 0.25)) + 1
                for j in range(1, m):
                    th = j / m
                    yd = dense(th)
                    td = t + th * hs
                    ts.append(td)
                    ys.append(tuple(yd))
                    fs.append(tuple(rhs(td, *yd)))

            t = t_new
            y = y_new
            f = list(k7)
            ts.append(t)
            ys.append(tuple(y))
            fs.append(tuple(f))
            if max(abs(v) for v in y) > overflow:
                return 1, ts, ys, fs, t
            if last:
                return 0, ts, ys, fs, t
            fac = SAFETY * max(err, 1e-10) ** (-ALPHA) * err_old ** BETA
            fac = min(FACMAX, max(FACMIN, fac))
            if reject:
                fac = min(fac, 1.0)
            h = h * fac
            err_old = max(err, 1e-4)
            reject = False
        else:
            if math.isfinite(err):
                fac = max(FACMIN, SAFETY * err ** (-ALPHA))
            else:
                fac = FACMIN
            h = h * fac
            reject = True
