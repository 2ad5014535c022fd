"""Critical behaviour of Painleve solutions at x = 0, 1, infinity.

Algebraic-type behaviour means a power law

    y ~ a0 x^l0            (x -> 0)
    1 - y ~ a1 (1-x)^l1    (x -> 1)
    y ~ a_inf x^(1-l_inf)  (x -> infinity)

and algebraic solutions need every l rational with 0 < l <= 1.  A
numerical fit can refute that but never prove it; the verdicts below keep
that asymmetry.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .asd import Trajectory
from .errors import DomainError, ExtrapolationError, FitError, NonPowerLawError
from .painleve import _theta_value, cross_ratio, map_point, one_minus_cross_ratio

POINTS = ("zero", "one", "infinity")


@dataclass(frozen=True)
class CriticalFit:
    point: str
    amplitude: complex
    exponent: float
    fit_residual: float
    window: tuple
    n_samples: int = 0


def _coordinates(samples, point):
    x = np.array([s.x for s in samples], dtype=float)
    y = np.array([s.y for s in samples])
    if point == "zero":
        dist, val = np.abs(x), y
    elif point == "one":
        dist, val = np.abs(1 - x), 1 - y
        # where t is known, take 1 - x from t: differencing x loses every
        # digit once 1 - x ~ t^3 drops below rounding
        for i, s in enumerate(samples):
            t = s.t_source
            if t is not None and math.isfinite(t) and t not in (1.0, -3.0):
                if abs(cross_ratio(t) - x[i]) <= 1e-12 * max(1.0, abs(x[i])):
                    dist[i] = abs(one_minus_cross_ratio(t))
    elif point == "infinity":
        dist, val = 1 / np.abs(x), y
    else:
        raise DomainError(f"point must be one of {POINTS}")
    keep = (dist > 0) & np.isfinite(dist) & (np.abs(val) > 0)
    return dist[keep], val[keep]


def _line(ld, lv):
    A = np.vstack([ld, np.ones_like(ld)]).T
    (slope, icpt), *_ = np.linalg.lstsq(A, lv, rcond=None)
    resid = float(np.max(np.abs(A @ np.array([slope, icpt]) - lv)))
    return float(slope), float(icpt), resid


def fit_exponent(samples, point, *, rho=1e-3, min_samples=8, stab_tol=1e-4,
                 max_residual=1e-2):
    """Least-squares power law on a geometric window [d*rho, d].

    d is the largest distance whose window slope agrees with the slope one
    decade closer in, to within stab_tol; if no window is stable the
    innermost one is used.  For point="infinity" the distance is 1/|x|, so
    the fitted slope is l_inf - 1.
    """
    dist, val = _coordinates(samples, point)
    if len(dist) < min_samples:
        raise FitError(f"need at least {min_samples} samples near {point}")
    order = np.argsort(dist)
    dist, val = dist[order], val[order]
    ld, lv = np.log(dist), np.log(np.abs(val))

    def window(d):
        m = (dist >= d * rho * (1 - 1e-12)) & (dist <= d * (1 + 1e-12))
        return m if m.sum() >= min_samples else None

    d_min = dist[0] / rho
    if d_min > dist[-1] * (1 + 1e-12):
        # the data span less than one window; fit everything
        cands = [dist[-1]]
    else:
        n = max(2, int(math.ceil(math.log10(dist[-1] / d_min) * 4)) + 1)
        cands = list(np.geomspace(dist[-1], d_min, n))
    fits = []
    for d in cands:
        m = window(d)
        if m is None:
            continue
        fits.append((d, m) + _line(ld[m], lv[m]))
    if not fits:
        raise FitError(f"no window near {point} holds {min_samples} samples")
    chosen = fits[-1]
    for i, (d, m, slope, icpt, res) in enumerate(fits):
        inner = [f for f in fits[i + 1:] if f[0] <= d / 10 * (1 + 1e-9)]
        if inner and abs(inner[0][2] - slope) <= stab_tol:
            chosen = fits[i]
            break
    d, m, slope, icpt, res = chosen
    exponent = 1 + slope if point == "infinity" else slope
    # amplitude keeps the sign/phase of the data; at infinity this is
    # y = a |x|^(1-l) = a dist^slope as well
    ratios = val[m] / dist[m] ** slope
    amp = complex(np.median(ratios.real), np.median(np.imag(ratios)))
    amp = amp.real if amp.imag == 0 else amp
    lo, hi = float(dist[m].min()), float(dist[m].max())
    fit = CriticalFit(point, amp, float(exponent), res, (lo, hi), int(m.sum()))
    if res > max_residual:
        raise NonPowerLawError(
            f"log-log residual {res:.3g} near {point} exceeds {max_residual}", fit)
    return fit


def rationality_test(exponent, max_denominator, tol):
    """Best rational p/q with q <= max_denominator, if within tol.

    Returns ``(p, q, in_range)`` with in_range meaning 0 < p/q <= 1, or
    None.
    """
    if max_denominator < 1:
        raise DomainError("max_denominator must be >= 1")
    if not math.isfinite(exponent):
        return None
    fr = Fraction(exponent).limit_denominator(max_denominator)
    if abs(exponent - fr) > tol:
        return None
    return fr.numerator, fr.denominator, bool(0 < fr <= 1)


# limits at t -> 1 ------------------------------------------------------------

@dataclass(frozen=True)
class LimitRecord:
    limit: complex
    finite: bool
    applicable: bool
    predicted: float | None
    matches_prediction: bool | None
    contradicts_divergence: bool
    estimates: tuple = field(default=())
    note: str = ""


def predicted_limit(theta, c):
    """The proof's values: 0 for theta > 1 and -c^2 for theta = 1."""
    if c is None:
        return None
    if theta > 1:
        return 0.0
    if theta == 1:
        return -c * c
    return None


def limit_check(traj: Trajectory, theta, sign_choice, c, *, tol=1e-3, eps0=None,
                theta_tol=1e-9):
    """Extrapolate y(t) as t -> 1 along a mapped trajectory.

    ``c`` is the boundary coefficient of a shooting solution, or None for
    solutions outside that family.  A finite limit is recorded as
    contradicting divergence of y at x = infinity.
    """
    th = float(_theta_value(theta))
    t_hi = traj.t_range[1]
    if t_hi < 1 - 1e-4:
        raise DomainError("trajectory must reach t >= 1 - 1e-4")
    e_min = 1 - t_hi
    e0 = eps0 if eps0 is not None else max(4 * e_min, 1e-6)
    eps = [e0 * 2**k for k in range(5)]
    ys = []
    for e in eps:
        s = map_point(1 - e, traj.interpolate(1 - e)[0], th, sign_choice)
        ys.append(s.y)
    ys = np.array(ys, dtype=complex)
    mags = np.abs(ys)
    slope = np.polyfit(np.log(eps), np.log(mags), 1)[0]
    th_round = round(th)
    pred = predicted_limit(round(th, 9) if abs(th - th_round) > theta_tol else th_round, c)
    applicable = c is not None
    if slope < -0.5:
        return LimitRecord(math.inf, False, applicable, pred,
                           None if pred is None else False, False,
                           tuple(float(v) for v in mags),
                           f"|y| grows like (1-t)^{slope:.3g}")

    def aitken(v0, v1, v2):
        d1, d2 = v1 - v0, v2 - v1
        if d1 == 0 or d2 == 0 or abs(d2 / d1) <= 1:
            return v0
        return v0 - d1 / (d2 / d1 - 1)

    est = [aitken(*ys[i:i + 3]) for i in range(3)]
    spread = max(abs(est[0] - est[1]), abs(est[0] - est[2]))
    if spread > tol:
        raise ExtrapolationError(
            f"limit estimate moves by {spread:.3g} under refinement")
    lim = complex(est[0])
    lim = lim.real if abs(lim.imag) <= 1e-12 else lim
    matches = None if pred is None else bool(abs(lim - pred) <= tol)
    note = "" if applicable else "outside the shooting family; the c-dichotomy does not apply"
    return LimitRecord(lim, True, applicable, pred, matches, applicable,
                       tuple(complex(v) for v in est), note)


# verdict -------------------------------------------------------------------

VERDICTS = ("consistent-with-algebraic", "non-algebraic", "inconclusive")


@dataclass(frozen=True)
class Verdict:
    verdict: str
    reasons: tuple


def algebraicity_verdict(theta, fits, limits=(), *, max_denominator=12, rational_tol=1e-3):
    """Refute algebraicity from necessary conditions; never confirm it."""
    if isinstance(theta, complex):
        raise DomainError("theta must be real")
    reasons = []
    failed = False
    checked = 0
    for f in fits:
        checked += 1
        rt = rationality_test(f.exponent, max_denominator, rational_tol)
        if rt is None:
            failed = True
            reasons.append(f"{f.point}: exponent {f.exponent:.6g} not rational "
                           f"within {rational_tol} (q <= {max_denominator})")
        elif not rt[2]:
            failed = True
            reasons.append(f"{f.point}: exponent {rt[0]}/{rt[1]} outside (0, 1]")
        else:
            reasons.append(f"{f.point}: exponent {rt[0]}/{rt[1]}")
    for lim in limits:
        if not lim.applicable:
            reasons.append("limit at t=1: not applicable (" + (lim.note or "no c") + ")")
            continue
        checked += 1
        if lim.contradicts_divergence:
            failed = True
            reasons.append(f"limit at t=1 is finite ({lim.limit:.6g}); "
                           "algebraic type at infinity would need y -> infinity")
        else:
            reasons.append("limit at t=1: y diverges")
    if failed:
        return Verdict("non-algebraic", tuple(reasons))
    if checked == 0:
        return Verdict("inconclusive", tuple(reasons) + ("no usable fits or limits",))
    return Verdict("consistent-with-algebraic", tuple(reasons))


# sampling helpers ------------------------------------------------------------

def geometric_offsets(lo, hi, n):
    if not (0 < lo < hi):
        raise DomainError("need 0 < lo < hi")
    return np.geomspace(lo, hi, n)


def closed_form_samples(kind, ts, theta, sign_choice):
    """Mapped samples of a closed-form solution, t anywhere off the poles.

    Only the kinds whose formulas extend past (0, 1) are accepted; the t > 1
    preimage of x -> 0 sits at t -> 3.
    """
    from .asd import hopf_closed_form
    if kind == "octahedral":
        def a_of(t):
            return (1.0, 1.0, 1.0)
    elif kind == "hopf":
        a_of = hopf_closed_form
    else:
        raise DomainError(f"no extended closed form for {kind!r}")
    return [map_point(float(t), a_of(float(t)), theta, sign_choice) for t in ts]


def trajectory_samples(traj: Trajectory, ts, theta, sign_choice):
    """Mapped samples at chosen t, using the trajectory's interpolant."""
    th = _theta_value(theta)
    return [map_point(float(t), traj.interpolate(float(t))[0], th, sign_choice)
            for t in ts]


def okamoto_samples(samples, theta_vector):
    """Transform y along samples; x and t_source are kept, derivatives dropped."""
    from .painleve import PviSample, okamoto_transform
    out = []
    for s in samples:
        y_new, _ = okamoto_transform(s.x, s.y, s.dy_dx, theta_vector)
        out.append(PviSample(s.t_source, s.x, y_new, float("nan")))
    return out
