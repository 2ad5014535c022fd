"""Correspondence between reduced instantons and Painleve VI solutions.

The one-parameter family is

    y'' = 1/2 (1/y + 1/(y-1) + 1/(y-x)) y'^2 - (1/x + 1/(x-1) + 1/(y-x)) y'
          + y(y-1)(y-x)/(x^2 (x-1)^2) * (alpha + beta x/y^2
                                          + gamma (x-1)/(y-1)^2
                                          + delta x(x-1)/(y-x)^2)

with alpha = (theta +- 2)^2/8, beta = -theta^2/8, gamma = theta^2/8,
delta = -(theta^2 - 4)/8.  An instanton (a1, a2, a3) at t gives the point
x = cross_ratio(t) and the value y from :func:`y_from_state`.

Derivatives of y are not finite-differenced: along a solution of the ASD
system every t-derivative of (a1, a2, a3) is a polynomial expression in
the state, so y, dy/dt and d2y/dt2 are carried exactly through
second-order jets and converted to x-derivatives by the chain rule.
"""
from __future__ import annotations

import cmath
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

import mpmath
import numpy as np

from .asd import InstantonState, ThetaData, Trajectory, conserved_quantity
from .errors import (DegenerateBranchError, DomainError, InconsistencyError,
                     PoleError)

POLE_MASK = 1e-8


# second-order jets ---------------------------------------------------------

class Jet:
    """Value with first and second derivative in one variable."""
    __slots__ = ("v", "d", "dd")

    def __init__(self, v, d=0.0, dd=0.0):
        self.v, self.d, self.dd = v, d, dd

    @staticmethod
    def lift(o):
        return o if isinstance(o, Jet) else Jet(o)

    def __add__(self, o):
        o = Jet.lift(o)
        return Jet(self.v + o.v, self.d + o.d, self.dd + o.dd)

    __radd__ = __add__

    def __neg__(self):
        return Jet(-self.v, -self.d, -self.dd)

    def __sub__(self, o):
        return self + (-Jet.lift(o))

    def __rsub__(self, o):
        return Jet.lift(o) - self

    def __mul__(self, o):
        o = Jet.lift(o)
        return Jet(self.v * o.v, self.d * o.v + self.v * o.d,
                   self.dd * o.v + 2 * self.d * o.d + self.v * o.dd)

    __rmul__ = __mul__

    def __truediv__(self, o):
        o = Jet.lift(o)
        w = self.v / o.v
        wd = (self.d - w * o.d) / o.v
        wdd = (self.dd - 2 * wd * o.d - w * o.dd) / o.v
        return Jet(w, wd, wdd)

    def __rtruediv__(self, o):
        return Jet.lift(o) / self

    def __pow__(self, n):
        out = Jet(1.0)
        for _ in range(n):
            out = out * self
        return out


def _rhs(t, a1, a2, a3):
    # same formulas as asd.asd_vector_field but jet-friendly and unchecked
    t2 = t * t
    k1 = (t2 - 1) * (t2 - 9) / (4 * t)
    k2 = 4 * t * (t - 3) * (t + 1) / ((t + 3) * (t - 1))
    k3 = 4 * t * (t + 3) * (t - 1) / ((t - 3) * (t + 1))
    return (2 * (a1 - a2 * a3) / k1, 2 * (a2 - a3 * a1) / k2, 2 * (a3 - a1 * a2) / k3)


def state_jets(t, a):
    """Jets of t and a_i along the ASD flow through (t, a)."""
    f = _rhs(t, *a)
    first = _rhs(Jet(t, 1.0), *(Jet(ai, fi) for ai, fi in zip(a, f)))
    tj = Jet(t, 1.0, 0.0)
    aj = tuple(Jet(ai, fi, gi.d) for ai, fi, gi in zip(a, f, first))
    return tj, aj


# cross ratio ---------------------------------------------------------------

def _x_of(t):
    return (t + 1) * (t - 3) ** 3 / ((t - 1) * (t + 3) ** 3)


def cross_ratio(t):
    if t == 1 or t == -3:
        raise PoleError(f"cross ratio has a pole at t={t!r}", t=t)
    return _x_of(t)


def cross_ratio_derivative(t):
    """dx/dt in closed form."""
    if t == 1 or t == -3:
        raise PoleError(f"cross ratio has a pole at t={t!r}", t=t)
    # x'/x = 1/(t+1) + 3/(t-3) - 1/(t-1) - 3/(t+3) = 16 t^2/((t^2-1)(t^2-9))
    return 16 * t**2 * (t - 3) ** 2 / ((t - 1) ** 2 * (t + 3) ** 4)


def one_minus_cross_ratio(t):
    """1 - x(t) without cancellation; it vanishes like t^3 at t = 0."""
    if t == 1 or t == -3:
        raise PoleError(f"cross ratio has a pole at t={t!r}", t=t)
    return 16 * t**3 / ((t - 1) * (t + 3) ** 3)


def cross_ratio_jet(t):
    return _x_of(Jet(t, 1.0))


# parameters ----------------------------------------------------------------

@dataclass(frozen=True)
class PviParameters:
    alpha: object
    beta: object
    gamma: object
    delta: object
    theta_vector: tuple
    sign_choice: int
    theta: object

    def as_tuple(self):
        return (self.alpha, self.beta, self.gamma, self.delta)


def _theta_value(theta):
    if isinstance(theta, ThetaData):
        return theta.theta()
    return theta


def pvi_parameters(theta, sign_choice):
    """alpha = (theta + 2 s)^2/8 and the rest of the family.

    Integer or Fraction theta gives exact Fraction parameters.
    """
    if sign_choice not in (1, -1):
        raise DomainError("sign_choice must be +1 or -1")
    th = _theta_value(theta)
    if isinstance(th, Rational):
        th = Fraction(th)
        eighth, half = Fraction(1, 8), Fraction(1, 2)
    else:
        eighth, half = 0.125, 0.5
    th2 = th * th
    return PviParameters(
        alpha=eighth * (th + 2 * sign_choice) ** 2,
        beta=-eighth * th2,
        gamma=eighth * th2,
        delta=-eighth * (th2 - 4),
        theta_vector=(half * th,) * 4,
        sign_choice=sign_choice,
        theta=th,
    )


# the map -------------------------------------------------------------------

def y_from_state(t, a, theta, sign_choice):
    """y at one point.  Works on floats, complex numbers and jets.

    The denominator carries -s*16*theta*a2*a3*t^3 so that the result solves
    the equation with alpha = (theta + 2 s)^2/8 for the same s.
    """
    a1, a2, a3 = a
    p2, p3 = a2 * a2, a3 * a3
    num = (t - 3) ** 2 * (t + 1) * ((t * t + 4 * t + 3) * p2 - (t * t - 4 * t + 3) * p3) * a1
    den = (t + 3) * (((t * t - 2 * t - 3) ** 2 * p2 - (t * t + 2 * t - 3) ** 2 * p3) * a1
                     - sign_choice * 16 * theta * a2 * a3 * t ** 3)
    return num, den


@dataclass(frozen=True)
class PviSample:
    t_source: float
    x: float
    y: complex
    dy_dx: complex
    d2y_dx2: complex | None = None

    @property
    def pole_distance(self):
        return min(abs(self.y), abs(self.y - 1), abs(self.y - self.x))


def _clean(z):
    # real theta keeps y real; drop the zero imaginary part
    if isinstance(z, complex) and z.imag == 0:
        return z.real
    return z


def _cancellation(t, a, theta):
    """How many times smaller |num|, |den| of the y map are than their terms."""
    a1, a2, a3 = (abs(v) for v in a)
    p2, p3 = a2 * a2, a3 * a3
    num_scale = abs(t * t + 4 * t + 3) * p2 + abs(t * t - 4 * t + 3) * p3
    den_scale = ((t * t - 2 * t - 3) ** 2 * p2 + (t * t + 2 * t - 3) ** 2 * p3) * a1 \
        + 16 * abs(theta) * a2 * a3 * abs(t) ** 3
    return num_scale, den_scale


def _jets_y(t, a, theta, sign_choice):
    tj, aj = state_jets(t, tuple(a))
    num, den = y_from_state(tj, aj, theta, sign_choice)
    if abs(den.v) == 0 or abs(den.v) < 1e-300:
        raise PoleError(f"denominator of the y map vanishes at t={t!r}", t=t)
    yj = num / den
    xj = cross_ratio_jet(t)
    y_x = yj.d / xj.d
    y_xx = (yj.dd - y_x * xj.dd) / xj.d ** 2
    return num, den, xj.v, yj.v, y_x, y_xx


# below this ratio of |den| to the size of its terms, redo the jets in
# extended precision; the state itself is exact as given
CANCEL_RATIO = 1e-2


def map_point(t, a, theta, sign_choice, *, check=True, project=True):
    """PviSample for the ASD solution through (t, a); t need not lie in (0, 1).

    With ``project`` a state whose first integral misses theta^2 by less
    than 1e-6 (relative) is first moved onto Q = theta^2, so integration
    drift does not leak into y.  Near points where the numerator and
    denominator of the y map vanish together, the jets are re-evaluated
    with 50 significant digits.
    """
    if t in (0.0, 1.0, -1.0, 3.0, -3.0):
        raise PoleError(f"t={t!r} is a singular point of the system or of x(t)", t=t)
    if check:
        zeros = sum(1 for v in a if v == 0)
        if zeros >= 2:
            raise DegenerateBranchError(
                "two of the a_i vanish; y is undefined on this branch")
    a = tuple(a)
    a_in = a
    if project:
        a = tuple(_project(t, list(a), theta * theta))
    num, den, x, y, y_x, y_xx = _jets_y(t, a, theta, sign_choice)
    num_scale, den_scale = _cancellation(t, a, theta)
    if abs(den.v) < CANCEL_RATIO * den_scale or abs(num.v) < CANCEL_RATIO * num_scale * abs(a[0]):
        with mpmath.workdps(50):
            th = mpmath.mpc(theta) if isinstance(theta, complex) else mpmath.mpf(theta)
            tm = mpmath.mpf(t)
            am = [mpmath.mpf(v) for v in a_in]
            if project:
                am = _project(tm, am, th * th)
            _, _, x, y, y_x, y_xx = _jets_y(tm, am, th, sign_choice)
            x, y, y_x, y_xx = (_from_mp(v) for v in (x, y, y_x, y_xx))
    return PviSample(t_source=float(t), x=float(x), y=_clean(y),
                     dy_dx=_clean(y_x), d2y_dx2=_clean(y_xx))


def _q_and_grad(t, a):
    c1 = (1 - t * t) / (9 - t * t)
    c2 = (1 + t) / (t * (3 - t))
    c3 = -(1 - t) / (t * (3 + t))
    q = c1 * a[0] ** 2 + c2 * a[1] ** 2 + c3 * a[2] ** 2
    return q, (2 * c1 * a[0], 2 * c2 * a[1], 2 * c3 * a[2])


def _project(t, a, theta_sq, rel=1e-6):
    """Move a onto Q = theta^2 along grad Q when the mismatch is tiny.

    Near a common zero of the map's numerator and denominator, y is very
    sensitive to the gap between Q(a) and theta^2 left by the integrator;
    on the level set itself the map is well conditioned.
    """
    q, g = _q_and_grad(t, a)
    if abs(q - theta_sq) > rel * max(1, abs(theta_sq)):
        return a
    for _ in range(3):
        q, g = _q_and_grad(t, a)
        gg = sum(gi * gi for gi in g)
        if gg == 0:
            break
        step = (q - theta_sq) / gg
        a = [ai - step * gi for ai, gi in zip(a, g)]
    return a


def _from_mp(v):
    if isinstance(v, mpmath.mpc):
        return complex(v)
    if isinstance(v, mpmath.mpf):
        return float(v)
    return v


def map_state(s: InstantonState, theta, sign_choice):
    return map_point(s.t, s.a, _theta_value(theta), sign_choice)


def map_to_pvi(traj: Trajectory, theta, sign_choice):
    """One PviSample per trajectory sample."""
    if sign_choice not in (1, -1):
        raise DomainError("sign_choice must be +1 or -1")
    th = _theta_value(theta)
    a = traj.a
    dead = np.all(np.abs(a) < 1e-300, axis=0)
    if dead.sum() >= 2:
        raise DegenerateBranchError(
            "two of the a_i vanish identically along the trajectory; y is undefined")
    return [map_point(t, ai, th, sign_choice, check=False) for t, ai in zip(traj.ts, a)]


def theta_from_state(s: InstantonState, branch_hint=1):
    """ThetaData from the first integral; branch_hint is +1/-1 or a branch name."""
    q = conserved_quantity(s)
    if isinstance(branch_hint, str):
        return ThetaData(q, branch_hint)
    return ThetaData.from_sign(q, branch_hint)


# inverse relations ---------------------------------------------------------

def w_functions(x, y, dy_dx, theta):
    if x == 0 or x == 1:
        raise DomainError(f"x={x!r} is a critical point")
    d = x * (x - 1)
    w1 = 2 * dy_dx + ((theta - 2) * y * y - 2 * theta * x * y + 2 * y + theta * x) / d
    w2 = 2 * dy_dx + ((theta - 2) * y * y + 2 * (1 - theta) * y + theta * x) / d
    w3 = 2 * dy_dx + ((theta - 2) * y * y + 2 * y - theta * x) / d
    return w1, w2, w3


def effective_theta(theta, sign_choice):
    """The signed theta entering the w-functions for a given map sign."""
    return -sign_choice * _theta_value(theta)


def squares_from_solution(t, x, y, dy_dx, theta, sign_choice):
    """(a1^2, a2^2, a3^2) from a point of a Painleve solution.

    The w-functions are evaluated at -sign_choice*theta, the signed value
    for which they invert :func:`y_from_state` with the same sign_choice.
    """
    if y == 0 or y == 1 or y == x:
        raise PoleError(f"y={y!r} sits on a pole of the inverse map", t=t)
    w1, w2, w3 = w_functions(x, y, dy_dx, effective_theta(theta, sign_choice))
    a1sq = (t * t - 9) * x * (x - 1) ** 2 * w1 * w2 / (4 * (t * t - 1) * (y - 1) * (y - x))
    a2sq = t * (3 - t) * x * (x - 1) * w2 * w3 / (4 * (t + 1) * y * (y - 1))
    a3sq = t * (t + 3) * x * x * (x - 1) * w1 * w3 / (4 * (1 - t) * y * (y - x))
    return _clean(a1sq), _clean(a2sq), _clean(a3sq)


def _products(t, x, y, a1sq, a2sq, a3sq):
    p12 = 4 * (t * t - 1) * (y - 1) * (y - x) * a1sq / ((t * t - 9) * x * (x - 1) ** 2)
    p23 = 4 * (t + 1) * y * (y - 1) * a2sq / (t * (3 - t) * x * (x - 1))
    p13 = 4 * (1 - t) * y * (y - x) * a3sq / (t * (t + 3) * x * x * (x - 1))
    return p12, p23, p13


def derivative_from_squares(t, x, y, a1sq, a2sq, a3sq, theta, sign_choice, rtol=1e-6):
    """dy/dx recovered from the squares, the point (x, y) and theta.

    w1 comes from w1^2 = (w1 w2)(w1 w3)/(w2 w3); its sign is the one for
    which w2 = w1 + 2 theta y/x and w3 = w1 + 2 theta (y-1)/(x-1) reproduce
    the pairwise products.
    """
    if y == 0 or y == 1 or y == x:
        raise PoleError(f"y={y!r} sits on a pole of the inverse map", t=t)
    theta = effective_theta(theta, sign_choice)
    p12, p23, p13 = _products(t, x, y, a1sq, a2sq, a3sq)
    if p23 == 0:
        raise InconsistencyError("w2 w3 vanishes; w1 is not determined")
    root = cmath.sqrt(p12 * p13 / p23)
    best, best_err = None, None
    for w1 in (root, -root):
        w2 = w1 + 2 * theta * y / x
        w3 = w1 + 2 * theta * (y - 1) / (x - 1)
        scale = max(abs(p12), abs(p23), abs(p13))
        err = max(abs(w1 * w2 - p12), abs(w2 * w3 - p23), abs(w1 * w3 - p13)) / scale
        if best_err is None or err < best_err:
            best, best_err = w1, err
    if best_err > rtol:
        raise InconsistencyError(
            f"squares inconsistent with (x, y, theta): relative mismatch {best_err:.3g}")
    d = x * (x - 1)
    dy = (best - ((theta - 2) * y * y - 2 * theta * x * y + 2 * y + theta * x) / d) / 2
    return _clean(dy)


# residual ------------------------------------------------------------------

def pvi_residual(sample: PviSample, theta, sign_choice, convention="standard", scaled=True):
    """|lhs - rhs| of the equation at a sample.

    With ``scaled`` the difference is divided by max(1, largest term), so
    samples next to a movable pole of y (where y'' is huge) are judged by
    relative rather than absolute error.

    ``convention="standard"`` uses alpha + beta x/y^2 + ... with the
    parameters of :func:`pvi_parameters`; ``"displayed"`` uses the bracket
    (theta+-2)^2/8 + theta^2 x/(8y^2) + theta^2 (x-1)/(8(y-1)^2)
    + (theta^2-4) x(x-1)/(8(y-x)^2) with every sign positive.
    """
    if sample.d2y_dx2 is None:
        raise DomainError("sample has no second derivative")
    x, y, yp, ypp = sample.x, sample.y, sample.dy_dx, sample.d2y_dx2
    if y == 0 or y == 1 or y == x:
        raise PoleError(f"y={y!r} is a pole of the equation", t=sample.t_source)
    th = _theta_value(theta)
    th2 = th * th
    if convention == "standard":
        p = pvi_parameters(th, sign_choice)
        al, be, ga, de = p.alpha, p.beta, p.gamma, p.delta
    elif convention == "displayed":
        al, be, ga, de = (th + 2 * sign_choice) ** 2 / 8, th2 / 8, th2 / 8, (th2 - 4) / 8
    else:
        raise DomainError(f"unknown convention {convention!r}")
    al, be, ga, de = (complex(v) if isinstance(v, complex) else float(v)
                      for v in (al, be, ga, de))
    terms = (0.5 * (1 / y + 1 / (y - 1) + 1 / (y - x)) * yp * yp,
             -(1 / x + 1 / (x - 1) + 1 / (y - x)) * yp,
             y * (y - 1) * (y - x) / (x * x * (x - 1) ** 2)
             * (al + be * x / y**2 + ga * (x - 1) / (y - 1) ** 2 + de * x * (x - 1) / (y - x) ** 2))
    r = abs(ypp - sum(terms))
    if scaled:
        r /= max(1.0, abs(ypp), *(abs(v) for v in terms))
    return r


def residual_profile(samples, theta, sign_choice, convention="standard", mask=POLE_MASK,
                     scaled=True):
    """Residuals with near-pole samples masked out.

    Returns (residuals, flagged) where masked entries are nan and
    ``flagged`` lists their t_source.
    """
    out, flagged = [], []
    for s in samples:
        if s.pole_distance < mask:
            out.append(float("nan"))
            flagged.append(s.t_source)
        else:
            out.append(pvi_residual(s, theta, sign_choice, convention, scaled))
    return np.array(out), flagged


# Okamoto -------------------------------------------------------------------

def okamoto_transform(x, y, dy_dx, theta_vector):
    """(x, y, theta) -> (x, y + delta/q, theta - delta) with delta = sum(theta)/2."""
    th1, th2, th3, th4 = theta_vector
    delta = sum(theta_vector) / 2
    if delta == 0:
        return y, tuple(theta_vector)
    if y == 0 or y == 1 or y == x:
        raise PoleError(f"y={y!r} is a pole of q")
    yp = dy_dx
    two_q = ((x - 1) * yp - th1) / y + (yp - 1 - th2) / (y - x) - (x * yp + th3) / (y - 1)
    if two_q == 0:
        raise PoleError("q vanishes; the transformation is undefined here")
    q = two_q / 2
    return y + delta / q, tuple(th - delta for th in theta_vector)
