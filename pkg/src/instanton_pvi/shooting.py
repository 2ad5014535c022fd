"""The singular boundary-value problem at t = 1, solved by shooting.

Near t = 1 the finite-energy solutions behave like

    a1 ~ a3 ~ c (1-t)^k,   a2 -> r_minus,   k = (r_minus - 1)/2,

and the quantity of interest is r_plus = lim_{t->0} a1(t).  The solver
seeds the integrator from the boundary series a short distance from t = 1,
integrates towards t = 0 and extrapolates a1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational

import numpy as np

from .asd import InstantonState, ThetaData, Trajectory, integrate_asd
from .errors import (BlowUpError, BracketError, DomainError, NonConvergenceError,
                     StepUnderflowError)
from .painleve import PviParameters, pvi_parameters


@dataclass(frozen=True)
class ShootingConfig:
    c: float
    r_minus: float
    eps_start: float = 1e-5
    eps_end: float = 1e-6
    tol: float = 1e-10
    series_order: int = 1
    max_steps: int = 100_000

    def __post_init__(self):
        if not (self.c >= 0 and math.isfinite(self.c)):
            raise DomainError("c must be finite and >= 0")
        if not self.r_minus >= 1:
            raise DomainError("r_minus must be >= 1")
        if not (0 < self.eps_end < 1 - self.eps_start < 1):
            raise DomainError("need 0 < eps_end < 1 - eps_start < 1")
        if not self.tol > 0:
            raise DomainError("tol must be positive")
        if self.series_order not in (0, 1):
            raise DomainError("series_order must be 0 or 1")
        if not self.max_steps >= 1:
            raise DomainError("max_steps must be >= 1")


@dataclass(frozen=True)
class ShootingResult:
    config: ShootingConfig
    trajectory: Trajectory = field(repr=False)
    r_plus: float
    r_plus_error_estimate: float
    theta: ThetaData
    flags: tuple = ()


def boundary_series(c, r_minus, one_minus_t, order=1):
    """Instanton state at t = 1 - one_minus_t from the boundary expansion.

    order=0 keeps the leading terms only; order=1 adds the next term of
    each component (derived by substituting the expansion into the system).
    """
    e = float(one_minus_t)
    if not (0 < e < 1):
        raise DomainError("one_minus_t must lie in (0, 1)")
    r = float(r_minus)
    k = (r - 1) / 2
    lead = c * e**k if c else 0.0
    if order == 0:
        return InstantonState(1 - e, lead, r, lead)
    p = k / 4 - k / (r + 1)
    q = k / 4 + k / (r + 1)
    a1 = lead * (1 + p * e)
    a3 = lead * (1 + q * e)
    a2 = r - r * e * e / 4 + c * c * e ** (2 * k + 2) / (2 * (r + 1))
    return InstantonState(1 - e, a1, a2, a3)


def _aitken(v0, v1, v2):
    """Limit of v0, v1, v2 sampled at t, 2t, 4t, assuming v = L + C t^p."""
    d1, d2 = v1 - v0, v2 - v1
    if d1 == 0 or d2 == 0 or d2 / d1 <= 1:
        # no usable geometric rate; the samples already agree to rounding
        return v0, abs(d1)
    corr = d1 / (d2 / d1 - 1)
    return v0 - corr, abs(corr)


def shoot(config: ShootingConfig):
    s0 = boundary_series(config.c, config.r_minus, config.eps_start, config.series_order)
    # a1, a3 start near c*eps^k, which for large r_minus sits far below tol;
    # scale the absolute tolerance so they are still resolved relatively
    atol = config.tol * min(1.0, abs(s0.a1)) if s0.a1 else None
    traj = integrate_asd(s0, config.eps_end, config.tol, eps_end=config.eps_end,
                         max_steps=config.max_steps, atol=atol)
    e = config.eps_end
    v = [traj.interpolate(e * m)[0][0] for m in (1, 2, 4, 8)]
    r_plus, corr = _aitken(v[0], v[1], v[2])
    r_plus_b, _ = _aitken(v[1], v[2], v[3])
    err = max(corr, abs(r_plus - r_plus_b))
    if not math.isfinite(r_plus):
        raise NonConvergenceError("r_plus extrapolation is not finite")
    if err > max(1e-6, 1e4 * config.tol):
        raise NonConvergenceError(
            f"r_plus extrapolation unstable: estimates differ by {err:.3g}")
    q = traj.conserved()
    theta = ThetaData.from_sign(float(q[0]), 1)
    flags = ("r_minus=1: leading terms do not decay",) if config.r_minus == 1 else ()
    return ShootingResult(config, traj, float(r_plus), float(err), theta, flags)


def r_plus_of(c, r_minus, **kw):
    return shoot(ShootingConfig(c, r_minus, **kw)).r_plus


def _eval(c, r_minus, kw):
    """r_plus, treating blow-up inside (0, 1) as overshooting every target."""
    try:
        res = shoot(ShootingConfig(c, r_minus, **kw))
    except (BlowUpError, StepUnderflowError):
        return math.inf, None
    return res.r_plus, res


def solve_for_target(r_plus_target, r_minus, tol=1e-6, *, c_cap=64.0, c_start=1.0,
                     monotone_grid=0, integrator_tol=None, **shoot_kw):
    """Find c >= 0 with |r_plus(c) - target| <= tol.

    Brackets by doubling c from c_start (capped at c_cap), then runs a
    safeguarded secant (Illinois) iteration on the bracket.  With
    ``monotone_grid=n`` the map is also sampled at n equally spaced c in
    the bracket and a non-monotone sample raises.  Remaining keywords go
    to ShootingConfig; its ``tol`` is passed as ``integrator_tol``.
    Returns (c, ShootingResult).
    """
    if integrator_tol is not None:
        shoot_kw["tol"] = integrator_tol
    if not (0 <= r_plus_target <= 1):
        raise DomainError("target must lie in [0, 1]")
    f0, res0 = _eval(0.0, r_minus, shoot_kw)
    if abs(f0 - r_plus_target) <= tol:
        return 0.0, res0
    lo, flo = 0.0, f0 - r_plus_target
    hi = min(c_start, c_cap)
    while True:
        fh, res_hi = _eval(hi, r_minus, shoot_kw)
        if fh - r_plus_target > 0 or abs(fh - r_plus_target) <= tol:
            break
        if hi >= c_cap:
            raise BracketError(f"no bracket for target {r_plus_target} up to c={c_cap}")
        lo, flo = hi, fh - r_plus_target
        hi = min(2 * hi, c_cap)
    if abs(fh - r_plus_target) <= tol:
        return hi, res_hi
    fhi = fh - r_plus_target
    if monotone_grid:
        check_monotone(r_minus, 0.0, hi, monotone_grid, **shoot_kw)
    side = 0
    for _ in range(200):
        if math.isinf(fhi):
            c = 0.5 * (lo + hi)
        else:
            c = hi - fhi * (hi - lo) / (fhi - flo)
            if not (lo < c < hi):
                c = 0.5 * (lo + hi)
        fc_raw, res = _eval(c, r_minus, shoot_kw)
        fc = fc_raw - r_plus_target
        if abs(fc) <= tol:
            return c, res
        if fc > 0:
            hi, fhi = c, fc
            if side == 1 and not math.isinf(flo):
                flo /= 2
            side = 1
        else:
            lo, flo = c, fc
            if side == -1 and not math.isinf(fhi):
                fhi /= 2
            side = -1
        if hi - lo < 1e-15 * max(1.0, hi):
            break
    raise NonConvergenceError(f"root finding stalled near c={c!r}")


def check_monotone(r_minus, c_lo, c_hi, n, **shoot_kw):
    """Sample c -> r_plus on a grid; raise if it is not strictly increasing."""
    cs = np.linspace(c_lo, c_hi, n)
    vals = []
    for c in cs:
        v, _ = _eval(float(c), r_minus, shoot_kw)
        vals.append(v)
    vals = np.array(vals)
    finite = np.isfinite(vals)
    good = vals[finite]
    if np.any(np.diff(good) <= 0):
        j = int(np.argmin(np.diff(good)))
        raise NonConvergenceError(
            f"c -> r_plus not strictly monotone near c={cs[finite][j]:.6g}")
    return cs, vals


# holonomy ------------------------------------------------------------------

@dataclass(frozen=True)
class HolonomyData:
    n: int
    a_holonomy: object
    theta: object
    pvi_params: PviParameters
    pvi_params_other: PviParameters
    trivial: bool


def holonomy_data(r_minus, n, sign_choice=-1):
    """Bundle label n, holonomy parameter a = frac((r_minus-1)/4) and theta = 4a + n.

    Exact arithmetic when r_minus is an int or Fraction.  Both choices of
    the sign in alpha are reported; ``pvi_params`` uses sign_choice.
    """
    if not isinstance(n, int) or n % 4 != 1:
        raise DomainError(f"bundle label n={n!r} must be an integer = 1 mod 4")
    if not r_minus >= 1:
        raise DomainError("r_minus must be >= 1")
    if isinstance(r_minus, Rational):
        u = Fraction(r_minus - 1, 4)
    else:
        u = (r_minus - 1) / 4
    a = u - math.floor(u)
    theta = 4 * a + n
    return HolonomyData(
        n=n, a_holonomy=a, theta=theta,
        pvi_params=pvi_parameters(theta, sign_choice),
        pvi_params_other=pvi_parameters(theta, -sign_choice),
        trivial=(a == 0),
    )


def holonomy_from_a(n, a, sign_choice=-1):
    """The same record keyed by (n, a) directly; a must lie in [0, 1)."""
    if not isinstance(n, int) or n % 4 != 1:
        raise DomainError(f"bundle label n={n!r} must be an integer = 1 mod 4")
    a = Fraction(a) if isinstance(a, Rational) else a
    if not (0 <= a < 1):
        raise DomainError("holonomy parameter must lie in [0, 1)")
    theta = 4 * a + n
    return HolonomyData(n, a, theta, pvi_parameters(theta, sign_choice),
                        pvi_parameters(theta, -sign_choice), a == 0)
