"""The reduced anti-self-dual system, its integrator and first integral.

The unknowns are three real functions a1, a2, a3 of t in (0, 1), obeying

    K_i/2 * da_i/dt = a_i - a_j a_k        (i, j, k cyclic)

with the metric coefficients returned by :func:`metric_coefficients`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import _backend
from .errors import BlowUpError, DomainError, StepUnderflowError

DEFAULT_EPS_END = 1e-6
DEFAULT_OVERFLOW = 1e8
DEFAULT_MAX_STEPS = 1_000_000


def _check_open_unit(t, name="t"):
    if not (0.0 < t < 1.0):
        raise DomainError(f"{name}={t!r} outside the open interval (0, 1)")


@dataclass(frozen=True)
class InstantonState:
    t: float
    a1: float
    a2: float
    a3: float

    def __post_init__(self):
        _check_open_unit(self.t)
        for name in ("a1", "a2", "a3"):
            if not math.isfinite(getattr(self, name)):
                raise DomainError(f"{name} is not finite")

    @property
    def a(self):
        return (self.a1, self.a2, self.a3)

    @classmethod
    def from_array(cls, t, a):
        return cls(float(t), float(a[0]), float(a[1]), float(a[2]))


class Branch(str, Enum):
    POS_REAL = "positive-real-root"
    NEG_REAL = "negative-real-root"
    POS_IMAG = "positive-imaginary-root"
    NEG_IMAG = "negative-imaginary-root"


@dataclass(frozen=True)
class ThetaData:
    theta_squared: float
    branch: Branch = Branch.POS_REAL

    def __post_init__(self):
        object.__setattr__(self, "branch", Branch(self.branch))
        imaginary = self.branch in (Branch.POS_IMAG, Branch.NEG_IMAG)
        if imaginary != (self.theta_squared < 0):
            raise DomainError(
                f"branch {self.branch.value} incompatible with theta^2={self.theta_squared}")

    @classmethod
    def from_sign(cls, theta_squared, sign=1):
        """Pick the real or imaginary branch from the sign of theta^2."""
        if theta_squared < 0:
            return cls(theta_squared, Branch.POS_IMAG if sign > 0 else Branch.NEG_IMAG)
        return cls(theta_squared, Branch.POS_REAL if sign > 0 else Branch.NEG_REAL)

    @property
    def is_real(self):
        return self.theta_squared >= 0

    @property
    def sign(self):
        return 1 if self.branch in (Branch.POS_REAL, Branch.POS_IMAG) else -1

    def theta(self):
        root = math.sqrt(abs(self.theta_squared))
        if self.is_real:
            return self.sign * root
        return complex(0.0, self.sign * root)


def metric_coefficients(t):
    """K1, K2, K3 at t."""
    _check_open_unit(t)
    # integer constants keep Fraction input exact
    t2 = t * t
    k1 = (t2 - 1) * (t2 - 9) / (4 * t)
    k2 = 4 * t * (t - 3) * (t + 1) / ((t + 3) * (t - 1))
    k3 = 4 * t * (t + 3) * (t - 1) / ((t - 3) * (t + 1))
    return k1, k2, k3


def asd_vector_field(s: InstantonState):
    k1, k2, k3 = metric_coefficients(s.t)
    a1, a2, a3 = s.a
    return (2.0 * (a1 - a2 * a3) / k1,
            2.0 * (a2 - a3 * a1) / k2,
            2.0 * (a3 - a1 * a2) / k3)


def conserved_quantity(s: InstantonState):
    t = s.t
    a1, a2, a3 = s.a
    return ((1 - t * t) / (9 - t * t) * a1 * a1
            + (1 + t) / (t * (3 - t)) * a2 * a2
            - (1 - t) / (t * (3 + t)) * a3 * a3)


def conserved_quantity_array(ts, a):
    """Vectorised :func:`conserved_quantity` over samples."""
    ts = np.asarray(ts, dtype=float)
    a = np.asarray(a, dtype=float)
    return ((1 - ts**2) / (9 - ts**2) * a[:, 0]**2
            + (1 + ts) / (ts * (3 - ts)) * a[:, 1]**2
            - (1 - ts) / (ts * (3 + ts)) * a[:, 2]**2)


def residue_weights(t):
    """Squared residue weights alpha_{i,0}(t)^2; defined on (0, 1]."""
    if not (0.0 < t <= 1.0):
        raise DomainError(f"t={t!r} outside (0, 1]")
    w1 = -(t * t - 1) / (16 * (t * t - 9))
    w2 = -(t + 1) / (16 * t * (3 - t))
    w3 = (1 - t) / (16 * t * (t + 3))
    return w1, w2, w3


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Accepted integrator samples with stored derivatives.

    Between samples each a_i is the cubic Hermite interpolant of the
    stored values and slopes; the integrator inserts extra samples where
    that interpolant would miss the solution by more than ``tol_used``.
    """
    ts: np.ndarray
    a: np.ndarray
    da: np.ndarray
    tol_used: float
    direction: int = field(default=1)

    def __post_init__(self):
        ts = np.array(self.ts, dtype=float)
        a = np.array(self.a, dtype=float).reshape(-1, 3)
        da = np.array(self.da, dtype=float).reshape(-1, 3)
        if not (len(ts) == len(a) == len(da)) or len(ts) < 2:
            raise DomainError("trajectory needs at least two consistent samples")
        steps = np.diff(ts) * self.direction
        if np.any(steps <= 0):
            raise DomainError("sample t values are not strictly monotone")
        for arr in (ts, a, da):
            arr.setflags(write=False)
        object.__setattr__(self, "ts", ts)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "da", da)

    def __len__(self):
        return len(self.ts)

    @property
    def samples(self):
        return [InstantonState.from_array(t, a) for t, a in zip(self.ts, self.a)]

    @property
    def t_range(self):
        return (min(self.ts[0], self.ts[-1]), max(self.ts[0], self.ts[-1]))

    def _locate(self, t):
        lo, hi = self.t_range
        if not (lo <= t <= hi):
            raise DomainError(f"t={t!r} outside trajectory range [{lo}, {hi}]")
        if self.direction > 0:
            j = int(np.searchsorted(self.ts, t, side="right")) - 1
        else:
            j = len(self.ts) - 1 - int(np.searchsorted(self.ts[::-1], t, side="left"))
        return min(max(j, 0), len(self.ts) - 2)

    def interpolate(self, t):
        """(a, da/dt) at t from the cubic Hermite interpolant."""
        j = self._locate(t)
        t0, t1 = self.ts[j], self.ts[j + 1]
        h = t1 - t0
        s = (t - t0) / h
        y0, y1 = self.a[j], self.a[j + 1]
        f0, f1 = self.da[j], self.da[j + 1]
        h00 = (1 + 2 * s) * (1 - s) ** 2
        h10 = s * (1 - s) ** 2
        h01 = s * s * (3 - 2 * s)
        h11 = s * s * (s - 1)
        val = h00 * y0 + h10 * h * f0 + h01 * y1 + h11 * h * f1
        d00 = 6 * s * s - 6 * s
        d10 = 3 * s * s - 4 * s + 1
        d01 = -d00
        d11 = 3 * s * s - 2 * s
        der = (d00 * y0 + d01 * y1) / h + d10 * f0 + d11 * f1
        return val, der

    def state_at(self, t):
        return InstantonState.from_array(t, self.interpolate(t)[0])

    def conserved(self):
        return conserved_quantity_array(self.ts, self.a)


def integrate_asd(s0: InstantonState, t_end, tol, *, overflow=DEFAULT_OVERFLOW,
                  eps_end=DEFAULT_EPS_END, max_steps=DEFAULT_MAX_STEPS, backend=None,
                  atol=None):
    """Adaptive Dormand-Prince 5(4) integration from s0.t to t_end.

    Local errors are held below atol + tol*|a_i| per component (atol
    defaults to tol), and the first-integral drift per step below tol/10.
    """
    if not tol > 0:
        raise DomainError("tol must be positive")
    if atol is not None and not atol > 0:
        raise DomainError("atol must be positive")
    _check_open_unit(t_end, "t_end")
    if not (eps_end <= t_end <= 1 - eps_end):
        raise DomainError(f"t_end={t_end!r} outside the clamped domain "
                          f"[{eps_end}, {1 - eps_end}]")
    if t_end == s0.t:
        raise DomainError("t_end equals the initial t")
    status, ts, ys, fs, t_stop = _backend.integrate(
        s0.t, s0.a, t_end, tol, overflow, max_steps, backend, atol)
    if status == 1:
        raise BlowUpError(f"|a| exceeded {overflow:g} at t={t_stop!r}", t=t_stop)
    if status == 2:
        raise StepUnderflowError(f"step size underflow at t={t_stop!r}", t=t_stop)
    if status == 3:
        raise StepUnderflowError(f"step budget {max_steps} exhausted at t={t_stop!r}",
                                 t=t_stop)
    direction = 1 if t_end > s0.t else -1
    return Trajectory(ts, ys, fs, tol, direction)


# closed forms --------------------------------------------------------------

CLOSED_FORM_KINDS = ("octahedral", "hopf", "degenerate-a1", "degenerate-a2")


def hopf_closed_form(t):
    """The Hopf-bundle solution; a2 is positive on (0, 1)."""
    d = t * t + 3
    return 3 * (1 - t * t) / d, 6 * (t + 1) / d, 6 * (1 - t) / d


def hopf_closed_form_derivative(t):
    d = t * t + 3
    return (-24 * t / d**2,
            6 * (3 - 2 * t - t * t) / d**2,
            6 * (t * t - 2 * t - 3) / d**2)


def closed_form_solution(kind, t, theta=None):
    """Named reference solution at t.  Degenerate kinds need a real theta."""
    _check_open_unit(t)
    if kind == "octahedral":
        return InstantonState(t, 1.0, 1.0, 1.0)
    if kind == "hopf":
        return InstantonState(t, *hopf_closed_form(t))
    if kind in ("degenerate-a1", "degenerate-a2"):
        if theta is None or isinstance(theta, complex) or not math.isfinite(theta):
            raise DomainError(f"{kind} needs a real theta")
        if kind == "degenerate-a1":
            return InstantonState(t, theta * math.sqrt((9 - t * t) / (1 - t * t)), 0.0, 0.0)
        # first integral with a1 = a3 = 0 integrates in closed form
        return InstantonState(t, 0.0, theta * math.sqrt(t * (3 - t) / (1 + t)), 0.0)
    raise DomainError(f"unknown closed-form kind {kind!r}")


def degenerate_a2_numeric(theta, t, t_ref=0.5, tol=1e-12):
    """Integrate the a2-only branch from its value at t_ref.

    The reference used by the tests; agrees with the closed form in
    :func:`closed_form_solution`.
    """
    s0 = closed_form_solution("degenerate-a2", t_ref, theta)
    if t == t_ref:
        return s0
    traj = integrate_asd(s0, t, tol)
    return InstantonState.from_array(t, traj.a[-1])


def theta_of(s: InstantonState, sign=1):
    return ThetaData.from_sign(conserved_quantity(s), sign)
