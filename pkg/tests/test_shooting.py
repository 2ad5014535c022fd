import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from instanton_pvi import conserved_quantity
from instanton_pvi.errors import BracketError, DomainError, StepUnderflowError
from instanton_pvi.painleve import pvi_parameters
from instanton_pvi.shooting import (ShootingConfig, boundary_series, check_monotone,
                                    holonomy_data, holonomy_from_a, r_plus_of, shoot,
                                    solve_for_target)


def connection(c, r):
    """r_plus as a function of c, from the linearisation at a2 = r (closed form)."""
    f = math.gamma(r + 1) / (2 ** (r - 1) * math.gamma((r + 1) / 2) ** 2)
    return 6 / math.pi * math.asin(c / (2 * f))


def critical_c(r):
    return 2 * math.gamma(r + 1) / (2 ** (r - 1) * math.gamma((r + 1) / 2) ** 2)


# boundary data -------------------------------------------------------------------

def test_boundary_series_leading_terms():
    s = boundary_series(0.7, 3.0, 1e-4, order=0)
    assert s.t == pytest.approx(1 - 1e-4)
    assert s.a == pytest.approx((0.7e-4, 3.0, 0.7e-4), rel=1e-15)


@given(st.floats(0.0, 3.0), st.floats(1.0, 5.0))
def test_first_order_series_sharpens_the_first_integral(c, r):
    # Q(1 - e) -> r^2; the corrected seed is closer
    e = 1e-3
    d0 = abs(conserved_quantity(boundary_series(c, r, e, 0)) - r * r)
    d1 = abs(conserved_quantity(boundary_series(c, r, e, 1)) - r * r)
    assert d1 <= d0 + 1e-12


def test_boundary_series_domain():
    with pytest.raises(DomainError):
        boundary_series(1.0, 2.0, 0.0)


# shooting against the connection formula ----------------------------------------------

@pytest.mark.parametrize("r", [1.0, 1.5, 2.0, 3.0, 4.0])
@pytest.mark.parametrize("frac", [0.1, 0.3, 0.45])
def test_r_plus_matches_connection_formula(r, frac):
    c = frac * critical_c(r)
    assert r_plus_of(c, r) == pytest.approx(connection(c, r), abs=1e-7)


def test_anchor_values():
    assert r_plus_of(0.0, 2.0) == pytest.approx(0.0, abs=1e-12)
    assert r_plus_of(1.0, 1.0) == pytest.approx(1.0, abs=1e-9)
    # the Hopf solution sits at c = 3/2 on r_minus = 3
    assert r_plus_of(1.5, 3.0) == pytest.approx(1.0, abs=1e-8)


def test_result_fields():
    res = shoot(ShootingConfig(0.5, 2.0))
    assert res.theta.theta() == pytest.approx(2.0, abs=1e-8)
    assert res.r_plus_error_estimate < 1e-6
    assert res.flags == ()
    assert shoot(ShootingConfig(0.5, 1.0)).flags


@pytest.mark.parametrize("r", [1.5, 2.0, 3.0])
def test_first_integral_equals_r_minus_squared(r):
    q = shoot(ShootingConfig(0.8, r)).trajectory.conserved()
    assert np.max(np.abs(q - r * r)) < 1e-8


@pytest.mark.parametrize("r", [2.0, 3.0])
def test_a1_minus_a3_decays_at_the_predicted_rate(r):
    tr = shoot(ShootingConfig(1.0, r, eps_start=1e-4)).trajectory
    e = np.array([2e-4, 4e-4, 8e-4, 1.6e-3])
    d = [abs(np.subtract(*tr.interpolate(1 - v)[0][[0, 2]])) for v in e]
    slope = np.polyfit(np.log(e), np.log(d), 1)[0]
    assert slope == pytest.approx((r + 1) / 2, abs=2e-2)


def test_stable_under_halving_the_seed_distance():
    a = r_plus_of(0.9, 2.5, eps_start=1e-5)
    b = r_plus_of(0.9, 2.5, eps_start=5e-6)
    assert a == pytest.approx(b, abs=1e-7)


@settings(max_examples=15)
@given(st.floats(0.05, 1.5), st.floats(0.05, 1.5))
def test_monotone_in_c(c1, c2):
    if abs(c1 - c2) < 1e-3:
        return
    lo, hi = sorted((c1, c2))
    assert r_plus_of(lo, 2.0) < r_plus_of(hi, 2.0)


def test_supercritical_c_blows_up_or_overshoots():
    from instanton_pvi.shooting import _eval
    v, _ = _eval(1.1 * critical_c(2.0), 2.0, {})
    assert v > 1 or math.isinf(v)


# root finding ------------------------------------------------------------------------

@pytest.mark.parametrize("r,target", [(1.0, 0.5), (2.0, 0.25), (3.0, 0.75), (2.0, 0.0)])
def test_solve_for_target_hits_the_oracle(r, target):
    c, res = solve_for_target(target, r, tol=1e-7)
    assert abs(res.r_plus - target) <= 1e-7
    if target:
        assert connection(c, r) == pytest.approx(target, abs=1e-6)
    else:
        assert c == 0.0


def test_bracket_error_when_cap_is_too_small():
    with pytest.raises(BracketError):
        solve_for_target(1.0, 3.0, c_cap=0.5)


def test_target_out_of_range():
    with pytest.raises(DomainError):
        solve_for_target(1.5, 2.0)


def test_check_monotone_returns_increasing_samples():
    cs, vals = check_monotone(2.0, 0.0, 1.2, 7)
    assert len(cs) == 7 and np.all(np.diff(vals) > 0)


def test_step_budget_is_enforced():
    with pytest.raises(StepUnderflowError):
        shoot(ShootingConfig(1.0, 2.0, max_steps=50))


@pytest.mark.parametrize("kw", [dict(c=-1.0), dict(c=math.inf), dict(r_minus=0.5),
                                dict(eps_start=0.0), dict(eps_end=0.999999),
                                dict(tol=0.0), dict(series_order=2), dict(max_steps=0)])
def test_config_validation(kw):
    base = dict(c=1.0, r_minus=2.0)
    base.update(kw)
    with pytest.raises(DomainError):
        ShootingConfig(**base)


# holonomy ----------------------------------------------------------------------------

@pytest.mark.parametrize("n,a", [(1, Fraction(0)), (1, Fraction(1, 4)), (1, Fraction(1, 2))])
def test_holonomy_table_exact(n, a):
    h = holonomy_from_a(n, a)
    assert h.theta == 4 * a + n and isinstance(h.theta, Fraction)
    assert h.pvi_params == pvi_parameters(4 * a + n, -1)
    assert h.pvi_params_other == pvi_parameters(4 * a + n, 1)
    assert h.trivial == (a == 0)


@pytest.mark.parametrize("r,a,trivial", [(1, 0, True), (5, 0, True), (2, Fraction(1, 4), False),
                                         (3, Fraction(1, 2), False), (Fraction(7, 2), Fraction(5, 8), False)])
def test_holonomy_from_r_minus(r, a, trivial):
    h = holonomy_data(r, 1)
    assert h.a_holonomy == a and h.trivial is trivial
    assert h.theta == 4 * a + 1


def test_holonomy_float_and_errors():
    assert holonomy_data(2.5, 1).theta == pytest.approx(2.5)
    for bad in (0, 2, 3):
        with pytest.raises(DomainError):
            holonomy_data(2, bad)
    with pytest.raises(DomainError):
        holonomy_from_a(1, Fraction(1))
    with pytest.raises(DomainError):
        holonomy_data(0.5, 1)
