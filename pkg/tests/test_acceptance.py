"""Acceptance criteria, one literal test per criterion.

Each literal test checks the criterion exactly as stated and records one
line in the terminal summary.  Where the literal statement fails because a
reference formula or equation form is itself in error, a companion test
checks the corrected statement; see the notes for the analysis.
"""
import math
import time
from fractions import Fraction

import numpy as np
import pytest

from conftest import ACCEPTANCE, random_states, theta_of_state
from instanton_pvi import closed_form_solution, conserved_quantity, integrate_asd
from instanton_pvi.asd import metric_coefficients, residue_weights
from instanton_pvi.critical import (algebraicity_verdict, closed_form_samples, fit_exponent,
                                    geometric_offsets, limit_check, okamoto_samples,
                                    trajectory_samples)
from instanton_pvi.errors import BlowUpError, StepUnderflowError
from instanton_pvi.painleve import (map_point, map_to_pvi, okamoto_transform, pvi_parameters,
                                    residual_profile, squares_from_solution)
from instanton_pvi.shooting import (ShootingConfig, check_monotone, holonomy_data,
                                    holonomy_from_a, shoot, solve_for_target)

TOL = 1e-10
# the Hopf y depends on a1/a3, and both vanish at t = 1; matching y to 1e-8
# up to t = 0.98 needs the tighter tolerance
HOPF_TOL = 1e-12
SIGN = -1


def record(key, ok, detail, seconds=None):
    t = "" if seconds is None else f" [{seconds:.2f}s]"
    ACCEPTANCE[key] = f"{'PASS' if ok else 'FAIL'}  {detail}{t}"


def rel_err(got, want):
    return abs(got - want) / abs(want)


# the trajectory suite shared by criteria 3, 4 and 5 ---------------------------------------

def _both_halves(s0):
    return [integrate_asd(s0, 0.02, TOL), integrate_asd(s0, 0.98, TOL)]


@pytest.fixture(scope="module")
def suite():
    t0 = time.perf_counter()
    cases = [("octahedral", closed_form_solution("octahedral", 0.5), 1.0),
             ("hopf", closed_form_solution("hopf", 0.5), 3.0)]
    seed = 0
    randoms = []
    while len(randoms) < 10:
        # nondegenerate: every component away from 0; draws that blow up
        # inside (0.02, 0.98) are replaced
        s0 = random_states(1000 + seed, 1)[0]
        seed += 1
        try:
            trs = _both_halves(s0)
        except (BlowUpError, StepUnderflowError):
            continue
        randoms.append((f"random-{seed}", s0, theta_of_state(s0), trs))
    out = [(name, s0, th, _both_halves(s0)) for name, s0, th in cases] + randoms
    return out, time.perf_counter() - t0


def _residuals(suite_cases, convention):
    worst = 0.0
    for _, _, th, trs in suite_cases:
        for tr in trs:
            r, _ = residual_profile(map_to_pvi(tr, th, SIGN), th, SIGN, convention, mask=1e-6)
            worst = max(worst, float(np.nanmax(r)))
    return worst


# 1 -------------------------------------------------------------------------------------------

OCT_STATED = lambda t: -(t - 3) ** 2 * (t + 1) / ((t + 3) * (t * t + 3))  # noqa: E731


def test_criterion_1_octahedral_identity():
    t0 = time.perf_counter()
    s = closed_form_solution("octahedral", 0.5)
    th2 = conserved_quantity(s)
    ts = np.linspace(0.1, 0.9, 81)
    err = max(rel_err(map_point(t, (1.0, 1.0, 1.0), 1.0, SIGN).y, OCT_STATED(t)) for t in ts)
    sec = time.perf_counter() - t0
    ok = err < 1e-8 and abs(th2 - 1) < 1e-10 and sec < 1
    record("1", ok, f"max rel err vs stated y {err:.3g}, |theta^2-1| {abs(th2 - 1):.1e}", sec)
    assert ok


def test_criterion_1_corrected_sign():
    ts = np.linspace(0.1, 0.9, 81)
    err = max(rel_err(map_point(t, (1.0, 1.0, 1.0), 1.0, SIGN).y, -OCT_STATED(t)) for t in ts)
    th2 = conserved_quantity(closed_form_solution("octahedral", 0.3))
    ok = err < 1e-8 and abs(th2 - 1) < 1e-10
    record("1.corrected", ok, f"y = +(t-3)^2(t+1)/((t+3)(t^2+3)): max rel err {err:.3g}")
    assert ok


# 2 -------------------------------------------------------------------------------------------

def hopf_stated(t):
    d = t * t + 3
    return (3 * (1 - t * t) / d, -6 * (t + 1) / d, 6 * (1 - t) / d)


def hopf_y_stated(t):
    return -(t - 3) ** 2 * (t - 1) * (t + 1) ** 2 / ((t + 3) * (7 * t**4 + 6 * t**2 + 3))


def hopf_corrected(t):
    d = t * t + 3
    return (3 * (1 - t * t) / d, 6 * (t + 1) / d, 6 * (1 - t) / d)


def _hopf_errors(closed, y_ref):
    tr = integrate_asd(closed_form_solution("hopf", 0.5), 0.02, HOPF_TOL)
    tr2 = integrate_asd(closed_form_solution("hopf", 0.5), 0.98, HOPF_TOL)
    traj_err, y_err = 0.0, 0.0
    for t_set in (tr, tr2):
        for t, a in zip(t_set.ts, t_set.a):
            traj_err = max(traj_err, max(abs(u - v) for u, v in zip(a, closed(t))))
        for p in map_to_pvi(t_set, 3.0, SIGN):
            y_err = max(y_err, rel_err(p.y, y_ref(p.t_source)))
    return traj_err, y_err


def test_criterion_2_hopf_identity():
    t0 = time.perf_counter()
    traj_err, y_err = _hopf_errors(hopf_stated, hopf_y_stated)
    params = pvi_parameters(3, SIGN).as_tuple()
    want = (Fraction(1, 8), Fraction(-9, 8), Fraction(9, 8), Fraction(-5, 8))
    sec = time.perf_counter() - t0
    ok = traj_err < 1e-8 and y_err < 1e-8 and params == want and sec < 1
    record("2", ok, f"trajectory vs stated closed form {traj_err:.3g}, y vs stated y "
                    f"{y_err:.3g}, parameters exact {params == want}", sec)
    assert ok


def test_criterion_2_corrected_forms():
    def y_corr(t):
        return (t - 3) ** 2 * (t + 1) / ((t + 3) * (t * t + 3))
    traj_err, y_err = _hopf_errors(hopf_corrected, y_corr)
    params = pvi_parameters(3, SIGN).as_tuple()
    exact = all(isinstance(v, Fraction) for v in params)
    ok = traj_err < 1e-8 and y_err < 1e-8 and exact
    record("2.corrected", ok, f"a2 = +6(t+1)/(t^2+3): {traj_err:.3g}; "
                              f"y = octahedral y: {y_err:.3g}; parameters {params}")
    assert ok


# 3, 4, 5 ---------------------------------------------------------------------------------------

def test_criterion_3_residual_displayed_form(suite):
    cases, build = suite
    t0 = time.perf_counter()
    worst = _residuals(cases, "displayed")
    sec = time.perf_counter() - t0 + build
    ok = worst < 1e-6 and sec < 10
    record("3", ok, f"max residual of the displayed form {worst:.3g} over {len(cases)} "
                    "trajectories", sec)
    assert ok


def test_criterion_3_standard_form(suite):
    cases, build = suite
    t0 = time.perf_counter()
    worst = _residuals(cases, "standard")
    sec = time.perf_counter() - t0 + build
    ok = worst < 1e-6 and sec < 10
    record("3.standard", ok, f"max residual of the standard form {worst:.3g}", sec)
    assert ok


def test_criterion_4_conservation(suite):
    cases, build = suite
    t0 = time.perf_counter()
    worst = 0.0
    for _, _, _, trs in cases:
        for tr in trs:
            q = tr.conserved()
            worst = max(worst, float(np.max(np.abs(q - q[0]))))
    sec = time.perf_counter() - t0 + build
    ok = worst < 100 * TOL and sec < 5
    record("4", ok, f"max drift {worst:.3g} (bound {100 * TOL:g})", sec)
    assert ok


def test_criterion_5_round_trip(suite):
    # relative error of the vector of squares, over the samples the residual
    # suite uses (pole-distance > 1e-6); componentwise relative error is
    # unbounded where a random trajectory crosses a_i = 0
    cases, _ = suite
    t0 = time.perf_counter()
    worst, worst_comp, n = 0.0, 0.0, 0
    for _, _, th, trs in cases:
        for tr in trs:
            for t, a, p in zip(tr.ts, tr.a, map_to_pvi(tr, th, SIGN)):
                if p.pole_distance <= 1e-6:
                    continue
                sq = np.array(squares_from_solution(t, p.x, p.y, p.dy_dx, th, SIGN))
                a2 = np.asarray(a) ** 2
                worst = max(worst, float(np.linalg.norm(sq - a2) / np.linalg.norm(a2)))
                worst_comp = max(worst_comp, float(np.max(np.abs(sq - a2) / a2)))
                n += 1
    sec = time.perf_counter() - t0
    ok = worst < 1e-7
    record("5", ok, f"max relative error {worst:.3g} over {n} samples "
                    f"(componentwise {worst_comp:.3g})", sec)
    assert ok


# 6 ---------------------------------------------------------------------------------------------

def _residue_deviation(ts):
    worst = 0
    for t in ts:
        w = residue_weights(t)
        k = metric_coefficients(t)
        worst = max(worst, abs(sum(w) + Fraction(1, 16)), abs(sum(wi / ki for wi, ki in zip(w, k))))
    return worst


def _residue_ts():
    return [float(t) for t in np.random.default_rng(6).uniform(0, 1, 1000) if t > 0]


def test_criterion_6_residue_identities():
    worst = float(_residue_deviation(_residue_ts()))
    ok = worst < 1e-12
    record("6", ok, f"max deviation {worst:.3g} at 1000 random t in double precision")
    assert ok


def test_criterion_6_exact_at_the_same_points():
    # the terms w_i/K_i grow like 1/t^2, so near t = 0 the double sum can
    # only cancel to within an ulp of ~1e4; in exact arithmetic it is 0
    worst = _residue_deviation([Fraction(t) for t in _residue_ts()])
    ok = worst == 0
    record("6.exact", ok, f"max deviation {worst} with each t taken exactly as a rational")
    assert ok


# 7 ---------------------------------------------------------------------------------------------

def test_criterion_7_shooting():
    t0 = time.perf_counter()
    worst, failures, monotone = 0.0, [], True
    for r in (1, 2, 3):
        c_max = 0.0
        for target in (0.0, 0.25, 0.5, 0.75, 1.0):
            try:
                c, res = solve_for_target(target, r, tol=1e-5)
            except Exception as e:  # any failure to solve fails the criterion
                failures.append(f"r={r} target={target}: {type(e).__name__}")
                continue
            worst = max(worst, abs(res.r_plus - target))
            c_max = max(c_max, c)
        try:
            check_monotone(r, 0.0, c_max, 25)
        except Exception:
            monotone = False
    sec = time.perf_counter() - t0
    ok = not failures and worst < 1e-4 and monotone and sec < 60
    record("7", ok, f"15 solves, max |r_plus - target| {worst:.3g}, monotone {monotone}"
                    + (f", failures {failures}" if failures else ""), sec)
    assert ok


# 8 ---------------------------------------------------------------------------------------------

C_FAMILY = 1.5  # the Hopf boundary coefficient on r_minus = 3, carried to r_minus = 2.5


def _fit_one(traj, theta):
    ts = geometric_offsets(2e-6, 0.3, 160)
    return fit_exponent(trajectory_samples(traj, ts, theta, SIGN), "one")


def test_criterion_8_non_algebraicity():
    t0 = time.perf_counter()
    tr25 = shoot(ShootingConfig(C_FAMILY, 2.5)).trajectory
    lim25 = limit_check(tr25, 2.5, SIGN, C_FAMILY)
    tr1 = shoot(ShootingConfig(0.1, 1.0)).trajectory
    lim1 = limit_check(tr1, 1.0, SIGN, 0.1)
    verdict = algebraicity_verdict(2.5, [_fit_one(tr25, 2.5)], [lim25])
    sec = time.perf_counter() - t0
    ok = (lim25.finite and abs(lim25.limit - 0) <= 1e-3 and lim1.finite
          and abs(lim1.limit + 0.01) <= 1e-3 and verdict.verdict == "non-algebraic" and sec < 30)
    record("8", ok, f"theta=2.5 limit {lim25.limit:.6g} (stated 0), theta=1 c=0.1 limit "
                    f"{lim1.limit:.6g} (stated -0.01), verdict {verdict.verdict}", sec)
    assert ok


def test_criterion_8_verdict_only():
    tr25 = shoot(ShootingConfig(C_FAMILY, 2.5)).trajectory
    lim25 = limit_check(tr25, 2.5, SIGN, C_FAMILY)
    fit = _fit_one(tr25, 2.5)
    verdict = algebraicity_verdict(2.5, [fit], [lim25])
    ok = verdict.verdict == "non-algebraic"
    record("8.verdict", ok, f"{verdict.verdict}: " + "; ".join(verdict.reasons))
    assert ok


# 9 ---------------------------------------------------------------------------------------------

def test_criterion_9_okamoto():
    fixed = True
    for tv in [(0.5, -0.5, 0.25, -0.25), (1, 1, -1, -1), (Fraction(3, 2), 0, 0, Fraction(-3, 2))]:
        y, tv_new = okamoto_transform(0.3, 0.7, 1.2, tv)
        fixed &= y == 0.7 and tv_new == tuple(tv)
    # x -> 0 on the octahedral solution is reached as t -> 3 (x(t) > 1 on (0, 1))
    samples = closed_form_samples("octahedral", 3 + geometric_offsets(1e-4, 1e-1, 80), 1.0, SIGN)
    before = fit_exponent(samples, "zero")
    tv = pvi_parameters(1, SIGN).theta_vector
    after = fit_exponent(okamoto_samples(samples, tuple(float(v) for v in tv)), "zero")
    bound = 2 * max(before.fit_residual, after.fit_residual)
    diff = abs(before.exponent - after.exponent)
    ok = fixed and diff <= bound
    record("9", ok, f"delta=0 fixed {fixed}; l0 {before.exponent:.6f} -> {after.exponent:.6f}, "
                    f"|diff| {diff:.2g} <= {bound:.2g}")
    assert ok


# 10 --------------------------------------------------------------------------------------------

def test_criterion_10_holonomy():
    ok = True
    for n, a in [(1, Fraction(0)), (1, Fraction(1, 4)), (1, Fraction(1, 2))]:
        h = holonomy_from_a(n, a)
        th = 4 * a + n
        ok &= h.theta == th and h.pvi_params == pvi_parameters(th, SIGN)
        ok &= all(isinstance(v, Fraction) for v in h.pvi_params.as_tuple())
        ok &= h.trivial == (a == 0)
    for r in range(1, 10):
        ok &= holonomy_data(r, 1).trivial == (r % 4 == 1)
    record("10", ok, "(1,0), (1,1/4), (1,1/2) exact; trivial iff r_minus = 1 mod 4")
    assert ok
