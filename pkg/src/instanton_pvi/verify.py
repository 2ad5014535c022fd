"""Built-in invariant suite behind ``instanton-pvi verify``.

Each check returns (ok, detail).  The suite is quick by design; the test
tree holds the heavier versions.
"""
from __future__ import annotations

import math
import time
from fractions import Fraction

import numpy as np

from . import _backend
from .asd import (InstantonState, asd_vector_field, closed_form_solution, conserved_quantity,
                  hopf_closed_form, hopf_closed_form_derivative, integrate_asd,
                  metric_coefficients, residue_weights)
from .critical import fit_exponent, rationality_test
from .painleve import (PviSample, map_point, map_to_pvi, okamoto_transform, pvi_parameters,
                       residual_profile, squares_from_solution)
from .shooting import holonomy_from_a, r_plus_of

TOL = 1e-10


def _random_states(rng, n):
    out = []
    while len(out) < n:
        a = rng.uniform(-1.5, 1.5, 3)
        if np.min(np.abs(a)) > 0.1:
            out.append(InstantonState(0.5, *a))
    return out


def check_octahedral():
    s = InstantonState(0.5, 1, 1, 1)
    q = conserved_quantity(s)
    f = asd_vector_field(s)
    return abs(q - 1) < 1e-14 and max(map(abs, f)) == 0, f"Q={q!r}"


def check_hopf_solves_system():
    worst = 0.0
    for t in np.linspace(0.05, 0.95, 19):
        s = InstantonState(float(t), *hopf_closed_form(float(t)))
        f = asd_vector_field(s)
        d = hopf_closed_form_derivative(float(t))
        worst = max(worst, max(abs(u - v) for u, v in zip(f, d)))
    return worst < 1e-12, f"max |f - a'| = {worst:.2e}"


def check_residues(rng):
    worst = 0.0
    for t in rng.uniform(0.01, 0.99, 200):
        w = residue_weights(float(t))
        k = metric_coefficients(float(t))
        worst = max(worst, abs(sum(w) + 1 / 16), abs(sum(wi / ki for wi, ki in zip(w, k))))
    return worst < 1e-12, f"max deviation {worst:.2e}"


def check_conservation(rng):
    worst = 0.0
    for s0 in _random_states(rng, 5):
        for t_end in (0.05, 0.95):
            try:
                tr = integrate_asd(s0, t_end, TOL)
            except Exception:
                continue
            q = tr.conserved()
            worst = max(worst, float(np.max(np.abs(q - q[0]))))
    return worst < 100 * TOL, f"max drift {worst:.2e}"


def check_backends_agree():
    if len(_backend.BACKENDS) < 2:
        return True, "python only (extension not built)"
    s0 = InstantonState(0.5, 0.7, 1.3, -0.4)
    a = integrate_asd(s0, 0.1, TOL, backend="compiled")
    b = integrate_asd(s0, 0.1, TOL, backend="python")
    same = len(a.ts) == len(b.ts) and np.allclose(a.a, b.a, rtol=0, atol=1e-13)
    return same, f"{len(a.ts)} vs {len(b.ts)} samples"


def check_residual(rng):
    worst = 0.0
    cases = [(closed_form_solution("octahedral", 0.5), 1.0),
             (closed_form_solution("hopf", 0.5), 3.0)]
    cases += [(s, math.sqrt(abs(conserved_quantity(s)))) for s in _random_states(rng, 3)]
    for s0, th in cases:
        if conserved_quantity(s0) < 0:
            th = complex(0, th)
        try:
            tr = integrate_asd(s0, 0.9, TOL)
        except Exception:
            continue
        for sign in (-1, 1):
            r, _ = residual_profile(map_to_pvi(tr, th, sign), th, sign)
            worst = max(worst, float(np.nanmax(r)))
    return worst < 1e-6, f"max residual {worst:.2e}"


def check_round_trip():
    s = InstantonState(0.4, 0.8, -1.1, 0.6)
    q = conserved_quantity(s)
    th = math.sqrt(q) if q > 0 else complex(0, math.sqrt(-q))
    worst = 0.0
    for sign in (-1, 1):
        p = map_point(s.t, s.a, th, sign)
        sq = squares_from_solution(s.t, p.x, p.y, p.dy_dx, th, sign)
        worst = max(worst, max(abs(u - v * v) / (v * v) for u, v in zip(sq, s.a)))
    return worst < 1e-7, f"max relative error {worst:.2e}"


def check_okamoto_fixed_point():
    y, tv = okamoto_transform(0.3, 0.7, 1.2, (0.5, -0.5, 0.25, -0.25))
    return y == 0.7 and tv == (0.5, -0.5, 0.25, -0.25), "delta = 0"


def check_holonomy():
    rows = [(1, Fraction(0)), (1, Fraction(1, 4)), (1, Fraction(1, 2))]
    ok = True
    for n, a in rows:
        h = holonomy_from_a(n, a)
        th = 4 * a + n
        want = pvi_parameters(th, -1).as_tuple()
        ok &= h.pvi_params.as_tuple() == want and h.trivial == (a == 0)
    return ok, "(1,0), (1,1/4), (1,1/2)"


def check_shooting():
    # r_minus = 1, c = 1 continues to the constant solution
    rp = r_plus_of(1.0, 1)
    # against the closed-form connection between c and r_plus
    r, c = 2.0, 0.5
    k = math.gamma(r + 1) / (2 ** (r - 1) * math.gamma((r + 1) / 2) ** 2)
    want = 6 / math.pi * math.asin(c / (2 * k))
    got = r_plus_of(c, r)
    return abs(rp - 1) < 1e-8 and abs(got - want) < 1e-8, f"r_plus={rp!r}, {got!r} vs {want!r}"


def check_power_law_fit():
    x = np.geomspace(1e-6, 1e-3, 40)
    samples = [PviSample(0.0, float(v), 3 * v ** (2 / 3), 0.0) for v in x]
    f = fit_exponent(samples, "zero")
    ok = abs(f.exponent - 2 / 3) < 1e-8 and abs(f.amplitude - 3) < 1e-8
    ok &= rationality_test(f.exponent, 10, 1e-5)[:2] == (2, 3)
    return ok, f"exponent {f.exponent!r}"


def suite(seed=0):
    rng = np.random.default_rng(seed)
    return [
        ("octahedral constant solution", check_octahedral),
        ("hopf closed form solves the system", check_hopf_solves_system),
        ("residue identities", lambda: check_residues(rng)),
        ("conservation along trajectories", lambda: check_conservation(rng)),
        ("kernels agree", check_backends_agree),
        ("painleve residual", lambda: check_residual(rng)),
        ("squares round trip", check_round_trip),
        ("okamoto fixed point", check_okamoto_fixed_point),
        ("holonomy table", check_holonomy),
        ("shooting anchors", check_shooting),
        ("power-law fit", check_power_law_fit),
    ]


def run_suite(seed=0):
    """List of (name, ok, detail, seconds)."""
    out = []
    for name, fn in suite(seed):
        t0 = time.perf_counter()
        try:
            ok, detail = fn()
        except Exception as e:  # a crash counts as a failed check
            ok, detail = False, f"{type(e).__name__}: {e}"
        out.append((name, bool(ok), detail, time.perf_counter() - t0))
    return out
