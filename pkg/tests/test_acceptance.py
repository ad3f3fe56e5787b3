"""Exit criteria.  Run with ``pytest -m acceptance -s`` to see one PASS/FAIL line each."""

import json
import math
import random
import time
from fractions import Fraction

import numpy as np
import pytest

from apcalc import calculus as K
from apcalc import cli, counterexample as CE, hypoell as H, operators as O, regularity as R
from apcalc import symexpr as S
from apcalc.bohr import MeanSchedule, numerical_mean
from apcalc.hypoell import PolySymbol
from apcalc.scalars import EXACT, convert, pi
from apcalc.trigpoly import Basis, TrigPoly

from conftest import random_trigpoly

pytestmark = pytest.mark.acceptance

TWO_PI = 2 * math.pi


def report(k: int, ok: bool, detail: str):
    print(f"\n{'PASS' if ok else 'FAIL'} criterion {k}: {detail}")
    assert ok, detail


def _random_diffop(rng, d, nvars=2):
    space = d * (nvars - 1)
    alphas = [a for a in np.ndindex(*(4,) * d) if sum(a) <= 3]
    chosen = rng.sample(alphas, rng.randint(1, 3))
    coeffs = {a: random_trigpoly(rng, space, rng.randint(1, 5), EXACT, 2) for a in chosen}
    return S.poly_symbol(coeffs, d, nvars=nvars, mode=EXACT)


def test_1_exact_composition():
    rng = random.Random(1)
    t0 = time.perf_counter()
    worst = 0
    for _ in range(50):
        d = rng.randint(1, 2)
        a, b = _random_diffop(rng, d), _random_diffop(rng, d)
        f = random_trigpoly(rng, d, 3, EXACT, 3)
        direct = O.compose_direct(a, b, f).collapse()
        c = K.symbol_product_term(a, b, 0)
        for j in range(1, a.xi_degree() + 1):
            c = c + K.symbol_product_term(a, b, j)
        diff = direct - O.apply_symbol(c, f).collapse()
        worst = max(worst, len(diff.terms))
    dt = time.perf_counter() - t0
    report(1, worst == 0 and dt < 30, f"50 pairs, nonzero difference terms {worst}, {dt:.1f} s")


def test_2_amplitude_reduction():
    rng = random.Random(2)
    bad = 0
    for _ in range(20):
        d = rng.randint(1, 2)
        alphas = [a for a in np.ndindex(*(3,) * d) if sum(a) <= 2]
        coeffs = {a: random_trigpoly(rng, 2 * d, rng.randint(1, 4), EXACT, 2) for a in rng.sample(alphas, 2)}
        amp = S.poly_symbol(coeffs, d, nvars=3, mode=EXACT)
        f = random_trigpoly(rng, d, 3, EXACT, 3)
        red = K.amplitude_reduce(amp, 0)
        for j in (1, 2):
            red = red + K.amplitude_reduce(amp, j)
        if not (O.apply_symbol(red, f).collapse() - O.apply_amplitude(amp, f).collapse()).is_zero():
            bad += 1
    report(2, bad == 0, f"20 amplitudes, mismatches {bad}")


def test_3_parametrix_residual_decay():
    a = S.poly_symbol({(0,): TrigPoly.constant(1) + TrigPoly.exp(1, 0.5), (2,): TWO_PI ** 2}, 1)
    t0 = time.perf_counter()
    slopes = {N: K.residual_decay(a, N, radii=np.logspace(1, 3, 21)).slope for N in (1, 2, 3)}
    dt = time.perf_counter() - t0
    ok = all(slopes[N] <= -(N + 1) + 0.2 for N in slopes) and dt < 60
    report(3, ok, "slopes " + ", ".join(f"N={N}: {s:.3f}" for N, s in slopes.items()) + f", {dt:.1f} s")


def test_4_constant_coefficient_inversion(tmp_path, capsys):
    c = convert(4, EXACT) * pi(EXACT) * pi(EXACT)
    a = tmp_path / "a.json"
    a.write_text(json.dumps(S.poly_symbol({(0,): 1, (2,): c}, 1, mode=EXACT).to_json()))
    f = tmp_path / "f.json"
    g = TrigPoly.exp(1, mode=EXACT) + TrigPoly.exp(Fraction(-5, 2), 3, mode=EXACT) + TrigPoly.exp(0, 2, mode=EXACT)
    f.write_text(json.dumps(g.to_json()))
    code = cli.main(["solve", "--symbol", str(a), "--input", str(f), "--N", "0", "--mode", "exact"])
    rep = json.loads(capsys.readouterr().out)
    res = rep["result"]["residual"]
    report(4, code == 0 and res["exact_zero"], f"exact_zero={res['exact_zero']}, norms {res['norms']}")


def test_5_parseval_mean():
    B = Basis(("1", "sqrt(2)"))
    f = TrigPoly.exp((1, 0), 1 + 1j, basis=B) + TrigPoly.exp((0, 1), -0.5, basis=B) \
        + TrigPoly.exp((1, 1), 2, basis=B)
    exact = float(np.sum(np.abs(f.coeff_vector()) ** 2))
    est, _ = numerical_mean(lambda x: np.abs(f.evaluate(x)) ** 2, MeanSchedule((25, 50, 100)))
    err = abs(est - exact)
    report(5, err < 1e-3, f"|mean(|f|^2) - sum|c|^2| = {err:.2e} at T = 100")


def test_6_gevrey_fit():
    k = np.arange(1, 201)
    fit = R.gevrey_fit(R.CoeffData.from_profile(lambda t: np.exp(-2 * t ** 0.5), k))
    poly = R.gevrey_fit(R.CoeffData.from_profile(lambda t: t ** -3.0, k))
    ok = 1.95 <= fit.s_hat <= 2.05 and 1.9 <= fit.eps_hat <= 2.1 and poly.non_gevrey
    report(6, ok, f"s_hat={fit.s_hat:.3f}, eps_hat={fit.eps_hat:.3f}, polynomial decay NON-GEVREY={poly.non_gevrey}")


def test_7_hypoelliptic_exponents():
    ell = H.s_hypoelliptic_fit(PolySymbol({(0,): 1, (2,): TWO_PI ** 2}, 1))
    heat = H.s_hypoelliptic_fit(PolySymbol({(1, 0): 1j * TWO_PI, (0, 2): TWO_PI ** 2}, 2))
    lin = H.s_hypoelliptic_fit(PolySymbol({(1, 0): 1}, 2))
    ok = (ell.passed and abs(ell.rho_hat - 1) <= 0.05 and heat.passed and abs(heat.rho_hat - 0.5) <= 0.05
          and not lin.passed)
    report(7, ok, f"rho elliptic {ell.rho_hat:.3f}, heat {heat.rho_hat:.3f}, xi_1 passed={lin.passed}")


def test_8_strength():
    P = PolySymbol({(2,): 1, (0,): 1}, 1, EXACT)
    at0 = H.strength_sq(P)((0,))
    Pf = PolySymbol({(2,): 1, (0,): 1}, 1)
    Q = PolySymbol({(2,): 1}, 1)
    fwd, back = H.weaker_check(Q, Pf)[0], H.weaker_check(Pf, Q)[0]
    quart = H.weaker_check(PolySymbol({(4,): 1}, 1), Pf)[0]
    ok = at0 == 5 and fwd and back and not quart
    report(8, ok, f"strength_sq(0)={str(at0)}, xi^2 vs xi^2+1 {fwd}/{back}, xi^4 weaker={quart}")


def test_9_counterexample_growth():
    t0 = time.perf_counter()
    c0 = CE.C0_estimate(2, j_max=20).C0_lb
    ws, slope = CE.growth_slope(2, c0, (4, 8, 16), j_max=20)
    dt = time.perf_counter() - t0
    ok = all(w.M_n > w.n ** 0.25 for w in ws) and slope >= 0.2 and dt < 120
    vals = ", ".join(f"M_{w.n}={w.M_n:.3g}" for w in ws)
    report(9, ok, f"C0_lb={c0:.5f}, {vals}, slope {slope:.2f}, {dt:.1f} s")


def test_10_frequency_condition():
    lat = R.frequency_condition_check(R.integer_lattice(1), 1.0, [1.0], R_max=50)["results"][0]
    err = abs(lat["partial_sums"][-1] - (1 + 2 / (math.e - 1)))
    bnd = R.frequency_condition_check(R.bounded_example(), 1.0, [1.0])["results"][0]["verdict"]
    ok = err < 1e-9 and lat["verdict"] == "CONVERGENT" and bnd == "DIVERGENT"
    report(10, ok, f"lattice error {err:.1e}, bounded set {bnd}")


def test_11_symbol_class():
    a = S.bracket(2, 1)
    rep = S.verify_class(a, S.ClassParams(m=2, rho=1, delta=0))
    fitted = S.verify_class(a, S.ClassParams(m=2, rho=1, delta=0, C=rep.C_fit * (1 + 1e-9)))
    bad = S.verify_class(S.xi_var(0, 1), S.ClassParams(m=0, rho=1, delta=0, C=10.0))
    ok = fitted.passed and not bad.passed and bad.witness is not None
    report(11, ok, f"<xi>^2 at fitted C={rep.C_fit:.4g} passed={fitted.passed}, "
                   f"xi with m=0 passed={bad.passed}, witness {bad.witness}")
