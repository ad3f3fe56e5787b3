import math
from fractions import Fraction

import numpy as np
import pytest

from apcalc import hypoell as H
from apcalc import symexpr as S
from apcalc.hypoell import HypoellParams, HypoSampler, PolySymbol
from apcalc.scalars import EXACT
from apcalc.trigpoly import TrigPoly

ex = TrigPoly.exp
TWO_PI = 2 * math.pi


def P1(coeffs, mode="float"):
    return PolySymbol({(k,): c for k, c in coeffs.items()}, 1, mode)


def test_strength_sq_examples():
    P = P1({2: 1, 0: 1}, EXACT)
    s2 = H.strength_sq(P)
    assert s2((0,)) == 5
    # (xi^2+1)^2 + 4 xi^2 + 4
    assert s2 == P1({4: 1, 2: 6, 0: 5}, EXACT)
    assert H.strength_sq(P1({0: 3 + 4j}, EXACT)) == P1({0: 25}, EXACT)
    assert H.strength_sq(PolySymbol({(1, 0): 1}, 2, EXACT)) == PolySymbol({(2, 0): 1, (0, 0): 1}, 2, EXACT)


def test_strength_dominates_modulus():
    P = PolySymbol({(2, 0): 1, (0, 1): 2j, (1, 1): -3, (0, 0): 1}, 2)
    z = np.random.default_rng(0).normal(scale=10, size=(500, 2))
    assert np.all(H.strength(P, z) ** 2 >= np.abs(P.eval(z)) ** 2 * (1 - 1e-12))


def test_weaker_examples():
    P = P1({2: 1, 0: 1})
    assert H.weaker_check(P1({0: 1}), P)[0]
    assert H.weaker_check(P1({2: 1}), P)[0]
    assert H.weaker_check(P, P1({2: 1}))[0]
    assert not H.weaker_check(P1({4: 1}), P)[0]


def test_weaker_transitive():
    a, b, c = P1({1: 1}), P1({2: 1, 0: 1}), P1({3: 1})
    ok1, C1, _ = H.weaker_check(a, b)
    ok2, C2, _ = H.weaker_check(b, c)
    ok3, C3, _ = H.weaker_check(a, c)
    assert ok1 and ok2 and ok3
    assert C3 <= C1 * C2 * (1 + 1e-9)
    assert H.weaker_check(b, b)[0]


def test_rho_elliptic():
    rep = H.s_hypoelliptic_fit(P1({0: 1, 2: TWO_PI ** 2}))
    assert rep.passed and abs(rep.rho_hat - 1) <= 0.05


def test_rho_heat():
    heat = PolySymbol({(1, 0): 1j * TWO_PI, (0, 2): TWO_PI ** 2}, 2)
    rep = H.s_hypoelliptic_fit(heat)
    assert rep.passed and abs(rep.rho_hat - 0.5) <= 0.05
    assert rep.anisotropic


def test_non_hypoelliptic_fails():
    rep = H.s_hypoelliptic_fit(PolySymbol({(1, 0): 1}, 2))
    assert not rep.passed


def test_scale_invariance():
    P = PolySymbol({(1, 0): 1j, (0, 2): 1, (0, 0): 1}, 2)
    r1 = H.s_hypoelliptic_fit(P, sampler=HypoSampler(angular=90))
    r2 = H.s_hypoelliptic_fit(PolySymbol({a: 7.5 * c for a, c in P.coeffs.items()}, 2), sampler=HypoSampler(angular=90))
    assert r1.rho_hat == pytest.approx(r2.rho_hat, abs=1e-9)


def test_strength_ratio_bounded_beyond_C():
    P = P1({0: 1, 2: TWO_PI ** 2})
    z = np.logspace(1, 4, 50)[:, None]
    ratio = H.strength(P, z) / np.abs(P.eval(z))
    assert ratio.max() < 2


def test_constant_strength_examples():
    P = P1({2: 1, 0: 1})
    one = TrigPoly.constant(1)
    rep = H.constant_strength_check([one], [P])
    assert rep["pass"] and rep["eps_hat"] == pytest.approx(1.0, abs=1e-6)
    c = ex(0, 2) + ex(1, 0.5) + ex(-1, 0.5)
    rep = H.constant_strength_check([c], [P])
    assert rep["pass"] and rep["eps_hat"] == pytest.approx(1.0, abs=1e-3)
    cos = ex(1, 0.5) + ex(-1, 0.5)
    assert not H.constant_strength_check([cos], [P])["pass"]


def test_aphs_examples():
    hp = HypoellParams(m=2, m0=2)
    a0 = S.poly_symbol({(0,): 1, (2,): TWO_PI ** 2}, 1)
    assert H.aphs_check(a0, hp).passed
    a1 = S.poly_symbol({(0,): ex(0) + ex(1, 0.5), (2,): TWO_PI ** 2}, 1)
    rep = H.aphs_check(a1, hp)
    assert rep.passed and rep.C1_hat > 0


def test_params_validation():
    with pytest.raises(ValueError):
        HypoellParams(m=1, m0=2)
    with pytest.raises(ValueError):
        HypoellParams(m=2, m0=2, rho=0.5, s=1.5)


def test_poly_json_round_trip():
    P = PolySymbol({(1, 0): 1j, (0, 2): 2.5}, 2)
    Q = PolySymbol.from_json(P.to_json())
    assert Q.to_json() == P.to_json()
