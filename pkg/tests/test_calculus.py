import math
import random
from fractions import Fraction

import numpy as np
import pytest

from apcalc import calculus as K
from apcalc import symexpr as S
from apcalc.hypoell import HypoellParams
from apcalc.scalars import EXACT, FLOAT, convert, pi, two_pi_i
from apcalc.symexpr import ClassParams, Sampler
from apcalc.trigpoly import TrigPoly

ex = TrigPoly.exp


def xi(mode=EXACT):
    return S.xi_var(0, 1, mode=mode)


def e1(mode=EXACT):
    return S.trig(ex(1, mode=mode))


def test_product_modulation():
    c = [K.symbol_product_term(xi(), e1(), j) for j in range(4)]
    assert c[0] == xi() * e1()
    assert c[1] == e1()
    assert c[2].is_zero() and c[3].is_zero()


def test_product_x_independent():
    a, b = xi() * xi() + 1, S.bracket(2, 1, mode=EXACT) * xi()
    assert K.symbol_product_term(a, b, 0) == a * b
    assert all(K.symbol_product_term(a, b, j).is_zero() for j in (1, 2))
    assert K.symbol_product_term(xi(), xi(), 0) == xi() * xi()
    assert K.symbol_product_term(xi(), xi(), 1).is_zero()


def test_amplitude_reduce_examples():
    b = e1() * xi()
    amp = b.as_amplitude("x")
    assert K.amplitude_reduce(amp, 0) == b
    assert K.amplitude_reduce(amp, 1).is_zero()
    a = S.trig_y(ex(1, mode=EXACT)) * S.xi_var(0, 1, nvars=3, mode=EXACT)
    assert K.amplitude_reduce(a, 0) == e1() * xi()
    assert K.amplitude_reduce(a, 1) == e1()
    assert K.amplitude_reduce(a, 2).is_zero()


def test_adjoint_amplitude_reduces_to_conjugate():
    from apcalc.operators import adjoint_amplitude
    adj = adjoint_amplitude(e1())
    assert K.amplitude_reduce(adj, 0) == S.trig(ex(-1, mode=EXACT))


def test_transpose_examples():
    b = xi() * xi() * xi() + xi()
    assert K.transpose_expansion(b, 0) == b.neg_xi()
    assert K.transpose_expansion(b, 1).is_zero()
    assert K.transpose_expansion(e1(), 0) == e1()
    assert K.transpose_expansion(e1(), 1).is_zero()
    assert K.transpose_expansion(e1() * xi(), 1) == -e1()


def test_double_transpose():
    rng = random.Random(3)
    for _ in range(5):
        coeffs = {(k,): ex(rng.randint(-2, 2), rng.randint(1, 3), mode=EXACT) for k in range(3)}
        b = S.poly_symbol(coeffs, 1, mode=EXACT)
        assert K.transpose_symbol(K.transpose_symbol(b, 2), 2) == b


def test_parametrix_constant_coefficients():
    c = convert(4, EXACT) * pi(EXACT) * pi(EXACT)
    a = S.poly_symbol({(0,): 1, (2,): c}, 1, mode=EXACT)
    b = K.parametrix(a, N=3)
    assert b[0] == 1 / a
    assert all(b[n].is_zero() for n in (1, 2, 3))
    for N in range(3):
        total = sum((K.symbol_product_term(b, a, j) for j in range(1, N + 1)), K.symbol_product_term(b, a, 0))
        assert (total - 1).is_zero()


def test_parametrix_first_correction():
    eps = Fraction(1, 100)
    c = convert(4, EXACT) * pi(EXACT) * pi(EXACT)
    a = S.poly_symbol({(0,): ex(0, mode=EXACT) + ex(1, eps, mode=EXACT), (2,): c}, 1, mode=EXACT)
    b = K.parametrix(a, N=1)
    b0 = 1 / a
    expect = -(b0 * b0.dxi(0) * a.dx(0)).scale(1 / two_pi_i(EXACT))
    gen = np.random.default_rng(0)
    x, z = gen.uniform(0, 1, (40, 1)), gen.uniform(-20, 20, (40, 1))
    assert np.allclose(b[1].eval(x, z), expect.eval(x, z), rtol=1e-12, atol=0)


def test_parametrix_composition_identity_exact():
    # sum_{j <= N} (b o a)_j - 1 only carries terms of order below -N
    a = S.poly_symbol({(0,): ex(0, mode=EXACT) + ex(1, Fraction(1, 2), mode=EXACT), (2,): 1}, 1, mode=EXACT)
    b = K.parametrix(a, N=2)
    r_stable = K.parametrix_residual(a, b)
    r_full = K.parametrix_residual_full(a, b)
    gen = np.random.default_rng(1)
    x, z = gen.uniform(0, 1, (30, 1)), gen.uniform(1, 6, (30, 1))
    assert np.allclose(r_stable.eval(x, z), r_full.eval(x, z), rtol=1e-9, atol=1e-12)


def test_parametrix_order_guard():
    with pytest.raises(ValueError):
        K.parametrix(xi(FLOAT) * xi(FLOAT) + 1, N=6)


def test_residual_decay_slope():
    a = S.bracket(2, 1).scale(1)
    a = S.poly_symbol({(0,): ex(0) + ex(1, 0.5), (2,): 4 * math.pi ** 2}, 1)
    fit = K.residual_decay(a, 1)
    assert fit.slope <= -2 + 0.2


def _params():
    return ClassParams(m=2, rho=1, s=1, C=1, B=1)


def test_equivalence_identical():
    a = S.bracket(2, 1) + e1(FLOAT) * xi(FLOAT)
    F = K.FormalSum([a], _params())
    rep = K.equivalence_check(F, F, 2)
    assert rep.passed and max(rep.C_of_N) == 0


def test_equivalence_absorbed_perturbation():
    a = S.bracket(2, 1)
    for N in (1, 2, 3):
        pert = S.bracket(2 - N, 1).scale(0.3)
        A = K.FormalSum([a], _params())
        B = K.FormalSum([a] + [a * 0] * (N - 1) + [pert], _params())
        assert K.equivalence_check(A, B, N).passed


def test_equivalence_order_m_difference_fails():
    a = S.bracket(2, 1)
    A = K.FormalSum([a], _params())
    B = K.FormalSum([a + S.bracket(2, 1).scale(0.5)], _params())
    rep = K.equivalence_check(A, B, 2)
    assert not rep.passed
    assert rep.witness is not None


def test_formal_sum_requires_delta_zero():
    with pytest.raises(ValueError):
        K.FormalSum([xi(FLOAT)], ClassParams(m=1, rho=1, delta=0.5, s=2))


def test_cutoff_support_and_range():
    cf = K.CutoffFamily()
    for j in range(4):
        L = cf.scale(j)
        r = np.linspace(0, 5 * L, 2001)
        v = cf(j, r[:, None])
        assert np.all((v >= 0) & (v <= 1))
        assert np.all(v[r < 2 * L] == 0)
        assert np.all(v[r > 3 * L] == 1)
        assert cf(j, np.array([[4 * cf.R * (j + 1) ** cf.s]]))[0] == 1


def test_cutoff_derivative_constants_bounded():
    cf = K.CutoffFamily()
    for order in (1, 2, 3):
        consts = [cf.derivative_constant(j, order) for j in range(6)]
        assert max(consts) == consts[0]
        assert all(np.isfinite(consts))


def test_sum_formal_examples():
    a0 = S.bracket(2, 1)
    F = K.FormalSum([a0, S.bracket(1, 1)])
    cf = K.CutoffFamily()
    single = K.sum_formal(K.FormalSum([a0]), cf)
    z = 3 * cf.R + 1
    assert single.eval(0.3, z) == pytest.approx(1 + z * z)
    assert K.sum_formal(F, cf).eval(0.1, 2 * cf.R - 0.5) == 0
