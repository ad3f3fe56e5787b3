import math
import random
from fractions import Fraction

import numpy as np
import pytest

from apcalc import operators as O
from apcalc import symexpr as S
from apcalc import trigpoly as T
from apcalc.scalars import EXACT, FLOAT, convert
from apcalc.symexpr import DomainError
from apcalc.trigpoly import NormParams, TrigPoly

from conftest import random_trigpoly

ex = TrigPoly.exp


def _xi(mode=EXACT, d=1, i=0):
    return S.xi_var(i, d, mode=mode)


def test_multiplier_example():
    for eta in (1, Fraction(5, 2), -3):
        out = O.apply_symbol(_xi(), ex(eta, mode=EXACT)).collapse()
        assert out == ex(eta, convert(eta, EXACT), mode=EXACT)
    sq = _xi() * _xi()
    f = ex(1, mode=EXACT) + ex(3, 2, mode=EXACT)
    assert O.apply_symbol(sq, f).collapse() == ex(1, mode=EXACT) + ex(3, 18, mode=EXACT)


def test_modulation_example():
    a = S.trig(ex(1, mode=EXACT))
    assert O.apply_symbol(a, ex(Fraction(1, 2), mode=EXACT)).collapse() == ex(Fraction(3, 2), mode=EXACT)


def test_amplitude_examples():
    f = ex(2, mode=EXACT)
    a = S.trig_y(ex(1, mode=EXACT)) * S.xi_var(0, 1, nvars=3, mode=EXACT)
    assert O.apply_amplitude(a, f).collapse() == ex(3, 3, mode=EXACT)
    b = S.trig(ex(1, mode=EXACT)) * _xi()
    assert O.apply_amplitude(b.as_amplitude("x"), f).collapse() == O.apply_symbol(b, f).collapse()
    adj = O.adjoint_amplitude(S.trig(ex(1, mode=EXACT)))
    assert O.apply_amplitude(adj, f).collapse() == ex(1, mode=EXACT)


def test_compose_direct_examples():
    f = ex(2, mode=EXACT)
    assert O.compose_direct(_xi(), S.trig(ex(1, mode=EXACT)), f).collapse() == ex(3, 3, mode=EXACT)
    one = S.const(1, 1, mode=EXACT)
    assert O.compose_direct(one, one, f).collapse() == f
    assert O.compose_direct(_xi(), _xi(), f).collapse() == ex(2, 4, mode=EXACT)


def test_linearity(rng):
    a = S.poly_symbol({(0,): ex(1, mode=EXACT), (2,): ex(-1, 2, mode=EXACT)}, 1, mode=EXACT)
    for _ in range(5):
        f, g = random_trigpoly(rng), random_trigpoly(rng)
        lhs = O.apply_symbol(a, f + g).collapse()
        rhs = O.apply_symbol(a, f).collapse() + O.apply_symbol(a, g).collapse()
        assert lhs == rhs


def test_multiplier_consistency(rng):
    a = S.bracket(2, 1, mode=EXACT) + _xi() * _xi() * _xi()
    for _ in range(5):
        f = random_trigpoly(rng)
        g = O.apply_symbol(a, f).collapse()
        for eta in f.frequencies:
            val = 1 + eta[0] ** 2 + eta[0] ** 3
            assert T.bohr_coeff(g, eta) == convert(val, EXACT) * T.bohr_coeff(f, eta)


def test_formal_adjoint_exact(rng):
    a = S.poly_symbol({(0,): ex(1, 1 + 2j, mode=EXACT) + ex(0, 3, mode=EXACT),
                       (1,): ex(-2, Fraction(1, 2), mode=EXACT)}, 1, mode=EXACT)
    adj = O.adjoint_amplitude(a)
    for _ in range(5):
        f, g = random_trigpoly(rng), random_trigpoly(rng)
        lhs = T.besicovitch_inner(O.apply_symbol(a, f).collapse(), g)
        rhs = T.besicovitch_inner(f, O.apply_amplitude(adj, g).collapse())
        assert lhs == rhs


def test_validity_radius_and_low_extension():
    a = 1 / _xi(FLOAT)
    f = ex(0) + ex(3)
    with pytest.raises(DomainError):
        O.apply_symbol(a, f, A=2.0)
    out = O.apply_symbol(a, f, A=2.0, low=S.const(0, 1)).collapse()
    assert out == ex(3, 1 / 3)
    with pytest.raises(DomainError, match="frequency"):
        O.apply_symbol(a, f)


def test_non_collapsible_output_evaluates():
    a = S.trig(ex(1)) / (S.const(3, 1) + S.trig(ex(1)) + S.trig(ex(-1)))
    f = ex(2)
    g = O.apply_symbol(a, f)
    assert not g.collapsible
    x = np.linspace(0, 1, 7)[:, None]
    expect = np.exp(2j * np.pi * x[:, 0]) / (3 + 2 * np.cos(2 * np.pi * x[:, 0])) * np.exp(4j * np.pi * x[:, 0])
    assert np.allclose(g(x), expect)
    coeffs = g.coefficients(64)
    assert np.allclose(coeffs.evaluate(x), expect, atol=1e-12)


def test_residual_norms_examples():
    f = ex(1, mode=EXACT) + ex(2, 3, mode=EXACT)
    norms = [NormParams(p=2, t=1), NormParams(p=1, s=2, eps=0.5)]
    rep = O.residual_norms(f, f, norms)
    assert rep.exact_zero and all(v == 0 for v in rep.norms.values())
    delta = 1e-3
    rep = O.residual_norms(f.to_mode(FLOAT) + ex(4, delta), f.to_mode(FLOAT), norms)
    assert rep.norms[norms[1].label()] == pytest.approx(delta * math.exp(-0.5 * 2.0))


def test_dimension_mismatch():
    with pytest.raises(T.DimensionError):
        O.apply_symbol(_xi(FLOAT), ex((1, 2)))
