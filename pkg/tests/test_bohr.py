import math

import numpy as np
import pytest

from apcalc import bohr
from apcalc.bohr import MeanSchedule, numerical_bohr_coeff, numerical_mean
from apcalc.counterexample import partial_sum, partial_sum_mean
from apcalc.trigpoly import Basis, TrigPoly

from conftest import random_trigpoly


def test_constant_mean():
    est, ind = numerical_mean(lambda x: np.ones(np.shape(x)[0]))
    assert abs(est - 1) < 1e-12 and ind < 1e-12


def test_cos_squared():
    sched = MeanSchedule((10, 20, 40))
    est, _ = numerical_mean(lambda x: np.cos(2 * np.pi * x) ** 2, sched)
    assert abs(est - 0.5) < 1e-6


def test_incommensurate_sum():
    fn = lambda x: np.exp(2j * np.pi * x) + np.exp(2j * np.pi * math.sqrt(2) * x)  # noqa: E731
    est, _ = numerical_mean(fn, MeanSchedule((25, 50, 100)))
    assert abs(est) < 1e-3


def test_bohr_coeff_examples():
    e1 = lambda x: np.exp(2j * np.pi * x)  # noqa: E731
    est, _ = numerical_bohr_coeff(e1, 1.0)
    assert abs(est - 1) < 1e-6
    est, _ = numerical_bohr_coeff(e1, math.sqrt(2), MeanSchedule((25, 50, 100)))
    assert abs(est) < 1e-3


def test_partial_sum_mean_matches_block_formula():
    fn = partial_sum(2, 2)
    est, ind = numerical_mean(fn, MeanSchedule((25, 50, 100), 64))
    assert abs(est - partial_sum_mean(2, 2)) <= max(ind, 1e-5)


def test_consistency_with_exact_coefficients(rng):
    for _ in range(3):
        f = random_trigpoly(rng, mode="float")
        for xi in f.frequencies[:2]:
            est, ind = numerical_bohr_coeff(f.evaluate, [float(xi[0])])
            assert abs(est - f.bohr_coeff(xi)) <= max(ind, 1e-8)


def test_indicator_shrinks_with_T():
    B = Basis(("1", "sqrt(2)"))
    f = TrigPoly.exp((1, 0), basis=B) + TrigPoly.exp((0, 1), basis=B)
    _, ind_small = numerical_mean(f.evaluate, MeanSchedule((5, 10, 20), extrapolation="none"))
    _, ind_big = numerical_mean(f.evaluate, MeanSchedule((50, 100, 200), extrapolation="none"))
    assert ind_big < ind_small


def test_linearity():
    f = lambda x: np.cos(2 * np.pi * math.sqrt(3) * x) + 0.5  # noqa: E731
    g = lambda x: np.sin(2 * np.pi * x) ** 2  # noqa: E731
    (mf, i1), (mg, i2) = numerical_mean(f), numerical_mean(g)
    mh, i3 = numerical_mean(lambda x: 2 * f(x) - 3 * g(x))
    assert abs(mh - (2 * mf - 3 * mg)) <= 2 * i1 + 3 * i2 + i3 + 1e-12


def test_two_dimensional():
    fn = lambda x: 1 + np.cos(2 * np.pi * (x[:, 0] + math.sqrt(2) * x[:, 1]))  # noqa: E731
    est, _ = numerical_mean(fn, MeanSchedule((10, 20, 40), 16), dim=2)
    assert abs(est - 1) < 1e-3


def test_schedule_validation():
    with pytest.raises(ValueError):
        MeanSchedule((10, 5))
    with pytest.raises(ValueError):
        MeanSchedule(points_per_axis=4)
    with pytest.raises(ValueError):
        numerical_mean(lambda x: x[:, 0], dim=4)


def test_sampled_mean(tmp_path):
    x = np.linspace(0, 10, 2001)
    path = tmp_path / "s.csv"
    with open(path, "w") as fh:
        fh.write("x1,re,im\n")
        for v in x:
            fh.write(f"{v},{math.cos(2 * math.pi * v) ** 2},0\n")
    sig = bohr.load_samples_csv(path)
    assert abs(bohr.sampled_mean(sig) - 0.5) < 1e-6
