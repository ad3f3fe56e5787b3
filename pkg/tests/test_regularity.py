import math

import numpy as np
import pytest

from apcalc import regularity as R
from apcalc.regularity import CoeffData, FitError
from apcalc.trigpoly import TrigPoly

K = np.arange(1, 201)


def test_fit_exponential_decay():
    fit = R.gevrey_fit(CoeffData.from_profile(lambda k: np.exp(-3 * k), K[:60]))
    assert not fit.non_gevrey
    assert fit.s_hat == pytest.approx(1.0, abs=1e-9)
    assert fit.eps_hat == pytest.approx(3.0, rel=1e-9)


def test_fit_root_decay():
    fit = R.gevrey_fit(CoeffData.from_profile(lambda k: np.exp(-2 * np.abs(k) ** 0.5), K))
    assert 1.95 <= fit.s_hat <= 2.05 and 1.9 <= fit.eps_hat <= 2.1


def test_fit_polynomial_decay_flagged():
    assert R.gevrey_fit(CoeffData.from_profile(lambda k: k ** -2.0, K)).non_gevrey


def test_fit_needs_points():
    with pytest.raises(FitError):
        R.gevrey_fit(CoeffData.from_profile(lambda k: np.exp(-k), [1, 2, 3]))


def test_fit_from_trigpoly_two_sided():
    f = sum((TrigPoly.exp(k, math.exp(-1.5 * abs(k))) for k in range(-40, 41) if k), TrigPoly.constant(1))
    fit = R.gevrey_fit(CoeffData.from_trigpoly(f))
    assert fit.s_hat == pytest.approx(1.0, abs=1e-9) and fit.eps_hat == pytest.approx(1.5, rel=1e-9)


def test_coeffdata_validation():
    with pytest.raises(ValueError):
        CoeffData([1, 1], [0.1, 0.2])
    with pytest.raises(ValueError):
        CoeffData([1, 2], [0.1])


def test_membership_monotone_in_eps():
    data = CoeffData.from_profile(lambda k: np.exp(-2 * k ** 0.5), K)
    eps = [-2.5, -1.9, -0.5, 0.5, 1.0, 1.5]
    rep = R.membership_report(data, 2.0, eps)
    norms = [row["norm"] for row in rep["rows"]]
    assert all(a >= b for a, b in zip(norms, norms[1:]))
    finite = {row["eps"]: row["finite"] for row in rep["rows"]}
    assert finite[-1.9] and not finite[-2.5]
    assert rep["consistent_W_s0"] and rep["consistent_W_s0_minus"]
    for row in rep["rows"]:
        assert np.all(np.diff(row["partial"]) >= 0)


def test_membership_sup_norm():
    data = CoeffData.from_profile(lambda k: np.exp(-k), K[:30])
    rep = R.membership_report(data, 1.0, [0.5], p=math.inf)
    assert rep["rows"][0]["norm"] == pytest.approx(math.exp(-1.5))


def test_envelope_bounds_coefficients():
    # coefficients bounded by the fitted envelope up to the fit residual
    data = CoeffData.from_profile(lambda k: np.exp(-2 * k ** 0.5) * (1 + 0.1 * np.cos(k)), K)
    fit = R.gevrey_fit(data)
    ratio = data.magnitude / fit.bound(data.radius)
    assert ratio.max() <= math.exp(3 * fit.rms_residual)


def test_predicted_eps_consistent_with_derivative_bound():
    assert R.predicted_eps(1, 2 * math.pi) == pytest.approx(1 / math.e)
    assert R.predicted_eps(2, 1.0) > R.predicted_eps(2, 2.0)
    assert R.predicted_eps(1, 1.0, d=4) == pytest.approx(R.predicted_eps(1, 2.0))


def test_lattice_sum():
    rep = R.frequency_condition_check(R.integer_lattice(1), 1.0, [1.0], R_max=50)
    res = rep["results"][0]
    assert res["verdict"] == "CONVERGENT"
    assert abs(res["partial_sums"][-1] - (1 + 2 / (math.e - 1))) < 1e-9


def test_lattice_two_dimensional():
    rep = R.frequency_condition_check(R.integer_lattice(2), 1.0, [2.0], R_max=40)
    assert rep["all_convergent"]
    # the axis alone already contributes the 1-d sum
    one_d = 1 + 2 / (math.exp(2) - 1)
    assert rep["results"][0]["partial_sums"][-1] >= one_d


def test_bounded_set_divergent():
    rep = R.frequency_condition_check(R.bounded_example(), 1.0, [1.0])
    assert rep["results"][0]["verdict"] == "DIVERGENT"
    assert not rep["all_convergent"]


def test_csv_loader(tmp_path):
    p = tmp_path / "c.csv"
    rows = "\n".join(f"{k},{math.exp(-k)}" for k in range(1, 21))
    p.write_text("xi,magnitude\n" + rows + "\n")
    fit = R.gevrey_fit(CoeffData.from_csv(p))
    assert fit.eps_hat == pytest.approx(1.0, rel=1e-9)
