import json
import math

import pytest

from apcalc import cli
from apcalc import symexpr as S
from apcalc.hypoell import PolySymbol
from apcalc.scalars import EXACT, convert, pi
from apcalc.trigpoly import TrigPoly


def _write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(json.dumps(obj))
    return str(p)


def _run(capsys, argv):
    code = cli.main(argv)
    out, err = capsys.readouterr()
    return code, (json.loads(out) if out.strip() else None), (json.loads(err) if err.strip() else None)


@pytest.fixture
def elliptic_exact(tmp_path):
    c = convert(4, EXACT) * pi(EXACT) * pi(EXACT)
    return _write(tmp_path, "a.json", S.poly_symbol({(0,): 1, (2,): c}, 1, mode=EXACT).to_json())


def test_solve_exact_zero_residual(tmp_path, capsys, elliptic_exact):
    f = _write(tmp_path, "f.json", (TrigPoly.exp(5, mode=EXACT) + TrigPoly.exp(-2, 3, mode=EXACT)).to_json())
    code, rep, _ = _run(capsys, ["solve", "--symbol", elliptic_exact, "--input", f, "--N", "0", "--mode", "exact"])
    assert code == cli.EXIT_PASS
    assert rep["result"]["route"] == "exact"
    assert rep["result"]["residual"]["exact_zero"]
    assert rep["schema_version"] == cli.SCHEMA_VERSION


def test_solve_refuses_non_hypoelliptic(tmp_path, capsys):
    a = _write(tmp_path, "a.json", S.xi_var(0, 2).to_json())
    f = _write(tmp_path, "f.json", TrigPoly.exp((1, 0)).to_json())
    code, rep, _ = _run(capsys, ["solve", "--symbol", a, "--input", f])
    assert code == cli.EXIT_FAIL and rep["result"]["refused"]


def test_compose_exact(tmp_path, capsys):
    a = _write(tmp_path, "a.json", (S.trig(TrigPoly.exp(1, mode=EXACT)) * S.xi_var(0, 1, mode=EXACT)).to_json())
    b = _write(tmp_path, "b.json", (S.xi_var(0, 1, mode=EXACT) * S.xi_var(0, 1, mode=EXACT)
                                    + S.trig(TrigPoly.exp(-2, 3, mode=EXACT))).to_json())
    f = _write(tmp_path, "f.json", (TrigPoly.exp(1, mode=EXACT) + TrigPoly.exp(4, 2, mode=EXACT)).to_json())
    code, rep, _ = _run(capsys, ["compose", "--a", a, "--b", b, "--input", f, "--mode", "exact"])
    assert code == cli.EXIT_PASS and rep["result"]["exact_zero"]


def test_schema_error_pointer(tmp_path, capsys):
    bad = _write(tmp_path, "f.json", {"dim": 1, "terms": [{"freq": [1], "re": "x"}]})
    a = _write(tmp_path, "a.json", S.xi_var(0, 1).to_json())
    code, _, err = _run(capsys, ["apply", "--symbol", a, "--input", bad])
    assert code == cli.EXIT_INPUT
    assert err["pointer"] == "/terms/0/re"


def test_nested_symbol_pointer(tmp_path, capsys):
    bad = _write(tmp_path, "a.json", {"dim": 1, "expr": {"op": "add", "args": [{"xi_mono": {"alpha": [-1]}}]}})
    f = _write(tmp_path, "f.json", TrigPoly.exp(1).to_json())
    code, _, err = _run(capsys, ["apply", "--symbol", bad, "--input", f])
    assert code == cli.EXIT_INPUT
    assert err["pointer"] == "/expr/args/0/xi_mono/alpha/0"


def test_missing_file_and_dimension_mismatch(tmp_path, capsys):
    f = _write(tmp_path, "f.json", TrigPoly.exp((1, 2)).to_json())
    a = _write(tmp_path, "a.json", S.xi_var(0, 1).to_json())
    code, _, err = _run(capsys, ["apply", "--symbol", str(tmp_path / "nope.json"), "--input", f])
    assert code == cli.EXIT_INPUT and "not found" in err["error"]
    code, _, err = _run(capsys, ["apply", "--symbol", a, "--input", f])
    assert code == cli.EXIT_INPUT and err["pointer"] == "/dim"


def test_output_deterministic(tmp_path, capsys):
    P = _write(tmp_path, "p.json", PolySymbol({(1, 0): 2j * math.pi, (0, 2): 4 * math.pi ** 2}, 2).to_json())
    reports = []
    for k in range(2):
        out = tmp_path / f"out{k}"
        code, _, _ = _run(capsys, ["hypo", "fit", "--poly", P, "--seed", "3", "--out", str(out)])
        assert code == cli.EXIT_PASS
        reports.append((out / "hypo-fit.json").read_text())
    assert reports[0] == reports[1]
    assert json.loads(reports[0])["result"]["rho_hat"] == pytest.approx(0.5, abs=0.05)


def test_hypo_weaker_and_strength(tmp_path, capsys):
    P = _write(tmp_path, "p.json", PolySymbol({(2,): 1, (0,): 1}, 1).to_json())
    Q = _write(tmp_path, "q.json", PolySymbol({(4,): 1}, 1).to_json())
    assert _run(capsys, ["hypo", "weaker", "--Q", Q, "--P", P])[0] == cli.EXIT_FAIL
    assert _run(capsys, ["hypo", "weaker", "--Q", P, "--P", Q])[0] == cli.EXIT_PASS
    code, rep, _ = _run(capsys, ["hypo", "strength", "--poly", P, "--xi", "0;1"])
    assert code == cli.EXIT_PASS and rep["result"]["values"][0] == pytest.approx(math.sqrt(5))


def test_gevrey_fit_csv(tmp_path, capsys):
    p = tmp_path / "c.csv"
    p.write_text("k,magnitude\n" + "".join(f"{k},{math.exp(-2 * math.sqrt(k))}\n" for k in range(1, 201)))
    code, rep, _ = _run(capsys, ["gevrey-fit", "--csv", str(p), "--out", str(tmp_path / "o")])
    assert code == cli.EXIT_PASS
    assert rep["result"]["s_hat"] == pytest.approx(2, abs=0.05)
    assert (tmp_path / "o" / "gevrey_rms.csv").exists()
    p.write_text("k,magnitude\n" + "".join(f"{k},{k ** -2.0}\n" for k in range(1, 201)))
    code, rep, _ = _run(capsys, ["gevrey-fit", "--csv", str(p)])
    assert code == cli.EXIT_FAIL and rep["result"]["verdict"] == "NON-GEVREY"


def test_freq_check(capsys):
    code, rep, _ = _run(capsys, ["freq-check", "--lattice", "1"])
    assert code == cli.EXIT_PASS
    assert abs(rep["result"]["results"][0]["partial_sums"][-1] - (1 + 2 / (math.e - 1))) < 1e-9
    assert _run(capsys, ["freq-check", "--bounded"])[0] == cli.EXIT_FAIL


def test_counterexample(tmp_path, capsys):
    code, rep, _ = _run(capsys, ["counterexample", "--out", str(tmp_path)])
    assert code == cli.EXIT_PASS and rep["result"]["slope"] >= 0.2
    rows = (tmp_path / "counterexample.csv").read_text().strip().splitlines()
    assert rows[0].startswith("n,M_n") and len(rows) == 4


def test_mean_parseval(tmp_path, capsys):
    from apcalc.trigpoly import Basis
    B = Basis(("1", "sqrt(2)"))
    f = TrigPoly.exp((1, 0), 1, basis=B) + TrigPoly.exp((0, 1), 0.5, basis=B) + TrigPoly.exp((1, 1), 2, basis=B)
    path = _write(tmp_path, "f.json", f.to_json())
    code, rep, _ = _run(capsys, ["mean", "--input", path, "--square", "--T", "25,50,100"])
    assert code == cli.EXIT_PASS and rep["result"]["abs_error"] < 1e-3


def test_verify_exit_codes(tmp_path, capsys):
    a = _write(tmp_path, "a.json", S.xi_var(0, 1).to_json())
    assert _run(capsys, ["verify", "--symbol", a, "--m", "0", "--C", "10"])[0] == cli.EXIT_FAIL
    b = _write(tmp_path, "b.json", S.bracket(2, 1).to_json())
    assert _run(capsys, ["verify", "--symbol", b, "--m", "2", "--fitted"])[0] == cli.EXIT_PASS


def test_bad_class_params_is_input_error(tmp_path, capsys):
    a = _write(tmp_path, "a.json", S.bracket(2, 1).to_json())
    code, _, err = _run(capsys, ["verify", "--symbol", a, "--m", "2", "--rho", "0.5", "--s", "1"])
    assert code == cli.EXIT_INPUT and err["error"]
