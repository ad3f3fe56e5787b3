"""Command-line entry point.

Every command prints a JSON report (``schema_version`` plus the workspace
settings) and, with ``--out DIR``, also writes it to ``DIR/<command>.json``
together with CSV tables where a command produces one.

Exit codes: 0 pass, 2 check failed, 3 input error.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import jsonschema
import numpy as np

from . import bohr, calculus, counterexample, hypoell, operators, regularity, symexpr
from .scalars import EXACT, FLOAT, ExactScalar
from .symexpr import DomainError, NotCollapsible
from .trigpoly import ExactModeError, NormParams, TrigPoly

SCHEMA_VERSION = "1.0"
EXIT_PASS, EXIT_FAIL, EXIT_INPUT = 0, 2, 3


class InputError(Exception):
    def __init__(self, message: str, pointer: str = "", path: str | None = None):
        super().__init__(message)
        self.pointer = pointer
        self.path = path


# ---------------------------------------------------------------------------
# schemas

_NUM = {"type": "number"}
_FREQ_ITEM = {"anyOf": [{"type": "string"}, {"type": "integer"},
                        {"type": "array", "minItems": 2, "maxItems": 2,
                         "items": {"type": ["string", "integer"]}}]}
TRIGPOLY_SCHEMA = {
    "type": "object",
    "required": ["dim", "terms"],
    "properties": {
        "dim": {"type": "integer", "minimum": 1},
        "basis": {"type": "array", "items": {"type": "string"}, "minItems": 1},
        "mode": {"enum": [EXACT, FLOAT]},
        "terms": {"type": "array", "items": {
            "type": "object", "required": ["freq"],
            "properties": {"freq": {"type": "array", "items": _FREQ_ITEM}, "re": _NUM, "im": _NUM}}},
    },
}
POLY_SCHEMA = {
    "type": "object",
    "required": ["monomials"],
    "properties": {
        "dim": {"type": "integer", "minimum": 1},
        "mode": {"enum": [EXACT, FLOAT]},
        "monomials": {"type": "array", "minItems": 1, "items": {
            "type": "object", "required": ["alpha"],
            "properties": {"alpha": {"type": "array", "items": {"type": "integer", "minimum": 0}},
                           "re": _NUM, "im": _NUM}}},
    },
}
_LEAVES = ["op", "trigpoly", "trigpoly_x", "trigpoly_y", "trigpoly_xy", "xi_mono", "bracket", "const"]
NODE_SCHEMA = {
    "type": "object",
    "anyOf": [{"required": [k]} for k in _LEAVES],
    "properties": {
        "op": {"enum": ["add", "mul", "sub", "neg", "div", "pow"]},
        "args": {"type": "array", "items": {"$ref": "#/$defs/node"}},
        "n": {"type": "integer"},
        "trigpoly": TRIGPOLY_SCHEMA, "trigpoly_x": TRIGPOLY_SCHEMA,
        "trigpoly_y": TRIGPOLY_SCHEMA, "trigpoly_xy": TRIGPOLY_SCHEMA,
        "xi_mono": {"type": "object", "required": ["alpha"],
                    "properties": {"alpha": {"type": "array", "items": {"type": "integer", "minimum": 0}}}},
        "bracket": {"type": "object", "required": ["m"]},
    },
}
SYMBOL_SCHEMA = {
    "$defs": {"node": NODE_SCHEMA},
    "anyOf": [
        {"type": "object", "required": ["dim", "expr"],
         "properties": {"dim": {"type": "integer", "minimum": 1}, "expr": {"$ref": "#/$defs/node"}}},
        {"$ref": "#/$defs/node"},
    ],
}


def _pointer(err: jsonschema.ValidationError) -> str:
    return "/" + "/".join(str(p) for p in err.absolute_path)


def validate(data, schema, path=None):
    errors = list(jsonschema.Draft202012Validator(schema).iter_errors(data))
    if errors:
        err = jsonschema.exceptions.best_match(errors)
        # descend into anyOf branches for the most specific location
        while err.context:
            err = max(err.context, key=lambda e: len(e.absolute_path))
        raise InputError(f"schema error: {err.message}", _pointer(err), path)


def _read_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except FileNotFoundError as exc:
        raise InputError(f"file not found: {path}", "", path) from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid JSON: {exc.msg} (line {exc.lineno})", "", path) from exc


# ---------------------------------------------------------------------------
# workspace


@dataclass
class Workspace:
    dim: int | None
    mode: str | None
    seed: int
    out: Path | None
    basis: tuple | None = None
    tables: dict = field(default_factory=dict)

    def adopt(self, dim: int, basis: tuple, what: str):
        if self.dim is None:
            self.dim = dim
        elif dim != self.dim:
            raise InputError(f"{what} has dimension {dim}, workspace has {self.dim}", "/dim")
        if self.basis is None:
            self.basis = basis
        elif basis != self.basis and len(basis) > 1 and len(self.basis) > 1:
            raise InputError(f"{what} uses basis {list(basis)}, workspace has {list(self.basis)}", "/basis")

    def trigpoly(self, path) -> TrigPoly:
        data = _read_json(path)
        if isinstance(data, dict) and data.get("kind") == "trigpoly":
            data = data["trigpoly"]
        validate(data, TRIGPOLY_SCHEMA, path)
        try:
            f = TrigPoly.from_json(data, self.mode)
        except (ValueError, KeyError, ZeroDivisionError) as exc:
            raise InputError(str(exc), "/terms", path) from exc
        self.adopt(f.dim, f.basis.names, "input")
        return f

    def symbol(self, path) -> symexpr.SymbolExpr:
        data = _read_json(path)
        validate(data, SYMBOL_SCHEMA, path)
        try:
            a = symexpr.from_json(data, self.mode)
        except (ValueError, KeyError, ZeroDivisionError, TypeError) as exc:
            raise InputError(str(exc), "/expr" if "expr" in data else "", path) from exc
        self.adopt(a.d, a.basis.names, "symbol")
        return a

    def poly(self, path) -> hypoell.PolySymbol:
        data = _read_json(path)
        validate(data, POLY_SCHEMA, path)
        try:
            P = hypoell.PolySymbol.from_json(data, self.mode)
        except (ValueError, KeyError) as exc:
            raise InputError(str(exc), "/monomials", path) from exc
        self.adopt(P.d, ("1",), "polynomial")
        return P

    def header(self, command: str) -> dict:
        return {"schema_version": SCHEMA_VERSION, "command": command, "seed": self.seed,
                "mode": self.mode or FLOAT, "dim": self.dim}


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else str(v)
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": float(obj.real), "im": float(obj.imag)}
    if isinstance(obj, (Fraction, ExactScalar)):
        return str(obj)
    return obj


def _emit(ws: Workspace, command: str, result: dict, passed: bool) -> int:
    report = ws.header(command)
    report["pass"] = bool(passed)
    report["result"] = result
    report = _jsonable(report)
    text = json.dumps(report, indent=2, sort_keys=True)
    print(text)
    if ws.out is not None:
        ws.out.mkdir(parents=True, exist_ok=True)
        (ws.out / f"{command.replace(' ', '-')}.json").write_text(text + "\n")
        for name, (header, rows) in ws.tables.items():
            with open(ws.out / f"{name}.csv", "w", newline="") as fh:
                w = csv.writer(fh)
                w.writerow(header)
                w.writerows(rows)
    return EXIT_PASS if passed else EXIT_FAIL


def _floats(text: str) -> list:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise InputError(f"expected a comma-separated list of numbers, got {text!r}") from exc


def _points(text: str) -> np.ndarray:
    return np.array([_floats(p) for p in text.split(";") if p.strip()], dtype=float)


# ---------------------------------------------------------------------------
# commands


def cmd_apply(args, ws):
    a = ws.symbol(args.symbol)
    f = ws.trigpoly(args.input)
    g = operators.apply_symbol(a, f, A=args.A)
    return _emit(ws, "apply", {"output": g.to_json(), "collapsible": g.collapsible}, True)


def _expansion_sum(a, b, n):
    c = calculus.symbol_product_term(a, b, 0)
    for j in range(1, n + 1):
        c = c + calculus.symbol_product_term(a, b, j)
    return c


def cmd_compose(args, ws):
    a = ws.symbol(args.a)
    b = ws.symbol(args.b)
    f = ws.trigpoly(args.input)
    direct = operators.compose_direct(a, b, f)
    n = args.N if args.N is not None else (a.xi_degree() if a.is_polynomial() else 3)
    c = _expansion_sum(a, b, n)
    via = operators.apply_symbol(c, f)
    if direct.collapsible and via.collapsible:
        diff = direct.collapse() - via.collapse()
        exact = diff.mode == EXACT
        size = 0.0 if diff.is_zero() else float(np.max(np.abs(diff.coeff_vector())))
        ok = diff.is_zero() if exact else size <= args.tol
        result = {"direct": direct.to_json(), "expansion": via.to_json(), "terms_used": n,
                  "max_abs_difference": size, "exact_zero": bool(exact and diff.is_zero())}
    else:
        pts = np.random.default_rng(ws.seed).uniform(0, 1, size=(64, f.dim))
        size = float(np.max(np.abs(direct(pts) - via(pts))))
        ok = size <= args.tol
        result = {"terms_used": n, "max_abs_difference_sampled": size}
    return _emit(ws, "compose", result, ok)


def _hypo_params(args, a=None) -> hypoell.HypoellParams:
    m = args.m if args.m is not None else (float(a.xi_degree()) if a is not None and a.is_polynomial() else 0.0)
    m0 = args.m0 if args.m0 is not None else m
    try:
        return hypoell.HypoellParams(m=m, m0=m0, rho=args.rho, s=args.s, A=args.A,
                                     B=args.B, C=args.C, C1=args.C1)
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def cmd_parametrix(args, ws):
    a = ws.symbol(args.symbol)
    hp = _hypo_params(args, a)
    b = calculus.parametrix(a, hp, args.N)
    result = {"terms": [t.to_string() for t in b.terms], "A": b.A, "warnings": b.warnings}
    ok = True
    fits = []
    rows = []
    for n in range(1, args.N + 1):
        fit = calculus.residual_decay(a, n, hypo=hp)
        target = -hp.rho * (n + 1) + 0.2
        fits.append({**fit.to_json(), "target_slope": target, "pass": fit.slope <= target})
        ok &= fit.slope <= target
        rows += [[n, r, v] for r, v in zip(fit.radii, fit.sup_values)]
    result["residual_decay"] = fits
    if args.save_terms:
        result["term_json"] = [t.to_json() for t in b.terms]
    ws.tables["parametrix_residual"] = (["N", "radius", "sup_abs_residual"], rows)
    return _emit(ws, "parametrix", result, ok)


def _class_params(args) -> symexpr.ClassParams:
    try:
        return symexpr.ClassParams(m=args.m, rho=args.rho, s=args.s, C=args.C, B=args.B)
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def cmd_equiv(args, ws):
    params = _class_params(args)
    A = calculus.FormalSum([ws.symbol(p) for p in args.a], params)
    B = calculus.FormalSum([ws.symbol(p) for p in args.b], params)
    sampler = symexpr.Sampler(seed=ws.seed)
    rep = calculus.equivalence_check(A, B, args.N, sampler, params)
    return _emit(ws, "equiv", rep.to_json(), rep.passed)


def cmd_verify(args, ws):
    a = ws.symbol(args.symbol)
    rep = symexpr.verify_class(a, _class_params(args), args.max_order, symexpr.Sampler(seed=ws.seed))
    ok = rep.passed_fitted if args.fitted else rep.passed
    return _emit(ws, "verify", rep.to_json(), ok)


def _hsampler(ws):
    return hypoell.HypoSampler(seed=ws.seed)


def cmd_hypo(args, ws):
    sub = args.hypo_cmd
    if sub == "fit":
        P = ws.poly(args.poly)
        rep = hypoell.s_hypoelliptic_fit(P, sampler=_hsampler(ws))
        return _emit(ws, "hypo fit", rep.to_json(), rep.passed)
    if sub == "weaker":
        Q, P = ws.poly(args.Q), ws.poly(args.P)
        ok, C_hat, slope = hypoell.weaker_check(Q, P, _hsampler(ws))
        return _emit(ws, "hypo weaker", {"C_hat": C_hat, "top_decade_slope": slope}, ok)
    if sub == "strength":
        P = ws.poly(args.poly)
        pts = _points(args.xi)
        if pts.shape[1] != P.d:
            raise InputError(f"points must have {P.d} components")
        vals = hypoell.strength(P, pts)
        ws.tables["strength"] = ([f"xi_{i + 1}" for i in range(P.d)] + ["strength"],
                                 [list(p) + [float(v)] for p, v in zip(pts, vals)])
        return _emit(ws, "hypo strength", {"strength_sq": hypoell.strength_sq(P).to_json(),
                                           "points": pts, "values": vals}, True)
    if sub == "constant-strength":
        if len(args.coeff) != len(args.poly):
            raise InputError("give one --coeff per --poly")
        cs = [ws.trigpoly(p) for p in args.coeff]
        Ps = [ws.poly(p) for p in args.poly]
        rep = hypoell.constant_strength_check(cs, Ps, _hsampler(ws), A=args.A)
        return _emit(ws, "hypo constant-strength", rep, rep["pass"])
    if sub == "aphs":
        a = ws.symbol(args.symbol)
        rep = hypoell.aphs_check(a, _hypo_params(args, a), sampler=_hsampler(ws))
        return _emit(ws, "hypo aphs", rep.to_json(), rep.passed)
    raise InputError(f"unknown hypo command {sub}")


def cmd_gevrey_fit(args, ws):
    try:
        data = regularity.CoeffData.from_csv(args.csv)
    except (OSError, ValueError, IndexError) as exc:
        raise InputError(f"cannot read coefficient table: {exc}", "", args.csv) from exc
    grid = np.round(np.arange(args.s_min, args.s_max + 1e-9, args.s_step), 10)
    try:
        fit = regularity.gevrey_fit(data, grid)
    except regularity.FitError as exc:
        raise InputError(str(exc), "", args.csv) from exc
    result = fit.to_json()
    if args.C is not None:
        result["predicted_eps_from_C"] = regularity.predicted_eps(fit.s_hat, args.C, data.xi.shape[1])
    ws.tables["gevrey_rms"] = (["s", "rms"], sorted(fit.rms_by_s.items()))
    return _emit(ws, "gevrey-fit", result, not fit.non_gevrey)


def cmd_freq_check(args, ws):
    gen = regularity.bounded_example() if args.bounded else regularity.integer_lattice(args.lattice or ws.dim or 1)
    rep = regularity.frequency_condition_check(gen, args.s, _floats(args.eps), R_max=args.R_max, tol=args.tol)
    ws.tables["freq_check"] = (["eps", "radius", "partial_sum"],
                               [[r["eps"], R, S] for r in rep["results"] for R, S in zip(r["radii"], r["partial_sums"])])
    return _emit(ws, "freq-check", rep, rep["all_convergent"])


def cmd_counterexample(args, ws):
    est = counterexample.C0_estimate(args.s, args.j_max, args.grid)
    C = est.C0_lb if args.C == "auto" else float(args.C)
    n_list = [int(v) for v in _floats(args.n_list)]
    ws_, slope = counterexample.growth_slope(args.s, C, n_list, args.j_max, args.grid)
    rows = [[w.n, w.M_n, w.n ** 0.25, w.j_arg, w.hypothesis_holds] for w in ws_]
    ws.tables["counterexample"] = (["n", "M_n", "n_quarter", "j_arg", "hypothesis_holds"], rows)
    exceeds = all(w.M_n > w.n ** 0.25 for w in ws_ if w.hypothesis_holds)
    ok = exceeds and (len(n_list) < 2 or slope >= args.min_slope)
    result = {"C0": est.to_json(), "C": C, "C_is_C0_lb": args.C == "auto",
              "witnesses": [w.to_json() for w in ws_], "slope": slope,
              "min_slope": args.min_slope, "M_n_exceeds_n_quarter": exceeds}
    return _emit(ws, "counterexample", result, ok)


def cmd_mean(args, ws):
    sched = bohr.MeanSchedule(tuple(_floats(args.T)), args.points)
    if args.samples:
        sig = bohr.load_samples_csv(args.samples)
        xi = _floats(args.xi) if args.xi else None
        val = bohr.sampled_mean(sig, xi)
        return _emit(ws, "mean", {"estimate": val, "source": "samples"}, True)
    if args.partial_sum:
        fn = counterexample.partial_sum(args.s, args.partial_sum)
        exact = counterexample.partial_sum_mean(args.s, args.partial_sum)
        est, ind = bohr.numerical_mean(fn, sched, 1)
        err = abs(est - exact)
        return _emit(ws, "mean", {"estimate": est, "exact": exact, "abs_error": err, "error_indicator": ind},
                     err <= max(args.tol, ind))
    if not args.input:
        raise InputError("give --input, --samples or --partial-sum")
    f = ws.trigpoly(args.input)
    if args.square:
        fn = lambda x: np.abs(f.evaluate(x)) ** 2  # noqa: E731
        exact = float(np.sum(np.abs(f.coeff_vector()) ** 2))
    elif args.xi:
        xi = _floats(args.xi)
        fn = lambda x: f.evaluate(x) * np.exp(-2j * np.pi * (np.asarray(x).reshape(-1, f.dim) @ np.array(xi)))  # noqa: E731
        exact = complex(f.to_mode(FLOAT).bohr_coeff(tuple(Fraction(str(v)) for v in xi))) \
            if f.basis.is_rational else None
    else:
        fn = f.evaluate
        exact = complex(f.mean_value())
    est, ind = bohr.numerical_mean(fn, sched, f.dim)
    result = {"estimate": est, "exact": exact, "error_indicator": ind}
    ok = True
    if exact is not None:
        result["abs_error"] = abs(est - exact)
        ok = result["abs_error"] < args.tol
    return _emit(ws, "mean", result, ok)


def _norm_grid(args):
    ts = _floats(args.t_grid)
    eps = _floats(args.eps_grid)
    return [NormParams(p=2, t=t) for t in ts] + [NormParams(p=1, s=args.norm_s, eps=e) for e in eps]


def cmd_residual(args, ws):
    g = ws.trigpoly(args.g)
    f = ws.trigpoly(args.f)
    rep = operators.residual_norms(g, f, _norm_grid(args))
    return _emit(ws, "residual", rep.to_json(), True)


def _hypo_gate(a, hp, ws):
    """Hypoellipticity check used by ``solve``; returns (passed, report, A)."""
    if a.is_polynomial() and a.is_x_independent():
        P = hypoell.PolySymbol.from_symbol(a)
        rep = hypoell.s_hypoelliptic_fit(P, sampler=_hsampler(ws))
        return rep.passed, {"check": "s_hypoelliptic_fit", **rep.to_json()}, max(hp.A, rep.A_used or 0.0)
    rep = hypoell.aphs_check(a, hp, sampler=hypoell.HypoSampler(seed=ws.seed, angular=0, refine=False))
    return rep.passed, {"check": "aphs_check", **rep.to_json()}, hp.A


def cmd_solve(args, ws):
    a = ws.symbol(args.symbol)
    f = ws.trigpoly(args.input)
    hp = _hypo_params(args, a)
    ok, gate, A = _hypo_gate(a, hp, ws)
    if not ok:
        return _emit(ws, "solve", {"refused": True, "reason": "hypoellipticity check failed",
                                   "hypoellipticity": gate}, False)
    b = calculus.parametrix(a, hp if hp.A == A else hypoell.HypoellParams(
        hp.m, hp.m0, hp.rho, hp.s, A, hp.B, hp.C, hp.C1), args.N)
    # below the validity radius the parametrix is replaced by zero
    low = b.terms[0] * 0
    u = None
    for t in b.terms:
        part = operators.apply_symbol(t, f, A=A, low=low)
        u = part if u is None else u + part
    if u.collapsible:
        u_tp = u.collapse()
        route = "exact" if u_tp.mode == EXACT else "collapsed"
    else:
        u_tp = u.coefficients(args.points)
        route = "sampled"
    g = operators.apply_symbol(a, u_tp, A=0.0)
    g_tp = g.collapse() if g.collapsible else g.coefficients(args.points)
    rep = operators.residual_norms(g_tp, f, _norm_grid(args))
    result = {"hypoellipticity": gate, "N": args.N, "A": A, "route": route,
              "u_N": u_tp.to_json(), "residual": rep.to_json()}
    try:
        result["u_N_gevrey_fit"] = regularity.gevrey_fit(regularity.CoeffData.from_trigpoly(u_tp)).to_json()
    except regularity.FitError as exc:
        result["u_N_gevrey_fit"] = {"skipped": str(exc)}
    return _emit(ws, "solve", result, True)


# ---------------------------------------------------------------------------
# parser


def _common(p):
    p.add_argument("--dim", type=int, default=None, help="expected dimension of all inputs")
    p.add_argument("--mode", choices=[EXACT, FLOAT], default=None, help="coefficient arithmetic")
    p.add_argument("--seed", type=int, default=0, help="seed for every randomized sample")
    p.add_argument("--out", type=Path, default=None, help="directory for JSON and CSV outputs")


def _hypo_flags(p, need_m=False):
    p.add_argument("--m", type=float, required=need_m, default=None)
    p.add_argument("--m0", type=float, default=None)
    p.add_argument("--rho", type=float, default=1.0)
    p.add_argument("--s", type=float, default=1.0)
    p.add_argument("--A", type=float, default=0.0)
    p.add_argument("--B", type=float, default=0.0)
    p.add_argument("--C", type=float, default=1.0)
    p.add_argument("--C1", type=float, default=1.0)


def _class_flags(p):
    p.add_argument("--m", type=float, required=True)
    p.add_argument("--rho", type=float, default=1.0)
    p.add_argument("--s", type=float, default=1.0)
    p.add_argument("--C", type=float, default=1.0)
    p.add_argument("--B", type=float, default=1.0)


def _norm_flags(p):
    p.add_argument("--t-grid", default="0,1,2", help="polynomial weights for the W^2_t norms")
    p.add_argument("--eps-grid", default="0.5,1", help="exponential weights for the W^1_(s,eps) norms")
    p.add_argument("--norm-s", type=float, default=1.0)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="apcalc", description="Almost periodic pseudodifferential calculus tools")
    sp = ap.add_subparsers(dest="command", required=True)

    p = sp.add_parser("apply", help="apply a symbol to a trigonometric polynomial")
    p.add_argument("--symbol", required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--A", type=float, default=0.0)
    p.set_defaults(func=cmd_apply)

    p = sp.add_parser("compose", help="compare a(x,D)b(x,D)f with the composed expansion applied to f")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--N", type=int, default=None, help="expansion terms (default: xi-degree of a)")
    p.add_argument("--tol", type=float, default=1e-9)
    p.set_defaults(func=cmd_compose)

    p = sp.add_parser("parametrix", help="parametrix terms and residual decay")
    p.add_argument("--symbol", required=True)
    p.add_argument("--N", type=int, default=2)
    p.add_argument("--save-terms", action="store_true")
    _hypo_flags(p)
    p.set_defaults(func=cmd_parametrix)

    p = sp.add_parser("equiv", help="equivalence of two formal sums")
    p.add_argument("--a", action="append", required=True, help="term file (repeat in order)")
    p.add_argument("--b", action="append", required=True)
    p.add_argument("--N", type=int, default=2)
    _class_flags(p)
    p.set_defaults(func=cmd_equiv)

    p = sp.add_parser("verify", help="sampled symbol-class estimates")
    p.add_argument("--symbol", required=True)
    p.add_argument("--max-order", type=int, default=2)
    p.add_argument("--fitted", action="store_true", help="judge at the fitted constant")
    _class_flags(p)
    p.set_defaults(func=cmd_verify)

    p = sp.add_parser("hypo", help="hypoellipticity tools")
    hs = p.add_subparsers(dest="hypo_cmd", required=True)
    q = hs.add_parser("fit")
    q.add_argument("--poly", required=True)
    q = hs.add_parser("weaker")
    q.add_argument("--Q", required=True)
    q.add_argument("--P", required=True)
    q = hs.add_parser("strength")
    q.add_argument("--poly", required=True)
    q.add_argument("--xi", required=True, help="points 'a,b;c,d'")
    q = hs.add_parser("constant-strength")
    q.add_argument("--coeff", action="append", required=True)
    q.add_argument("--poly", action="append", required=True)
    q.add_argument("--A", type=float, default=1.0)
    q = hs.add_parser("aphs")
    q.add_argument("--symbol", required=True)
    _hypo_flags(q)
    for q in hs.choices.values():
        _common(q)
    p.set_defaults(func=cmd_hypo)

    p = sp.add_parser("gevrey-fit", help="Gevrey order from coefficient decay")
    p.add_argument("--csv", required=True)
    p.add_argument("--s-min", type=float, default=1.0)
    p.add_argument("--s-max", type=float, default=4.0)
    p.add_argument("--s-step", type=float, default=0.01)
    p.add_argument("--C", type=float, default=None, help="report the decay rate implied by this constant")
    p.set_defaults(func=cmd_gevrey_fit)

    p = sp.add_parser("freq-check", help="summability of exp(-eps |xi|^(1/s)) over a frequency set")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--lattice", type=int, default=None, help="integer lattice of this dimension")
    g.add_argument("--bounded", action="store_true", help="the bounded set {1 - 1/n}")
    p.add_argument("--s", type=float, default=1.0)
    p.add_argument("--eps", default="1")
    p.add_argument("--R-max", type=float, default=50.0)
    p.add_argument("--tol", type=float, default=1e-9)
    p.set_defaults(func=cmd_freq_check)

    p = sp.add_parser("counterexample", help="growth of derivative ratios for the dilated bump sum")
    p.add_argument("--s", type=float, default=2.0)
    p.add_argument("--C", default="auto", help="'auto' uses the C0 lower bound")
    p.add_argument("--n-list", default="4,8,16")
    p.add_argument("--j-max", type=int, default=20)
    p.add_argument("--grid", type=int, default=counterexample.GRID_POINTS)
    p.add_argument("--min-slope", type=float, default=0.2)
    p.set_defaults(func=cmd_counterexample)

    p = sp.add_parser("mean", help="numerical mean value")
    p.add_argument("--input")
    p.add_argument("--samples")
    p.add_argument("--partial-sum", type=int, default=None, help="use the bump sum truncated at this block")
    p.add_argument("--s", type=float, default=2.0)
    p.add_argument("--square", action="store_true", help="mean of |f|^2, compared with the Parseval sum")
    p.add_argument("--xi", default=None, help="Bohr coefficient at this frequency")
    p.add_argument("--T", default="25,50,100")
    p.add_argument("--points", type=int, default=32)
    p.add_argument("--tol", type=float, default=1e-3)
    p.set_defaults(func=cmd_mean)

    p = sp.add_parser("residual", help="weighted norms of g - f")
    p.add_argument("--g", required=True)
    p.add_argument("--f", required=True)
    _norm_flags(p)
    p.set_defaults(func=cmd_residual)

    p = sp.add_parser("solve", help="approximate solution of p(x,D)u = f by the parametrix")
    p.add_argument("--symbol", required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--N", type=int, default=0)
    p.add_argument("--points", type=int, default=64, help="samples per period for sampled coefficients")
    _hypo_flags(p)
    _norm_flags(p)
    p.set_defaults(func=cmd_solve)

    for name, q in sp.choices.items():
        if name != "hypo":
            _common(q)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    ws = Workspace(args.dim, args.mode, args.seed, args.out)
    try:
        return args.func(args, ws)
    except InputError as exc:
        err = {"schema_version": SCHEMA_VERSION, "error": str(exc), "pointer": exc.pointer, "file": exc.path}
        print(json.dumps(err), file=sys.stderr)
        return EXIT_INPUT
    except (DomainError, ExactModeError, NotCollapsible, operators.DimensionError) as exc:
        err = {"schema_version": SCHEMA_VERSION, "error": str(exc), "pointer": "", "file": None}
        print(json.dumps(err), file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
