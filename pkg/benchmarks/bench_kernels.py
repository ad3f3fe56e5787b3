"""Compare the compiled kernels with the numpy fallback.

Usage::

    python benchmarks/bench_kernels.py [--repeat 5] [--json out.json]

Both backends are imported directly, so the comparison does not depend on
``APCALC_PURE_PYTHON``.  Each case also checks that the backends agree.
For high-order ``gs_eval`` the alternating term sums cancel by up to nine
digits, so agreement there is near 1e-6 rather than machine precision.
"""

from __future__ import annotations

import argparse
import json
import sys
import timeit

import numpy as np

from apcalc import _kernels_py
from apcalc.counterexample import gs_derivative

try:
    from apcalc import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None


def _cases(rng):
    freqs = rng.integers(-40, 41, size=(64, 2)).astype(float)
    coeffs = rng.normal(size=64) + 1j * rng.normal(size=64)
    pts = rng.uniform(0, 1, size=(20000, 2))
    yield "trig_eval 64 freqs x 20000 pts (d=2)", "trig_eval", (freqs, coeffs, pts)

    freqs1 = rng.integers(-200, 201, size=(256, 1)).astype(float)
    coeffs1 = rng.normal(size=256) + 0j
    pts1 = rng.uniform(0, 1, size=(50000, 1))
    yield "trig_eval 256 freqs x 50000 pts (d=1)", "trig_eval", (freqs1, coeffs1, pts1)

    g = gs_derivative(2, 20)
    signs, logc, powers = g.arrays()
    x = np.linspace(-0.1, 1.0, 100000)
    yield f"gs_eval j=20 ({len(g)} terms) x 100000 pts", "gs_eval", (signs, logc, powers, float(g.a), x)


def run(repeat: int = 5, seed: int = 0) -> list:
    rng = np.random.default_rng(seed)
    rows = []
    for label, name, args in _cases(rng):
        py = getattr(_kernels_py, name)
        t_py = min(timeit.repeat(lambda: py(*args), number=1, repeat=repeat))
        row = {"case": label, "python_s": t_py}
        if _compiled is not None:
            cy = getattr(_compiled, name)
            t_cy = min(timeit.repeat(lambda: cy(*args), number=1, repeat=repeat))
            a, b = np.asarray(py(*args)), np.asarray(cy(*args))
            scale = max(1.0, float(np.max(np.abs(a))))
            row.update(cython_s=t_cy, speedup=t_py / t_cy,
                       max_rel_diff=float(np.max(np.abs(a - b))) / scale)
        rows.append(row)
    return rows


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--json", default=None)
    args = ap.parse_args(argv)
    rows = run(args.repeat, args.seed)
    if _compiled is None:
        print("compiled extension not available; timing the numpy fallback only")
    print(f"{'case':48s} {'python':>10s} {'cython':>10s} {'speedup':>8s} {'rel diff':>9s}")
    for r in rows:
        print(f"{r['case']:48s} {r['python_s']:10.4f} {r.get('cython_s', float('nan')):10.4f} "
              f"{r.get('speedup', float('nan')):8.2f} {r.get('max_rel_diff', float('nan')):9.1e}")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(rows, fh, indent=2)
    return 0


if __name__ == "__main__":
    sys.exit(main())
