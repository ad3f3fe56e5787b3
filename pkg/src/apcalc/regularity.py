"""Gevrey regularity read off from the decay of Bohr-Fourier coefficients."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .trigpoly import TrigPoly

DEFAULT_S_GRID = np.round(np.arange(1.0, 4.0 + 1e-9, 0.01), 10)
NON_GEVREY_RMS = 0.5
MIN_MAGNITUDE = 1e-300


class FitError(ValueError):
    pass


@dataclass
class CoeffData:
    """Frequencies (rows) and coefficient magnitudes."""

    xi: np.ndarray
    magnitude: np.ndarray

    def __post_init__(self):
        self.xi = np.asarray(self.xi, dtype=float)
        if self.xi.ndim == 1:
            self.xi = self.xi[:, None]
        self.magnitude = np.abs(np.asarray(self.magnitude, dtype=float))
        if self.xi.shape[0] != self.magnitude.shape[0]:
            raise ValueError("one magnitude per frequency is required")
        if not np.all(np.isfinite(self.magnitude)):
            raise ValueError("magnitudes must be finite")
        if np.unique(self.xi, axis=0).shape[0] != self.xi.shape[0]:
            raise ValueError("frequencies must be distinct")

    @property
    def radius(self) -> np.ndarray:
        return np.linalg.norm(self.xi, axis=1)

    @classmethod
    def from_trigpoly(cls, f: TrigPoly) -> "CoeffData":
        return cls(f.freq_matrix(), np.abs(f.coeff_vector()))

    @classmethod
    def from_profile(cls, fn: Callable, k: Iterable) -> "CoeffData":
        k = np.asarray(list(k), dtype=float)
        return cls(k, fn(k))

    @classmethod
    def from_csv(cls, path) -> "CoeffData":
        with open(path, newline="") as fh:
            rows = [r for r in csv.reader(fh) if r]
        header = [h.strip().lower() for h in rows[0]]
        body = np.array(rows[1:], dtype=float)
        mcol = header.index("magnitude") if "magnitude" in header else len(header) - 1
        xcols = [i for i in range(len(header)) if i != mcol]
        return cls(body[:, xcols], body[:, mcol])


@dataclass
class GevreyFit:
    s_hat: float
    eps_hat: float
    C_hat: float
    rms_residual: float
    n_points: int
    non_gevrey: bool
    at_grid_edge: bool
    rms_by_s: dict = field(default_factory=dict, repr=False)

    def bound(self, radius) -> np.ndarray:
        """Fitted envelope ``C exp(-eps |xi|^(1/s))``."""
        return self.C_hat * np.exp(-self.eps_hat * np.asarray(radius, dtype=float) ** (1.0 / self.s_hat))

    def to_json(self) -> dict:
        return {"s_hat": self.s_hat, "eps_hat": self.eps_hat, "C_hat": self.C_hat,
                "rms_residual": self.rms_residual, "n_points": self.n_points,
                "verdict": "NON-GEVREY" if self.non_gevrey else "GEVREY",
                "at_grid_edge": self.at_grid_edge}


def _usable(data: CoeffData):
    r = data.radius
    keep = (r >= 1.0) & (data.magnitude > MIN_MAGNITUDE)
    return r[keep], np.log(data.magnitude[keep])


def gevrey_fit(data: CoeffData, s_grid: Sequence[float] | None = None) -> GevreyFit:
    """Grid search in ``s``; for each ``s`` a linear fit of ``log|c|`` against ``-|xi|^(1/s)``.

    The data are flagged NON-GEVREY when the residual exceeds 0.5 at every
    grid value, when the best ``s`` sits on the upper edge of the grid (the
    decay is slower than any tested Gevrey order), or when the fitted rate
    is not positive.
    """
    grid = np.asarray(DEFAULT_S_GRID if s_grid is None else s_grid, dtype=float)
    r, y = _usable(data)
    if r.size < 8:
        raise FitError(f"need at least 8 points with |xi| >= 1 and non-zero magnitude, got {r.size}")
    best = None
    rms_by_s = {}
    for s in grid:
        X = np.stack([-r ** (1.0 / s), np.ones_like(r)], axis=1)
        coef, *_ = np.linalg.lstsq(X, y, rcond=None)
        rms = float(np.sqrt(np.mean((X @ coef - y) ** 2)))
        rms_by_s[float(s)] = rms
        if best is None or rms < best[0] - 1e-12:
            best = (rms, float(s), float(coef[0]), float(coef[1]))
    rms, s_hat, eps, logC = best
    edge = len(grid) > 1 and s_hat >= grid.max() - 1e-12
    non = min(rms_by_s.values()) > NON_GEVREY_RMS or edge or eps <= 0
    return GevreyFit(s_hat, eps, math.exp(logC), rms, int(r.size), bool(non), bool(edge), rms_by_s)


def predicted_eps(s: float, C: float, d: int = 1) -> float:
    """Decay rate ``(s/e) (2 pi / (C sqrt(d)))^(1/s)`` implied by a Gevrey constant ``C``."""
    return (s / math.e) * (2 * math.pi / (C * math.sqrt(d))) ** (1.0 / s)


def membership_report(data: CoeffData, s: float, eps_grid: Sequence[float], p: float = 1.0) -> dict:
    """Partial weighted norms over the data for each ``eps``.

    A row is marked finite when the weighted terms decay: the slope of
    their logarithm against ``|xi|^(1/s)`` (over ``|xi| >= 1``) is negative.
    The tail share of the outer half of the radii is reported alongside.
    """
    order = np.argsort(data.radius, kind="stable")
    r = data.radius[order]
    mag = data.magnitude[order]
    rows = []
    for eps in eps_grid:
        w = np.exp(-eps * r ** (1.0 / s)) * mag
        if math.isinf(p):
            partial = np.maximum.accumulate(w)
        else:
            partial = np.cumsum(w ** p) ** (1.0 / p)
        total = float(partial[-1]) if partial.size else 0.0
        half = r > r.max() / 2 if r.size else np.zeros(0, bool)
        tail = float(partial[-1] - partial[~half][-1]) / total if (total > 0 and (~half).any()) else 0.0
        use = (r >= 1) & (w > MIN_MAGNITUDE)
        if use.sum() >= 2:
            slope = float(np.polyfit(r[use] ** (1.0 / s), np.log(w[use]), 1)[0])
        else:
            slope = -math.inf
        rows.append({"eps": float(eps), "norm": total, "finite": bool(slope < 0),
                     "decay_slope": slope, "tail_share": tail,
                     "partial": partial.tolist()})
    pos = [row for row in rows if row["eps"] > 0]
    neg = [row for row in rows if row["eps"] < 0]
    return {
        "s": s, "p": p, "rows": rows,
        "consistent_W_s0": bool(pos) and all(row["finite"] for row in pos),
        "consistent_W_s0_minus": any(row["finite"] for row in neg),
    }


# ---------------------------------------------------------------------------
# frequency sets


def integer_lattice(d: int = 1) -> Callable:
    """Generator of ``Z^d`` intersected with the ball of radius ``R``."""

    def gen(R):
        n = int(math.floor(R))
        axes = [np.arange(-n, n + 1)] * d
        pts = np.stack([m.ravel() for m in np.meshgrid(*axes, indexing="ij")], axis=1).astype(float)
        return pts[np.linalg.norm(pts, axis=1) <= R]

    return gen


def bounded_example(per_unit: int = 10) -> Callable:
    """``{1 - 1/n}``, truncated to ``n <= per_unit * R`` so the enumeration grows with ``R``."""

    def gen(R):
        n = np.arange(1, int(math.ceil(per_unit * R)) + 1, dtype=float)
        return (1.0 - 1.0 / n)[:, None]

    return gen


def frequency_condition_check(freq_gen: Callable, s: float, eps_list: Sequence[float],
                              R_max: float = 50.0, tol: float = 1e-9) -> dict:
    """Partial sums of ``exp(-eps |xi|^(1/s))`` over ``Lambda`` at doubling radii.

    CONVERGENT when the increment between ``R_max/2`` and ``R_max`` is below
    ``tol`` (relative to the sum when it exceeds 1), or when the last two
    increments each shrink by at least half (geometric tail); else DIVERGENT.
    """
    radii = [R_max / 2 ** k for k in range(5, -1, -1)]
    out = []
    for eps in eps_list:
        sums = []
        for R in radii:
            pts = np.asarray(freq_gen(R), dtype=float)
            pts = pts.reshape(pts.shape[0], -1)
            rad = np.linalg.norm(pts, axis=1)
            vals = np.exp(-eps * rad ** (1.0 / s))
            sums.append(float(math.fsum(vals)))
        inc = np.diff(sums)
        tail = float(inc[-1])
        ratios = [float(b / a) if a > 0 else (0.0 if b <= 0 else math.inf) for a, b in zip(inc[-3:-1], inc[-2:])]
        ok = tail < tol * max(1.0, abs(sums[-1])) or all(q < 0.5 for q in ratios)
        out.append({"eps": float(eps), "radii": radii, "partial_sums": sums, "tail": tail,
                    "tail_ratios": ratios,
                    "verdict": "CONVERGENT" if ok else "DIVERGENT"})
    return {"s": s, "R_max": R_max, "tol": tol, "results": out,
            "all_convergent": all(r["verdict"] == "CONVERGENT" for r in out)}
