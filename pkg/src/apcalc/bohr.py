"""Numerical mean values and Bohr-Fourier coefficients of black-box functions.

The mean value is approximated by tensor-grid trapezoid quadrature over the
cube ``[0, T]^d`` for each ``T`` of a :class:`MeanSchedule`.  The
``error_indicator`` returned alongside each estimate is the spread of the
last three cube averages; it is a heuristic, not a bound.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import kernels

MAX_DIM = 3
_CHUNK = 1 << 16

EXTRAPOLATIONS = ("none", "average", "cesaro", "smooth")


class BohrEvaluationError(ArithmeticError):
    """A sampled value was not finite."""

    def __init__(self, point, value):
        super().__init__(f"non-finite sample {value!r} at x = {list(np.atleast_1d(point))}")
        self.point = np.atleast_1d(point)
        self.value = value


@dataclass(frozen=True)
class MeanSchedule:
    """Cube sizes and sampling density for :func:`numerical_mean`.

    ``points_per_axis`` is the number of nodes per unit length along each
    axis, so oscillations up to roughly half that frequency are resolved.

    ``extrapolation`` combines the cube averages:

    * ``"none"``: the average over the largest cube;
    * ``"average"``: mean of the averages over the two largest cubes;
    * ``"cesaro"``: the average over the centred cube of side ``T``,
      itself averaged continuously over ``T`` between the two largest
      entries of ``T_values``.  This is a weighted mean whose weight is
      continuous and vanishes at the window edges, so the oscillatory error
      decays like ``T^-2`` instead of ``T^-1``;
    * ``"smooth"`` (default): a centred window equal to 1 on the cube of
      side ``T1`` and falling to 0 at side ``T2`` through a C-infinity step,
      ``T1, T2`` the two largest entries.  Every derivative of the weight is
      continuous, so for almost periodic input the error decays faster than
      any power of ``T``.
    """

    T_values: tuple = (25.0, 50.0, 100.0)
    points_per_axis: int = 32
    extrapolation: str = "smooth"

    def __post_init__(self):
        T = tuple(float(t) for t in self.T_values)
        object.__setattr__(self, "T_values", T)
        if not T or any(t <= 0 for t in T):
            raise ValueError("T_values must be positive")
        if any(b <= a for a, b in zip(T, T[1:])):
            raise ValueError("T_values must be strictly increasing")
        if self.points_per_axis < 16:
            raise ValueError("points_per_axis must be at least 16")
        if self.extrapolation not in EXTRAPOLATIONS:
            raise ValueError(f"extrapolation must be one of {EXTRAPOLATIONS}")


def _nodes(T: float, density: int) -> np.ndarray:
    n = max(int(math.ceil(density * T)), 16) + 1
    return np.linspace(0.0, T, n)


def _cesaro_weight(x: np.ndarray, T1: float, T2: float) -> np.ndarray:
    # average over T in [T1, T2] of (1/T) * indicator(|x| <= T/2)
    return np.log(T2 / np.maximum(2.0 * np.abs(x), T1)) / (T2 - T1)


def _flat(t):
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    pos = t > 0
    out[pos] = np.exp(-1.0 / t[pos])
    return out


def _smooth_weight(x: np.ndarray, T1: float, T2: float) -> np.ndarray:
    t = (0.5 * T2 - np.abs(x)) / (0.5 * (T2 - T1))
    a, b = _flat(t), _flat(1.0 - t)
    return a / (a + b)


def _weighted_integral(fn, axes_nodes, axes_weights, dim):
    """Sum of w(x) f(x) over the tensor grid, evaluated in fixed chunk order."""
    shape = tuple(len(a) for a in axes_nodes)
    total = 0j
    count = int(np.prod(shape))
    for start in range(0, count, _CHUNK):
        idx = np.unravel_index(np.arange(start, min(start + _CHUNK, count)), shape)
        pts = np.stack([axes_nodes[k][idx[k]] for k in range(dim)], axis=1)
        w = np.ones(pts.shape[0])
        for k in range(dim):
            w = w * axes_weights[k][idx[k]]
        vals = np.asarray(fn(pts[:, 0] if dim == 1 else pts), dtype=complex).reshape(-1)
        bad = ~np.isfinite(vals)
        if bad.any():
            i = int(np.argmax(bad))
            raise BohrEvaluationError(pts[i], vals[i])
        total += complex(np.dot(w, vals))
    return total


def cube_average(fn: Callable, T: float, dim: int, density: int) -> complex:
    """Trapezoid approximation of ``T^-d * integral over [0, T]^d of fn``."""
    nodes = _nodes(T, density)
    w = kernels.trapezoid_weights(len(nodes), T) / T
    return _weighted_integral(fn, [nodes] * dim, [w] * dim, dim)


def cesaro_average(fn: Callable, T1: float, T2: float, dim: int, density: int) -> complex:
    """Cube averages over centred cubes, averaged over the side length in [T1, T2]."""
    nodes = _nodes(T2, density) - 0.5 * T2
    w = kernels.trapezoid_weights(len(nodes), T2) * _cesaro_weight(nodes, T1, T2)
    w = w / w.sum()
    return _weighted_integral(fn, [nodes] * dim, [w] * dim, dim)


def smooth_average(fn: Callable, T1: float, T2: float, dim: int, density: int) -> complex:
    """Mean over the centred cube of side ``T2`` with a smooth edge window starting at side ``T1``."""
    nodes = _nodes(T2, density) - 0.5 * T2
    w = kernels.trapezoid_weights(len(nodes), T2) * _smooth_weight(nodes, T1, T2)
    w = w / w.sum()
    return _weighted_integral(fn, [nodes] * dim, [w] * dim, dim)


def numerical_mean(fn: Callable, schedule: MeanSchedule | None = None, dim: int = 1):
    """Estimate the mean value of ``fn`` over R^dim.

    ``fn`` is called on arrays: shape ``(n,)`` when ``dim == 1`` and ``(n, dim)``
    otherwise.  Returns ``(estimate, error_indicator)``.
    """
    schedule = schedule or MeanSchedule()
    if not 1 <= dim <= MAX_DIM:
        raise ValueError(f"black-box quadrature supports 1 <= dim <= {MAX_DIM}")
    dens = schedule.points_per_axis
    raw = [cube_average(fn, T, dim, dens) for T in schedule.T_values]
    last = raw[-3:]
    indicator = max(abs(a - b) for a in last for b in last) if len(last) > 1 else 0.0
    if schedule.extrapolation == "none" or len(raw) == 1:
        est = raw[-1]
    elif schedule.extrapolation == "average":
        est = 0.5 * (raw[-1] + raw[-2])
    elif schedule.extrapolation == "cesaro":
        est = cesaro_average(fn, schedule.T_values[-2], schedule.T_values[-1], dim, dens)
    else:
        est = smooth_average(fn, schedule.T_values[-2], schedule.T_values[-1], dim, dens)
    return est, float(indicator)


def numerical_bohr_coeff(fn: Callable, xi: Sequence[float] | float,
                         schedule: MeanSchedule | None = None, dim: int = 1):
    """Mean value of ``fn(x) exp(-2 pi i xi . x)``; returns ``(estimate, error_indicator)``."""
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    if xi.shape[0] != dim:
        raise ValueError("frequency has wrong dimension")

    def modulated(x):
        pts = np.asarray(x, dtype=float).reshape(-1, dim)
        return np.asarray(fn(x), dtype=complex).reshape(-1) * np.exp(-2j * np.pi * (pts @ xi))

    return numerical_mean(modulated, schedule, dim)


def periodic_bohr_coeffs(fn: Callable, period: Sequence[float], freqs: np.ndarray,
                         points_per_axis: int = 64) -> np.ndarray:
    """Bohr-Fourier coefficients of a function with the given period (rectangle rule).

    For trigonometric polynomials whose frequencies are resolved by the grid
    the rule is exact; for smooth periodic functions it converges
    spectrally.
    """
    period = np.asarray(period, dtype=float)
    dim = period.shape[0]
    freqs = np.asarray(freqs, dtype=float).reshape(-1, dim)
    axes = [np.arange(points_per_axis) * (L / points_per_axis) for L in period]
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([m.ravel() for m in mesh], axis=1)
    vals = np.asarray(fn(pts[:, 0] if dim == 1 else pts), dtype=complex).reshape(-1)
    bad = ~np.isfinite(vals)
    if bad.any():
        i = int(np.argmax(bad))
        raise BohrEvaluationError(pts[i], vals[i])
    phases = np.exp(-2j * np.pi * (pts @ freqs.T))
    return (vals @ phases) / pts.shape[0]


# sampled data ---------------------------------------------------------------


@dataclass
class SampledSignal:
    """Samples on a tensor grid read from CSV (columns x_1..x_d, re, im)."""

    points: np.ndarray
    values: np.ndarray
    axes: list = field(default_factory=list)

    @property
    def dim(self) -> int:
        return self.points.shape[1]


def load_samples_csv(path) -> SampledSignal:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = [[float(v) for v in row] for row in reader if row]
    cols = [h.strip().lower() for h in header]
    if "re" not in cols:
        raise ValueError("CSV needs columns x_1..x_d, re, im")
    xcols = [i for i, h in enumerate(cols) if h.startswith("x")]
    data = np.array(rows, dtype=float)
    pts = data[:, xcols]
    vals = data[:, cols.index("re")] + 1j * (data[:, cols.index("im")] if "im" in cols else 0.0)
    axes = [np.unique(pts[:, k]) for k in range(pts.shape[1])]
    if int(np.prod([len(a) for a in axes])) != pts.shape[0]:
        raise ValueError("samples must form a full tensor grid")
    return SampledSignal(pts, vals, axes)


def sampled_mean(signal: SampledSignal, xi: Sequence[float] | None = None) -> complex:
    """Trapezoid mean of sampled data over its grid, optionally modulated by ``e_{-xi}``."""
    dim = signal.dim
    weights = []
    for a in signal.axes:
        if len(a) < 2:
            raise ValueError("each axis needs at least two samples")
        h = np.diff(a)
        w = np.zeros(len(a))
        w[:-1] += h / 2
        w[1:] += h / 2
        weights.append(w / (a[-1] - a[0]))
    w = np.ones(signal.points.shape[0])
    for k in range(dim):
        idx = np.searchsorted(signal.axes[k], signal.points[:, k])
        w = w * weights[k][idx]
    vals = signal.values
    if xi is not None:
        xi = np.atleast_1d(np.asarray(xi, dtype=float))
        vals = vals * np.exp(-2j * np.pi * (signal.points @ xi))
    return complex(np.dot(w, vals))
