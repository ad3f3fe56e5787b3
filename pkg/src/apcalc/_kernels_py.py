"""Pure-numpy versions of the hot loops.

Kept signature-compatible with the compiled ``_kernels`` extension; used
when the extension is not built or ``APCALC_PURE_PYTHON`` is set.
"""

import numpy as np

_CHUNK = 4096


def trig_eval(freqs, coeffs, points):
    """Evaluate ``sum_k c_k exp(2 pi i xi_k . x)`` at each row of ``points``."""
    freqs = np.ascontiguousarray(freqs, dtype=np.float64)
    coeffs = np.ascontiguousarray(coeffs, dtype=np.complex128)
    points = np.ascontiguousarray(points, dtype=np.float64)
    out = np.zeros(points.shape[0], dtype=np.complex128)
    if freqs.shape[0] == 0:
        return out
    for start in range(0, points.shape[0], _CHUNK):
        block = points[start:start + _CHUNK]
        phase = 2.0 * np.pi * (block @ freqs.T)
        out[start:start + _CHUNK] = np.exp(1j * phase) @ coeffs
    return out


def gs_eval(signs, logc, powers, a, x):
    """Evaluate ``sum_k sign_k exp(logc_k) x**q_k exp(-x**(-a))`` for x > 0, else 0.

    Terms are combined in the log domain so that the flat region near zero
    neither overflows nor produces ``inf * 0``.
    """
    signs = np.asarray(signs, dtype=np.float64)
    logc = np.asarray(logc, dtype=np.float64)
    powers = np.asarray(powers, dtype=np.float64)
    x = np.asarray(x, dtype=np.float64)
    out = np.zeros(x.shape, dtype=np.float64)
    pos = x > 0
    if not pos.any() or signs.size == 0:
        return out
    xp = x[pos]
    lx = np.log(xp)
    expo = logc[None, :] + powers[None, :] * lx[:, None] - (xp ** (-a))[:, None]
    top = expo.max(axis=1)
    with np.errstate(under="ignore", over="ignore"):
        mant = (signs[None, :] * np.exp(expo - top[:, None])).sum(axis=1)
        out[pos] = mant * np.exp(top)
    return out


def trapezoid_weights(n, length):
    """Composite trapezoid weights on ``n`` equispaced nodes spanning ``[0, length]``."""
    w = np.full(n, length / (n - 1), dtype=np.float64)
    w[0] *= 0.5
    w[-1] *= 0.5
    return w
