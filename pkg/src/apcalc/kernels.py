"""Kernel selection: compiled extension when available, numpy otherwise.

Set ``APCALC_PURE_PYTHON=1`` to force the numpy fallback.
"""

import os

from . import _kernels_py

BACKEND = "python"
_impl = _kernels_py

if not os.environ.get("APCALC_PURE_PYTHON"):
    try:
        from . import _kernels as _compiled  # type: ignore[attr-defined]
    except ImportError:
        pass
    else:
        _impl = _compiled
        BACKEND = "cython"

trig_eval = _impl.trig_eval
gs_eval = _impl.gs_eval
trapezoid_weights = _impl.trapezoid_weights

__all__ = ["BACKEND", "trig_eval", "gs_eval", "trapezoid_weights"]
