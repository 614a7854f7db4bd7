"""Kernel backend selection.

The compiled extension is preferred; the numpy fallback is used when it is
missing or when ``CSLTRAP_PURE_PYTHON`` is set to a non-empty value.
"""
import os

from . import _kernels_py

try:
    from . import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None

if _compiled is not None and not os.environ.get("CSLTRAP_PURE_PYTHON"):
    _impl = _compiled
    BACKEND = "cython"
else:
    _impl = _kernels_py
    BACKEND = "python"

mathieu_max_amplitude = _impl.mathieu_max_amplitude
mathieu_max_amplitude_batch = _impl.mathieu_max_amplitude_batch
mathieu_trajectory = _impl.mathieu_trajectory
pair_sum = _impl.pair_sum


def available_backends():
    out = {"python": _kernels_py}
    if _compiled is not None:
        out["cython"] = _compiled
    return out
