"""Kernel backend selection.

The compiled extension is used when it imports and the scalars are real;
``OVPFRAME_PURE_PYTHON=1`` forces the numpy fallback.
"""

import os

import numpy as np

from . import _power_py

try:
    if os.environ.get("OVPFRAME_PURE_PYTHON"):
        raise ImportError("pure python requested")
    from . import _power as _compiled
except ImportError:
    _compiled = None

BACKEND = "cython" if _compiled is not None else "python"


def power_gain(T, starts, dom, cod, max_steps, rtol, backend=None):
    backend = backend or BACKEND
    if backend == "cython" and _compiled is not None and not np.iscomplexobj(T):
        return _compiled.power_gain(T, starts, dom, cod, max_steps, rtol)
    return _power_py.power_gain(T, starts, dom, cod, max_steps, rtol)
