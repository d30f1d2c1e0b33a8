"""Select the compiled integrator kernel, falling back to pure Python.

Set ``CUBICWAVE_PURE_PYTHON=1`` to force the fallback.
"""

import os

from . import _dopri_py

BACKEND = "python"
integrate = _dopri_py.integrate
dense_eval = _dopri_py.dense_eval

if os.environ.get("CUBICWAVE_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _dopri
    except ImportError:  # extension not built
        pass
    else:
        BACKEND = "compiled"
        integrate = _dopri.integrate
        dense_eval = _dopri.dense_eval

__all__ = ["BACKEND", "integrate", "dense_eval"]
