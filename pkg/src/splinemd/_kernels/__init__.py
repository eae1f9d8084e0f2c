"""B-spline evaluation kernels: compiled core with a pure-Python fallback.

The compiled extension is preferred when it imports cleanly; set the
environment variable ``SPLINEMD_PURE_PYTHON=1`` to force the numpy fallback.
``BACKEND`` reports which implementation is active.
"""

import os

from . import _bspline_np

if os.environ.get("SPLINEMD_PURE_PYTHON"):
    _impl = _bspline_np
else:
    try:
        from . import _bspline_cy as _impl
    except ImportError:
        _impl = _bspline_np

BACKEND = _impl.BACKEND
basis_arrays = _impl.basis_arrays

__all__ = ["BACKEND", "basis_arrays"]
