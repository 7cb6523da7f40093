"""Backend selection for the batched simulation kernels.

The compiled extension is used when it imports; otherwise the numpy
fallback is. Setting ``CAMU_PURE_PYTHON=1`` forces the fallback.
"""

import os

from . import _fallback

BACKEND = "python"

if os.environ.get("CAMU_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _impl

        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _fallback
else:
    _impl = _fallback

step_batch = _impl.step_batch
torus_step_batch = _impl.torus_step_batch
central_codes = _impl.central_codes
column_match = _impl.column_match

__all__ = ["BACKEND", "step_batch", "torus_step_batch", "central_codes", "column_match"]
