"""Numeric kernel selection.

The compiled extension is used when it was built; set ``HOLOCURV_PURE_PYTHON=1``
to force the reference implementation.
"""
import os

if os.environ.get("HOLOCURV_PURE_PYTHON"):
    from ._kernels_py import aberth_sweep, horner, mul1, mul2

    BACKEND = "python"
else:
    try:
        from ._kernels import aberth_sweep, horner, mul1, mul2

        BACKEND = "cython"
    except ImportError:
        from ._kernels_py import aberth_sweep, horner, mul1, mul2

        BACKEND = "python"

__all__ = ["BACKEND", "aberth_sweep", "horner", "mul1", "mul2"]
