"""Kernel dispatch: compiled extension when importable, numpy fallback otherwise.

Set ``SIEGELCURV_PURE=1`` to force the fallback.
"""
import os

from . import _pykernels

BACKEND = "python"
batch_roots = _pykernels.batch_roots
block_sum = _pykernels.block_sum

if not os.environ.get("SIEGELCURV_PURE"):
    try:
        from . import _ckernels
    except ImportError:
        pass
    else:
        BACKEND = "cython"
        batch_roots = _ckernels.batch_roots
        block_sum = _ckernels.block_sum
