"""Kernel backend selection: compiled extension if available, numpy fallback
otherwise.  Set SPECTRA_CDMA_NO_EXT=1 to force the fallback."""

import os

from . import _kernels_py

if os.environ.get("SPECTRA_CDMA_NO_EXT") == "1":
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _corrcore as _impl

        BACKEND = "cython"
    except ImportError:
        _impl = _kernels_py
        BACKEND = "python"

corr_blocks = _impl.corr_blocks
