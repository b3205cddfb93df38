"""Bit-kernel backend selection.

Imports the compiled Cython kernels when available, otherwise the pure
numpy fallback. ``QFP_PURE_PYTHON=1`` forces the fallback (used by the
benchmark and by tests that compare the two backends).
"""

import os

from . import _bitops_py

if os.environ.get("QFP_PURE_PYTHON") == "1":
    _impl = _bitops_py
    BACKEND = "python"
else:
    try:
        from . import _bitops_cy as _impl

        BACKEND = "compiled"
    except ImportError:
        _impl = _bitops_py
        BACKEND = "python"

popcounts = _impl.popcounts
hamming_matrix = _impl.hamming_matrix
pair_max_abs_dev = _impl.pair_max_abs_dev
signed_dots = _impl.signed_dots
unpack_signs = _impl.unpack_signs

__all__ = [
    "BACKEND",
    "popcounts",
    "hamming_matrix",
    "pair_max_abs_dev",
    "signed_dots",
    "unpack_signs",
]
