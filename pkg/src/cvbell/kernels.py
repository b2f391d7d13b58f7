"""Select the compiled sector kernels when available, else the NumPy versions.

Set ``CVBELL_PURE_PYTHON=1`` to force the NumPy path.
"""
import os

import numpy as np

from . import _kernels_py

IMPLEMENTATION = "python"
_impl = _kernels_py

if os.environ.get("CVBELL_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]

        IMPLEMENTATION = "cython"
    except ImportError:
        _impl = _kernels_py


def pair_project(x, phi):
    return _impl.pair_project(
        np.ascontiguousarray(x, dtype=np.complex128), np.ascontiguousarray(phi, dtype=np.float64)
    )


def pair_transform(x, blocks):
    return _impl.pair_transform(
        np.ascontiguousarray(x, dtype=np.complex128), np.ascontiguousarray(blocks, dtype=np.complex128)
    )
