"""Backend selection for the scan kernels.

The compiled extension is used when importable; set BCOPY_KERNELS=py to
force the numpy fallback or BCOPY_KERNELS=c to require the extension.
"""

import os

from . import _kernels_py

_choice = os.environ.get("BCOPY_KERNELS", "auto").lower()

if _choice not in ("auto", "c", "py"):
    raise ValueError(f"BCOPY_KERNELS must be auto, c or py, got {_choice!r}")

if _choice == "py":
    _impl = _kernels_py
    BACKEND = "py"
else:
    try:
        from . import _kernels as _impl
        BACKEND = "c"
    except ImportError:
        if _choice == "c":
            raise
        _impl = _kernels_py
        BACKEND = "py"

masked_argmin = _impl.masked_argmin
masked_argmin_pairs = _impl.masked_argmin_pairs
nearest_index = _impl.nearest_index
