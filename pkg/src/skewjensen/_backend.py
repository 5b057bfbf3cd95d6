"""Select the compiled kernels when available, the numpy mirror otherwise.

Set ``SKEWJENSEN_PURE=1`` to force the pure-Python kernels.
"""
import os

from . import _kernels_py

if os.environ.get("SKEWJENSEN_PURE", "").strip() not in ("", "0"):
    kernels = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels as kernels
        BACKEND = "compiled"
    except ImportError:
        kernels = _kernels_py
        BACKEND = "python"

python_kernels = _kernels_py
