"""Kernel backend selection.

The compiled extension is preferred; set HEATLAB_PURE=1 to force the pure
NumPy fallback (used by the parity tests and the benchmark).
"""

import os

if os.environ.get("HEATLAB_PURE", "").strip().lower() in ("1", "true", "yes"):
    from . import _kernels_py as kernels
else:
    try:
        from . import _kernels as kernels  # type: ignore[attr-defined]
    except ImportError:
        from . import _kernels_py as kernels

COMPILED: bool = bool(kernels.COMPILED)
BACKEND: str = "compiled" if COMPILED else "pure"

MODE_DIRICHLET = 0
MODE_FLUX = 1
MODE_SCHRO = 2
