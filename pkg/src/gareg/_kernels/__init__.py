"""Design-matrix kernels with a compiled core and a numpy fallback.

The compiled extension is preferred when importable; set
``GAREG_PURE_PYTHON=1`` to force the fallback. ``BACKEND`` records which
implementation is active.
"""

import os

if os.environ.get("GAREG_PURE_PYTHON", "") not in ("", "0"):
    from . import _fallback as _impl

    BACKEND = "python"
else:
    try:
        from . import _speedups as _impl  # type: ignore[no-redef]

        BACKEND = "compiled"
    except ImportError:
        from . import _fallback as _impl  # type: ignore[no-redef]

        BACKEND = "python"

truncated_power_matrix = _impl.truncated_power_matrix
bspline_full_matrix = _impl.bspline_full_matrix

__all__ = ["BACKEND", "truncated_power_matrix", "bspline_full_matrix"]
