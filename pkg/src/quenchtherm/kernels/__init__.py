"""
Hot kernels with a compiled core and a numpy fallback.

The compiled ``_core`` extension is used when it was built; otherwise, or
when ``QT_PURE_PYTHON=1`` is set, the numpy versions in ``_fallback`` are
used.  ``BACKEND`` names the active implementation.
"""

import os

from . import _fallback

if os.environ.get("QT_PURE_PYTHON", "") not in ("", "0"):
    _core = None
else:
    try:
        from . import _core
    except ImportError:
        _core = None

if _core is not None:
    BACKEND = "compiled"
    sample_reduced = _core.sample_reduced
    wedge_scan = _core.wedge_scan
else:
    BACKEND = "python"
    sample_reduced = _fallback.sample_reduced
    wedge_scan = _fallback.wedge_scan

__all__ = ["BACKEND", "sample_reduced", "wedge_scan"]
