"""Hot kernels: compiled core with a pure-Python fallback chosen at import.

Set ``TSGEVAL_PURE_PYTHON=1`` to force the fallback.
"""

import os

from . import _dtw_py

BACKEND = "python"
_impl = _dtw_py

if os.environ.get("TSGEVAL_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _dtw_cy
    except ImportError:  # extension not built
        pass
    else:
        _impl = _dtw_cy
        BACKEND = "cython"

dtw_window = _impl.dtw_window
dtw_pairs = _impl.dtw_pairs


def available_backends():
    """Map backend name -> kernel module for every backend importable here."""
    out = {"python": _dtw_py}
    try:
        from . import _dtw_cy
    except ImportError:
        return out
    out["cython"] = _dtw_cy
    return out
