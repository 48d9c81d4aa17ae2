"""Window-maximum kernels behind the maximal operators.

The compiled extension is used when it was built; set ``MEANLAB_PURE=1``
to force the numpy fallback.
"""

import os

from . import _fallback

try:
    if os.environ.get("MEANLAB_PURE"):
        raise ImportError("pure backend requested")
    from . import _ckernels as _impl

    BACKEND = "compiled"
except ImportError:
    _impl = _fallback
    BACKEND = "python"

maximal_scan = _impl.maximal_scan
centered_window_max = _impl.centered_window_max


def available_backends():
    out = {"python": _fallback}
    try:
        from . import _ckernels

        out["compiled"] = _ckernels
    except ImportError:
        pass
    return out
