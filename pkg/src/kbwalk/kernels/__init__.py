"""Hot-kernel dispatch.

Default path is numba-jitted; set KBWALK_NO_NUMBA=1 to force the pure-numpy
implementations (also used automatically when numba cannot be imported).
"""

import os

from . import _numpy_backend

_disabled = os.environ.get("KBWALK_NO_NUMBA", "").lower() in ("1", "true", "yes")

if not _disabled:
    try:
        from . import _numba_backend as _impl
    except ImportError:  # pragma: no cover - numba is a declared dependency
        _impl = _numpy_backend
else:
    _impl = _numpy_backend

BACKEND = _impl.BACKEND
relaxed_wmd = _impl.relaxed_wmd
batch_cosine = _impl.batch_cosine
softmax_weights = _impl.softmax_weights

__all__ = ["BACKEND", "relaxed_wmd", "batch_cosine", "softmax_weights"]
