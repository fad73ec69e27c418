"""Select the kernel implementation at import time.

The compiled extension is used when it was built; otherwise, or when
``BINMATROID_BACKEND=python`` is set, the numpy fallback is used.
"""

from __future__ import annotations

import os

from binmatroid import _fallback

try:
    from binmatroid import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None

if _compiled is not None and os.environ.get("BINMATROID_BACKEND", "").lower() != "python":
    kernels = _compiled
else:
    kernels = _fallback

NAME: str = kernels.NAME


def available() -> dict:
    """Both backends by name, for benchmarks and cross-checks."""
    out = {"python": _fallback}
    if _compiled is not None:
        out["cython"] = _compiled
    return out
