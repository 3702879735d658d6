"""Kernel backend selection: compiled extension with pure-numpy fallback."""

from __future__ import annotations

import os

if os.environ.get("STABNET_PURE_PYTHON"):
    from . import _slowkern as _impl
else:
    try:
        from . import _fastkern as _impl  # type: ignore[no-redef]
    except ImportError:
        from . import _slowkern as _impl  # type: ignore[no-redef]

BACKEND: str = _impl.BACKEND
min_candidate = _impl.min_candidate
