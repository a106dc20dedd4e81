"""Kernel backend selection.

The compiled extension is preferred when importable; the pure numpy
implementation is the fallback. BUSRANK_KERNEL=pure|native overrides,
and asking for an unavailable native build is an error rather than a
silent downgrade.
"""

from __future__ import annotations

import os

from . import _pure

_requested = os.environ.get("BUSRANK_KERNEL", "auto").lower()

if _requested not in ("auto", "pure", "native"):
    raise RuntimeError(f"BUSRANK_KERNEL must be auto, pure, or native, got {_requested!r}")

if _requested == "pure":
    _impl = _pure
else:
    try:
        from . import _native as _impl  # type: ignore[no-redef]
    except ImportError:
        if _requested == "native":
            raise RuntimeError("BUSRANK_KERNEL=native but the compiled extension is not built")
        _impl = _pure

power_injections = _impl.power_injections
polar_jacobian = _impl.polar_jacobian


def active_backend() -> str:
    return _impl.BACKEND


def available_backends() -> tuple[str, ...]:
    try:
        from . import _native  # noqa: F401
    except ImportError:
        return ("pure",)
    return ("pure", "native")
