"""Kernel backend selection.

The compiled extension is preferred at import time; the pure-Python
fallback is used when the extension is missing or when the FCMSEG_PURE
environment variable is set to a non-empty value other than "0". Both
backends are bit-identical, so selection only affects speed.
"""

import os

from . import _kernels_py

try:
    from . import _kernels as _compiled
except ImportError:
    _compiled = None

_FORCE_PURE = os.environ.get("FCMSEG_PURE", "").strip() not in ("", "0")

_active = _kernels_py if (_compiled is None or _FORCE_PURE) else _compiled


def active():
    """Return the kernel module currently in use."""
    return _active


def compiled_available() -> bool:
    """True if the compiled extension imported successfully."""
    return _compiled is not None


def using_compiled() -> bool:
    """True if the compiled extension is the active backend."""
    return _active is _compiled and _compiled is not None


def backend_name() -> str:
    return "compiled" if using_compiled() else "pure"


def force(name: str) -> None:
    """Switch the active backend; intended for tests and benchmarks."""
    global _active
    if name == "pure":
        _active = _kernels_py
    elif name == "compiled":
        if _compiled is None:
            raise RuntimeError("compiled kernel extension is not available")
        _active = _compiled
    else:
        raise ValueError(f"unknown backend {name!r}; expected 'compiled' or 'pure'")
