"""Kernel backend selection.

The compiled extension is used when it imports; otherwise the NumPy
fallback takes over. Both expose the same four sweep functions with
identical semantics. The default can be forced with the ``QLGAS_BACKEND``
environment variable (``compiled`` or ``python``) or per call via the
``backend=`` argument most lattice entry points accept.
"""

import os
import warnings

from . import _kernels_py
from .errors import InputError

try:
    from . import _kernels as _compiled
except ImportError:
    _compiled = None

_BACKENDS = {"python": _kernels_py}
if _compiled is not None:
    _BACKENDS["compiled"] = _compiled


def _default_name() -> str:
    requested = os.environ.get("QLGAS_BACKEND")
    if requested:
        if requested in _BACKENDS:
            return requested
        warnings.warn(
            f"QLGAS_BACKEND={requested!r} unavailable, falling back to defaults"
        )
    return "compiled" if _compiled is not None else "python"


_active = _default_name()


def available_backends() -> list[str]:
    return sorted(_BACKENDS)


def active_backend() -> str:
    return _active


def use_backend(name: str) -> str:
    """Switch the process-wide default backend; returns the previous one."""
    global _active
    previous = _active
    get(name)
    _active = name
    return previous


def get(name: str | None = None):
    """Return the kernel module for ``name`` (default: active backend)."""
    if name is None:
        name = _active
    try:
        return _BACKENDS[name]
    except KeyError:
        raise InputError(
            f"unknown kernel backend {name!r}; available: {available_backends()}"
        ) from None
