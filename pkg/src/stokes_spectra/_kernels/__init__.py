"""Kernel backend selection.

The compiled Cython extension is preferred; the pure-python module is a
drop-in fallback with identical semantics.  Set STOKES_SPECTRA_PURE=1 to
force the fallback (used by the benchmark and for debugging).
"""

import os

from . import _pure

if os.environ.get("STOKES_SPECTRA_PURE") == "1":
    _impl = _pure
else:
    try:
        from . import _core as _impl
    except ImportError:
        _impl = _pure

BACKEND = _impl.BACKEND

STATUS_CAPTURE = _pure.STATUS_CAPTURE
STATUS_ESCAPE = _pure.STATUS_ESCAPE
STATUS_UNRESOLVED = _pure.STATUS_UNRESOLVED
STATUS_ERROR = _pure.STATUS_ERROR

integrate_segment = _impl.integrate_segment
trace_path = _impl.trace_path


def backend_name():
    return BACKEND


def get_backend(name):
    """Explicit backend access ('pure' or 'compiled'), for benchmarks."""
    if name == "pure":
        return _pure
    if name == "compiled":
        from . import _core

        return _core
    raise ValueError(f"unknown backend {name!r}")
