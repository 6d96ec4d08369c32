"""Kernel backend selection: compiled Cython speedups when available,
numpy fallback otherwise.  Both expose the same entry points through
this package; callers never import the backends directly."""

from . import fallback

try:  # pragma: no cover - depends on build environment
    from . import _speedups

    HAVE_SPEEDUPS = True
except ImportError:  # pragma: no cover
    _speedups = None
    HAVE_SPEEDUPS = False


def backend_name():
    return "cython" if HAVE_SPEEDUPS else "numpy"
