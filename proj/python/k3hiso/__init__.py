"""Isomorphism of vertex- and arc-colored graphs excluding K_{3,h} minors."""

try:
    from ._k3hiso import *  # noqa: F401,F403  (wheel layout)
    from . import _k3hiso as _impl
except ImportError:  # development layout: module next to the package on sys.path
    from _k3hiso import *  # noqa: F401,F403
    import _k3hiso as _impl

__all__ = [name for name in dir(_impl) if not name.startswith("_")]
__version__ = "0.1.0"
