"""Simultaneous confidence bands for distribution, quantile, and
quantile-effect functions of possibly discrete outcomes."""

try:
    from ._core import *  # noqa: F401,F403  (installed wheel layout)
    from ._core import __version__  # noqa: F401
except ImportError:  # in-tree build: extension directory on sys.path
    from _core import *  # noqa: F401,F403
    from _core import __version__  # noqa: F401
