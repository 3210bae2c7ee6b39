"""Phase analysis of complex matrices and MIMO LTI feedback loops."""

try:
    from . import _phasekit
except ImportError:  # built in-tree, extension on sys.path
    import _phasekit

from_names = [n for n in dir(_phasekit) if not n.startswith("_")]
globals().update({n: getattr(_phasekit, n) for n in from_names})
__all__ = from_names
del from_names
