"""Kernel backend selection.

The compiled Cython core is preferred; the pure-Python module is a drop-in
replacement producing bit-identical results (same RNG, same arithmetic).
``get_backend`` lets tests and benchmarks request a specific one.
"""

from . import _pure

try:
    from . import _core

    _default = _core
    BACKEND = "compiled"
except ImportError:
    _core = None
    _default = _pure
    BACKEND = "pure"

run_sweep = _default.run_sweep
run_tagged = _default.run_tagged
run_coupled = _default.run_coupled
mix64 = _pure.mix64

STATUS_FIXED = _pure.STATUS_FIXED
STATUS_LOSS = _pure.STATUS_LOSS
STATUS_ABSORBED = _pure.STATUS_ABSORBED
STATUS_TRUNCATED = _pure.STATUS_TRUNCATED
STATUS_T_END = _pure.STATUS_T_END
STATUS_EPS = _pure.STATUS_EPS


def get_backend(name):
    """Return the kernel module for 'compiled' or 'pure'."""
    if name == "pure":
        return _pure
    if name == "compiled":
        if _core is None:
            raise RuntimeError("compiled kernel backend is not available")
        return _core
    raise ValueError(f"unknown backend {name!r}")


def available_backends():
    return ("compiled", "pure") if _core is not None else ("pure",)
