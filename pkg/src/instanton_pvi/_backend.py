"""Select the integration kernel: compiled if importable, else pure Python."""
import numpy as np

from . import _rk_py

try:
    from . import _rk as _compiled
except ImportError:  # extension not built
    _compiled = None

BACKENDS = ("compiled", "python") if _compiled is not None else ("python",)
_active = BACKENDS[0]


def active_backend():
    return _active


def set_backend(name):
    """Switch kernels at runtime; mostly for tests and the benchmark."""
    global _active
    if name not in BACKENDS:
        raise ValueError(f"backend {name!r} not available; have {BACKENDS}")
    _active = name


def integrate(t0, a0, t_end, tol, overflow, max_steps, backend=None, atol=None):
    name = backend or _active
    if name == "compiled":
        status, ts, ys, fs, t_stop = _compiled.integrate(
            float(t0), a0, float(t_end), float(tol), float(overflow), int(max_steps),
            atol=None if atol is None else float(atol))
    else:
        status, ts, ys, fs, t_stop = _rk_py.integrate(
            float(t0), a0, float(t_end), float(tol), float(overflow), int(max_steps),
            atol=None if atol is None else float(atol))
        ts = np.asarray(ts, dtype=float)
        ys = np.asarray(ys, dtype=float).reshape(-1, 3)
        fs = np.asarray(fs, dtype=float).reshape(-1, 3)
    return status, ts, ys, fs, t_stop
