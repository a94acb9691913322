"""Select the compiled kernels when available, else the numpy fallback.

Set ``GEODESIC_CODER_PURE=1`` to force the fallback.
"""
import os

from . import _kernels_py

BACKEND = "python"
_impl = _kernels_py

if os.environ.get("GEODESIC_CODER_PURE", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _impl  # noqa: F811
        BACKEND = "cython"
    except ImportError:
        _impl = _kernels_py

strip_index = _impl.strip_index
extension_orbit = _impl.extension_orbit
extension_occupancy = _impl.extension_occupancy
step_member = _impl.step_member


def get(name, backend=None):
    """Fetch one kernel from a specific backend (for benchmarks and tests)."""
    if backend is None:
        return globals()[name]
    if backend == "python":
        return getattr(_kernels_py, name)
    from . import _kernels
    return getattr(_kernels, name)
