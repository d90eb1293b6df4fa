"""Hot kernels with backend selection.

Two interchangeable implementations of the sieve and the multiplicity-exact
trial-division loop: a Cython extension (``_fast``) and a pure-Python/numpy
reference (``_pyref``).  The compiled one is picked at import when present;
``PHISTAR_KERNEL=python`` forces the fallback.  Both backends are kept
behaviourally identical and are cross-checked by the test suite and by
``benchmarks/bench_kernels.py``.
"""

import os

from . import _pyref

if os.environ.get("PHISTAR_KERNEL", "").lower() in ("py", "python", "pyref"):
    _impl = _pyref
    BACKEND = "python"
else:
    try:
        from . import _fast as _impl
        BACKEND = "cython"
    except ImportError:
        _impl = _pyref
        BACKEND = "python"

sieve = _impl.sieve
divide_out = _impl.divide_out


def available_backends():
    """Name -> module for every importable backend (for tests/benchmarks)."""
    backends = {"python": _pyref}
    try:
        from . import _fast
        backends["cython"] = _fast
    except ImportError:
        pass
    return backends
