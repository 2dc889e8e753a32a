"""Hot numeric kernels with two interchangeable backends.

The numba backend (default when numba imports cleanly) JIT-compiles the
inner loops; the numpy backend is a pure-vectorized fallback. Selection:

    SENSEPRIV_BACKEND=numpy   force the numpy fallback
    SENSEPRIV_BACKEND=numba   require numba (ImportError if unavailable)
    unset                     numba if available, else numpy

Both backends implement the same exact linear-scan math and return
identical index selections; see benchmarks/bench_kernels.py for the
side-by-side comparison.
"""

import os

_requested = os.environ.get("SENSEPRIV_BACKEND", "").strip().lower()
if _requested not in ("", "numba", "numpy"):
    raise ValueError(
        f"SENSEPRIV_BACKEND must be 'numba' or 'numpy', got {_requested!r}"
    )

if _requested == "numpy":
    from sensepriv.kernels import _numpy as _impl

    BACKEND = "numpy"
else:
    try:
        from sensepriv.kernels import _numba as _impl

        BACKEND = "numba"
    except ImportError:
        if _requested == "numba":
            raise
        from sensepriv.kernels import _numpy as _impl

        BACKEND = "numpy"

sq_dists = _impl.sq_dists
argmin_tiebreak = _impl.argmin_tiebreak
batch_project = _impl.batch_project
cw_round = _impl.cw_round
mean_pairwise_dist = _impl.mean_pairwise_dist


def backend() -> str:
    """Name of the active kernel backend."""
    return BACKEND
