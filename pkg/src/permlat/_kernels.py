"""Backend dispatch for the Z/p^k row-reduction kernels.

The environment flag PERMLAT_KERNELS selects the implementation:

    PERMLAT_KERNELS=numba   numba @njit kernels (default when importable)
    PERMLAT_KERNELS=numpy   pure-numpy fallback

Both backends produce bit-identical output; ``benchmarks/bench_kernels.py``
compares their speed.
"""

import os
import warnings

_requested = os.environ.get("PERMLAT_KERNELS", "").strip().lower()

if _requested not in ("", "numba", "numpy"):
    warnings.warn(f"unknown PERMLAT_KERNELS={_requested!r}, using numpy")
    _requested = "numpy"

if _requested in ("", "numba"):
    try:
        from . import _kernels_numba as _impl

        BACKEND = "numba"
    except ImportError:
        if _requested == "numba":
            warnings.warn("numba unavailable, falling back to numpy kernels")
        from . import _kernels_numpy as _impl

        BACKEND = "numpy"
else:
    from . import _kernels_numpy as _impl

    BACKEND = "numpy"

MAX_MODULUS = _impl.MAX_MODULUS
diagonalize_mod = _impl.diagonalize_mod
howell_mod = _impl.howell_mod
