"""Kernel backend selection.

The hot CSR loops exist twice: a Cython extension (``_ckern``) and a NumPy
fallback (``_numpy``). The compiled backend is preferred when importable.
Override with the environment variable ``COLDLP_KERNELS``:

* ``auto`` (default): compiled if available, else NumPy;
* ``c``: compiled, raise if the extension is missing;
* ``numpy``: always the fallback.

Both backends implement ``neighbor_sum``, ``neighbor_weighted_sum`` and
``intersection_weight_sum`` with identical contracts. Results agree to
floating-point roundoff but not necessarily bitwise (summation order may
differ), so a single process always sticks to one backend.
"""

import os

from . import _numpy

_choice = os.environ.get("COLDLP_KERNELS", "auto").lower()
if _choice not in ("auto", "c", "numpy"):
    raise ValueError(f"COLDLP_KERNELS must be auto|c|numpy, got {_choice!r}")

if _choice == "numpy":
    _impl = _numpy
    BACKEND = "numpy"
else:
    try:
        from . import _ckern as _impl  # type: ignore[no-redef]

        BACKEND = "c"
    except ImportError:
        if _choice == "c":
            raise ImportError(
                "COLDLP_KERNELS=c but the compiled extension is not built; "
                "reinstall with a C compiler or set COLDLP_KERNELS=numpy"
            )
        _impl = _numpy
        BACKEND = "numpy"

neighbor_sum = _impl.neighbor_sum
neighbor_weighted_sum = _impl.neighbor_weighted_sum
intersection_weight_sum = _impl.intersection_weight_sum

__all__ = [
    "BACKEND",
    "neighbor_sum",
    "neighbor_weighted_sum",
    "intersection_weight_sum",
]
