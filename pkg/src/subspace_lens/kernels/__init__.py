"""Backend selection for the hot numeric kernels.

The env var SUBSPACE_LENS_NUMBA picks the implementation:
  "1"          force the numba backend (ImportError if numba is missing)
  "0"          force the pure-numpy backend
  unset/"auto" numba when importable, numpy otherwise

``benchmarks/bench_kernels.py`` times both backends side by side.
"""

import importlib
import os

from . import numpy_impl

_flag = os.environ.get("SUBSPACE_LENS_NUMBA", "auto").lower()

numba_impl = None
if _flag in ("1", "true", "auto", ""):
    try:
        # importlib sidesteps `from . import`'s attribute-first lookup,
        # which would return the None placeholder above
        numba_impl = importlib.import_module(".numba_impl", __name__)
    except ImportError:
        if _flag in ("1", "true"):
            raise

if numba_impl is not None:
    BACKEND = "numba"
    _impl = numba_impl
else:
    BACKEND = "numpy"
    _impl = numpy_impl

dist_matrix = _impl.dist_matrix
stress_total = _impl.stress_total
stress_gradient = _impl.stress_gradient
guttman_step = _impl.guttman_step
pointwise_blocks = _impl.pointwise_blocks
point_stress = _impl.point_stress
point_gradient = _impl.point_gradient
