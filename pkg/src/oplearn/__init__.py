"""Operator learning for PDEs on unbounded domains from manufactured training data.

The package builds closed-form solution families for a target PDE, manufactures
matched (initial value, source, solution) triples from them, filters the
candidates against the target problem, trains a multi-input operator network
on the accepted data, and predicts/evaluates the solution on a bounded domain
of interest.
"""

import os as _os

# OpenBLAS sizes its pool from /proc/cpuinfo, which inside a cgroup can be far
# larger than the schedulable core count; the resulting oversubscription slows
# float64 GEMM by >10x.  Pin the pool to the real affinity before numpy loads.
if "numpy" not in __import__("sys").modules:
    _n = str(len(_os.sched_getaffinity(0)))
    for _var in ("OPENBLAS_NUM_THREADS", "OMP_NUM_THREADS", "MKL_NUM_THREADS"):
        _os.environ.setdefault(_var, _n)

__version__ = "0.1.0"

from . import taylor  # noqa: E402
from . import nn  # noqa: E402
from . import mionet  # noqa: E402
from . import families  # noqa: E402
from . import operators  # noqa: E402
from . import config  # noqa: E402
from . import datagen  # noqa: E402

__all__ = [
    "taylor",
    "nn",
    "mionet",
    "families",
    "operators",
    "config",
    "datagen",
    "__version__",
]
