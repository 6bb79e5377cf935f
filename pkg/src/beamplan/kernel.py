"""Search-kernel backend selection.

The compiled Cython kernel is preferred when it was built; the pure-Python
twin is the fallback.  Set BEAMPLAN_PURE_PYTHON=1 to force the fallback
(used by the parity tests and the kernel benchmark).
"""

from __future__ import annotations

import os

from . import _kernel_py

if os.environ.get("BEAMPLAN_PURE_PYTHON"):
    backend = _kernel_py
    BACKEND_NAME = "python"
else:
    try:
        from . import _kernel_cy as backend  # type: ignore[attr-defined]

        BACKEND_NAME = "compiled"
    except ImportError:
        backend = _kernel_py
        BACKEND_NAME = "python"

FOUND = _kernel_py.FOUND
INFEASIBLE = _kernel_py.INFEASIBLE
TIMEOUT = _kernel_py.TIMEOUT
BUDGET = _kernel_py.BUDGET

unconstrained_search = backend.unconstrained_search


def constrained_search(residuals, adjacency_masks, n_max, k, clique_masks=(),
                       deadline_ns=None, node_budget=None, relax_depth=7):
    """Dispatch to the active backend.

    The compiled kernel packs beam sets in 64-bit masks; wider instances
    run on the Python kernel (arbitrary-precision masks).
    """
    impl = backend
    if len(residuals) > 64:
        impl = _kernel_py
    return impl.constrained_search(
        residuals, adjacency_masks, n_max, k, clique_masks,
        deadline_ns, node_budget, relax_depth,
    )
