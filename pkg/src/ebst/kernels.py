"""Backend selection for the arc kernels.

The compiled extension is used when it imports; set ``EBST_PURE_PYTHON=1`` to
force the pure-Python fallback (the test suite runs both).
"""
from __future__ import annotations

import os

if os.environ.get("EBST_PURE_PYTHON", "") not in ("", "0"):
    from . import _kernels_py as _impl
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import _kernels_py as _impl

BACKEND: str = _impl.BACKEND

prepare = _impl.prepare
arc_pair_points = _impl.arc_pair_points
arcs_overlap = _impl.arcs_overlap
pair_intersections = _impl.pair_intersections
winding = _impl.winding
winding_many = _impl.winding_many
nearest = _impl.nearest
nearest_many = _impl.nearest_many


def use(backend: str) -> None:
    """Switch backend at runtime ("python" or "cython"); used by tests and benchmarks."""
    global _impl, BACKEND, prepare, arc_pair_points, arcs_overlap, pair_intersections
    global winding, winding_many, nearest, nearest_many
    if backend == "python":
        from . import _kernels_py as impl
    elif backend == "cython":
        from . import _kernels as impl  # type: ignore[attr-defined]
    else:
        raise ValueError(f"unknown backend {backend!r}")
    _impl = impl
    BACKEND = impl.BACKEND
    prepare = impl.prepare
    arc_pair_points = impl.arc_pair_points
    arcs_overlap = impl.arcs_overlap
    pair_intersections = impl.pair_intersections
    winding = impl.winding
    winding_many = impl.winding_many
    nearest = impl.nearest
    nearest_many = impl.nearest_many
