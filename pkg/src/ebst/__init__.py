"""Exact-up-to-tolerance solver for Euclidean bottleneck Steiner trees with k Steiner points."""

__version__ = "0.1.0"

from .topology import InputError, Instance  # noqa: E402
from .solver import SolveResult, decide_lambda, optimize  # noqa: E402
from .oracle import bottleneck_spanning_value, brute_force_opt  # noqa: E402

__all__ = [
    "InputError",
    "Instance",
    "SolveResult",
    "bottleneck_spanning_value",
    "brute_force_opt",
    "decide_lambda",
    "optimize",
]
