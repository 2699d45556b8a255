"""Compare the compiled arc kernels with the pure-Python fallback.

    python benchmarks/bench_kernels.py [--repeat N]

Times the hot kernels on fixed inputs and one end-to-end solve per backend,
and checks that both backends agree on every result.
"""
from __future__ import annotations

import argparse
import math
import timeit

import numpy as np

from ebst import kernels
from ebst.domain import disk_union, lens
from ebst.minkowski import minkowski_unit_disk
from ebst.solver import optimize
from ebst.topology import Instance


def inputs():
    a = minkowski_unit_disk(lens((0, 0), (0.07, 0.03)))
    b = disk_union([(0.1, 0.0), (1.0, 0.2), (0.5, 0.9), (-0.4, 0.6), (0.3, -0.7)])
    pts = np.random.default_rng(0).uniform(-2, 2, size=(2000, 2))
    return a, b, pts


def cases(a, b, pts):
    Pa, Pb = kernels.prepare(a.rows), kernels.prepare(b.rows)
    tri = Instance([(0, 0), (2, 0), (1, math.sqrt(3))], 1)
    return {
        "winding_many (2000 pts)": lambda: kernels.winding_many(Pa, pts),
        "nearest_many (2000 pts)": lambda: kernels.nearest_many(Pb, pts),
        "pair_intersections": lambda: kernels.pair_intersections(Pa, Pb, 1e-9),
        "optimize triangle k=1": lambda: optimize(tri, 1e-4).bottleneck,
    }


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    try:
        from ebst import _kernels  # noqa: F401
    except ImportError:
        print("compiled kernels not built; only the Python backend is available")
        return
    a, b, pts = inputs()
    timings, outputs = {}, {}
    for backend in ("python", "cython"):
        kernels.use(backend)
        for name, fn in cases(a, b, pts).items():
            outputs[backend, name] = fn()
            n = 1 if name.startswith("optimize") else args.repeat
            timings[backend, name] = min(timeit.repeat(fn, number=1, repeat=n))
    print(f"{'kernel':28s} {'python ms':>11s} {'cython ms':>11s} {'speedup':>8s}  agree")
    for name in cases(a, b, pts):
        tp, tc = timings["python", name], timings["cython", name]
        op, oc = outputs["python", name], outputs["cython", name]
        if isinstance(op, float):
            same = abs(op - oc) <= 1e-9 * op
        elif isinstance(op, list):
            same = len(op) == len(oc)
        else:
            same = all(np.allclose(np.asarray(x), np.asarray(y), atol=1e-12) for x, y in zip(op, oc)) if isinstance(op, tuple) else np.array_equal(np.asarray(op), np.asarray(oc))
        print(f"{name:28s} {tp * 1e3:11.2f} {tc * 1e3:11.2f} {tp / tc:7.1f}x  {same}")


if __name__ == "__main__":
    main()
