"""Command-line entry point: ``ebst solve|decide|oracle|check``.

Exit status: 0 on success or a feasible decision, 2 on an infeasible
decision, 1 on errors (including a solver/oracle disagreement in ``check``).
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from dataclasses import dataclass, field

from . import __version__
from .geom import GeometryError
from .grid import MAX_EPS
from .minkowski import lambda_decompose, minkowski_unit_disk
from .oracle import OracleConfig, OracleSizeError, brute_force_report
from .solver import SolveResult, Solver
from .svg import regions_svg, scale_domain, tree_svg
from .topology import InputError, Instance

log = logging.getLogger("ebst")

EXIT_OK, EXIT_ERROR, EXIT_INFEASIBLE = 0, 1, 2
MIN_LAMBDA_PIECES = 10


@dataclass
class RunReport:
    result: SolveResult | None
    timings_ms: dict = field(default_factory=dict)
    counters: dict = field(default_factory=dict)


def sig(x: float) -> float:
    """Round to 9 significant digits."""
    return float(f"{x:.9g}")


def read_points(text: str) -> list[tuple[float, float]]:
    pts = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise InputError(f"line {lineno}: expected two numbers, got {raw!r}")
        try:
            x, y = float(parts[0]), float(parts[1])
        except ValueError:
            raise InputError(f"line {lineno}: not a number in {raw!r}") from None
        pts.append((x, y))
    return pts


def result_json(res: SolveResult, report: RunReport | None = None) -> dict:
    out = {
        "bottleneck": sig(res.bottleneck),
        "steiner_points": [[sig(p.x), sig(p.y)] for p in res.steiner_points],
        "edges": [list(e) for e in res.edges],
        "k_used": res.k_used,
        "K": res.K,
        "deviation_note": res.deviation_note,
        "counters": res.counters.as_dict(),
        "topology_id": res.topology_id,
    }
    if report is not None:
        out["timings_ms"] = {k: sig(v) for k, v in report.timings_ms.items()}
    return out


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ebst", description="Euclidean bottleneck Steiner trees with k Steiner points.")
    p.add_argument("--version", action="version", version=f"ebst {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, with_input=True):
        if with_input:
            sp.add_argument("input", nargs="?", default="-", help="point file, one 'x y' per line ('-' for stdin)")
        sp.add_argument("--k", type=int, required=True, help="Steiner point budget")
        sp.add_argument("--random", type=int, metavar="N", help="ignore input and use N seeded random points in [0,5]^2")
        sp.add_argument("--seed", type=int, default=0, help="seed for --random")
        sp.add_argument("--output", "-o", help="write JSON here instead of stdout")
        sp.add_argument("-v", "--verbose", action="store_true")

    def solver_flags(sp):
        sp.add_argument("--epsilon", type=float, default=MAX_EPS, help="grid cell side (capped at 0.1)")
        sp.add_argument("--lambda-pieces", type=int, default=MIN_LAMBDA_PIECES, help="rays used for region figures (>= 10)")
        sp.add_argument("--parallel", type=int, default=1, help="worker processes for the topology search")
        sp.add_argument("--strategy", choices=["dp", "enumerate"], default="dp")
        sp.add_argument("--svg", help="write the tree as SVG")
        sp.add_argument("--regions-svg", help="write the feasible regions of the winning guess as SVG")

    s = sub.add_parser("solve", help="optimize the bottleneck")
    common(s)
    solver_flags(s)
    s.add_argument("--tol", type=float, default=1e-6, help="relative tolerance of the binary search")

    d = sub.add_parser("decide", help="decide feasibility at a given lambda")
    common(d)
    solver_flags(d)
    d.add_argument("--lambda", dest="lam", type=float, required=True)

    o = sub.add_parser("oracle", help="brute-force grid optimum")
    common(o)
    o.add_argument("--resolution", type=float, default=0.01)

    c = sub.add_parser("check", help="run solve and oracle and compare")
    common(c)
    solver_flags(c)
    c.add_argument("--tol", type=float, default=1e-6)
    c.add_argument("--resolution", type=float, default=0.01)
    return p


def _load(args) -> Instance:
    if args.random is not None:
        from .generators import random_points

        pts = random_points(args.random, args.seed)
    elif args.input == "-":
        pts = read_points(sys.stdin.read())
    else:
        with open(args.input, encoding="utf-8") as fh:
            pts = read_points(fh.read())
    return Instance(pts, args.k)


def _check_solver_flags(args) -> None:
    if args.epsilon > MAX_EPS:
        log.warning("epsilon %g capped at %g", args.epsilon, MAX_EPS)
        args.epsilon = MAX_EPS
    if not args.epsilon > 0:
        raise InputError("epsilon must be positive")
    if args.lambda_pieces < MIN_LAMBDA_PIECES:
        raise InputError(f"--lambda-pieces must be at least {MIN_LAMBDA_PIECES}")
    if args.parallel < 1:
        raise InputError("--parallel must be at least 1")


def _emit(args, payload: dict) -> None:
    text = json.dumps(payload, indent=2)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _figures(args, inst: Instance, res: SolveResult) -> None:
    if args.svg:
        with open(args.svg, "w", encoding="utf-8") as fh:
            fh.write(tree_svg(inst.points, [(p.x, p.y) for p in res.steiner_points], res.edges))
    if args.regions_svg:
        regions, outlines, rays = [], [], []
        for f, d in res.regions:
            regions.append(scale_domain(d, f))
            if not d.is_region:
                continue
            # expansion of each region with the rays that cut it into pieces
            m = minkowski_unit_disk(d)
            outlines.append(scale_domain(m, f))
            x0, y0, x1, y1 = d.bbox()
            o = ((x0 + x1) / 2, (y0 + y1) / 2)
            try:
                dec = lambda_decompose(m, o, args.lambda_pieces)
            except GeometryError as exc:
                log.debug("lambda decomposition skipped: %s", exc)
                continue
            rays += [((o[0] * f, o[1] * f), (p.x * f, p.y * f)) for p in dec.ray_hits]
        with open(args.regions_svg, "w", encoding="utf-8") as fh:
            fh.write(regions_svg(inst.points, regions, outlines, rays))


def _solver(args, inst: Instance) -> tuple[Solver, float]:
    t0 = time.perf_counter()
    s = Solver(inst, eps=args.epsilon, strategy=args.strategy, workers=args.parallel)
    return s, (time.perf_counter() - t0) * 1e3


def cmd_solve(args) -> int:
    inst = _load(args)
    _check_solver_flags(args)
    if not args.tol > 0:
        raise InputError("--tol must be positive")
    s, t_mst = _solver(args, inst)
    t0 = time.perf_counter()
    res = s.optimize(args.tol)
    report = RunReport(res, {"mst": t_mst, "search": (time.perf_counter() - t0) * 1e3}, res.counters.as_dict())
    _figures(args, inst, res)
    _emit(args, result_json(res, report))
    return EXIT_OK


def cmd_decide(args) -> int:
    inst = _load(args)
    _check_solver_flags(args)
    if not args.lam > 0:
        raise InputError("--lambda must be positive")
    s, t_mst = _solver(args, inst)
    t0 = time.perf_counter()
    res = s.decide_lambda(args.lam)
    timings = {"mst": t_mst, "decision": (time.perf_counter() - t0) * 1e3}
    if res is None:
        _emit(args, {"feasible": False, "lambda": sig(args.lam), "counters": s.counters.as_dict(),
                     "timings_ms": {k: sig(v) for k, v in timings.items()}})
        return EXIT_INFEASIBLE
    res.counters = s.counters
    _figures(args, inst, res)
    payload = {"feasible": True, "lambda": sig(args.lam)}
    payload.update(result_json(res, RunReport(res, timings)))
    _emit(args, payload)
    return EXIT_OK


def _oracle_json(rep, resolution: float) -> dict:
    return {
        "value": sig(rep.value),
        "additive_bound": sig(rep.additive_bound),
        "resolution": resolution,
        "mode": rep.mode,
        "evaluations": rep.evaluations,
        "placements": [[sig(x), sig(y)] for x, y in rep.placements],
    }


def cmd_oracle(args) -> int:
    inst = _load(args)
    rep = brute_force_report(inst.points, inst.k, OracleConfig(grid_resolution=args.resolution))
    _emit(args, _oracle_json(rep, args.resolution))
    return EXIT_OK


def cmd_check(args) -> int:
    inst = _load(args)
    _check_solver_flags(args)
    s, _ = _solver(args, inst)
    res = s.optimize(args.tol)
    rep = brute_force_report(inst.points, inst.k, OracleConfig(grid_resolution=args.resolution))
    tol = 3 * args.resolution + args.tol * res.bottleneck
    diff = res.bottleneck - rep.value
    agree = abs(diff) <= tol
    _emit(args, {
        "agree": agree,
        "solver": sig(res.bottleneck),
        "oracle": sig(rep.value),
        "difference": sig(diff),
        "tolerance": sig(tol),
        "oracle_mode": rep.mode,
    })
    if not agree:
        print("ebst: solver and oracle disagree", file=sys.stderr)
        return EXIT_ERROR
    return EXIT_OK


COMMANDS = {"solve": cmd_solve, "decide": cmd_decide, "oracle": cmd_oracle, "check": cmd_check}


def run(argv=None) -> int:
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors; 2 is reserved for infeasible
        return EXIT_OK if exc.code == 0 else EXIT_ERROR
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="ebst: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (InputError, OracleSizeError, ValueError, OSError) as exc:
        print(f"ebst: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
