"""Command-line front end: ``feeder <subcommand> [options]``.

Tables are written as CSV preceded by ``# meta`` comment lines recording the
tool version, seed and tolerances.  Exit status is 0 on success, 2 when a
solve succeeded but a structural optimality property failed, and 1 on any
operational error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path
from typing import Iterable, Sequence

from . import __version__
from .lp import LpError, Tolerances, read_lp, solve, write_lp
from .network import Instance, InstanceError, instance_document, load_instance
from .oracle import GenerationError, InstanceRecipe, generate, paired_run
from .pricing import check_multileg_conditions, feedin_price_table, best_alt_transport, simple_route_frontier
from .problems import (FULL, REDUCED, FeedInModel, FeedOutModel, FlowSolution,
                       NotOptimalError, build_feedin_lp, build_feedout_lp, build_supplyopt_lp, solve_feedin,
                       solve_feedout, solve_feedout_via_equivalence, solve_supplyopt, verify_optimality_properties)
from .reduction import pruning_stats, reduce_feedin_sets
from .routes import (DEFAULT_CEILING, RouteLimitExceeded, count_service_tuples, enumerate_feedin_routes,
                     enumerate_feedout_routes, route_records)

log = logging.getLogger("feeder")

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_PROPERTY = 2

SOLVE_KINDS = ("feed-in", "supply-opt", "feed-out", "feed-out-via-equivalence")


class CliError(Exception):
    pass


# ---------------------------------------------------------------------------
# output helpers


def parse_grid(text: str) -> list[float]:
    """``"1,2,5"`` or ``"start:stop:step"`` (stop inclusive)."""
    text = text.strip()
    if ":" in text:
        parts = [float(p) for p in text.split(":")]
        if len(parts) != 3 or parts[2] <= 0:
            raise CliError(f"bad grid {text!r}; expected start:stop:step with a positive step")
        start, stop, step = parts
        n = int(math.floor((stop - start) / step + 1e-9)) + 1
        values = [round(start + k * step, 12) for k in range(max(n, 0))]
    else:
        values = [float(p) for p in text.split(",") if p.strip()]
    if not values:
        raise CliError("empty grid")
    if values != sorted(values):
        raise CliError("grid values must be sorted")
    return values


def _meta(args: argparse.Namespace, **extra) -> list[str]:
    fields = {"tool": "feeder", "version": __version__, "command": args.command,
              "seed": getattr(args, "seed", None), "tol": getattr(args, "tol", None)}
    fields.update(extra)
    return [f"# meta {k}={v}" for k, v in fields.items() if v is not None]


def write_table(path: str | None, rows: Iterable[dict], columns: Sequence[str], meta: list[str],
                footer: list[str] = ()) -> None:
    buf = io.StringIO()
    for line in meta:
        buf.write(line + "\n")
    w = csv.DictWriter(buf, fieldnames=list(columns), extrasaction="ignore", lineterminator="\n")
    w.writeheader()
    for row in rows:
        w.writerow({k: _fmt(v) for k, v in row.items()})
    for line in footer:
        buf.write(line + "\n")
    if path is None or path == "-":
        sys.stdout.write(buf.getvalue())
    else:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        Path(path).write_text(buf.getvalue(), encoding="utf-8")


def _fmt(v):
    if isinstance(v, float):
        return repr(v) if math.isfinite(v) else str(v)
    return v


def _tol(args) -> Tolerances:
    if args.tol is None:
        return Tolerances()
    return Tolerances(feas_tol=args.tol, gap_tol=args.tol)


def _instance(args) -> Instance:
    if not args.instance:
        raise CliError("--instance is required")
    return load_instance(Path(args.instance))


# ---------------------------------------------------------------------------
# subcommands


def cmd_routes(args) -> int:
    inst = _instance(args)
    if args.direction == "out":
        routes = enumerate_feedout_routes(inst.network, inst.time_window, args.ceiling)
    else:
        routes = enumerate_feedin_routes(inst.network, inst.time_window, args.ceiling)
    n_vars = len(routes) + count_service_tuples(routes)
    cols = ["id", "nodes", "legs", "time", "cost", "leg_costs"]
    write_table(args.out, route_records(routes), cols, _meta(args, direction=args.direction),
                [f"# routes={len(routes)} variables={n_vars}"])
    print(f"routes={len(routes)} variables={n_vars}", file=sys.stderr)
    return EXIT_OK


def cmd_prune(args) -> int:
    inst = _instance(args)
    model = FeedInModel.build(inst, args.ceiling)
    stats = pruning_stats(model.routes, model.prices)
    keep = {r.rid for r in model.reduced}
    minus = {r.rid for r in model.minus}
    rows = []
    for rec, r in zip(route_records(model.routes), model.routes):
        rec.update(reduced=r.rid in keep, supply_reduced=r.rid in minus)
        rows.append(rec)
    cols = ["id", "nodes", "legs", "time", "cost", "reduced", "supply_reduced"]
    footer = ["# " + " ".join(f"{k}={v}" for k, v in stats.as_dict().items())]
    write_table(args.out, rows, cols, _meta(args), footer)
    print(footer[0][2:], file=sys.stderr)
    return EXIT_OK


def _solution_tables(sol: FlowSolution) -> tuple[list[dict], list[dict]]:
    return list(sol.flow_records()), list(sol.allocation_records())


def _report_solution(args, sol: FlowSolution) -> int:
    if not sol.is_optimal:
        print(f"status={sol.status}", file=sys.stderr)
        return EXIT_ERROR
    diag = verify_optimality_properties(sol)
    cert = sol.lp_solution.certificate
    summary = {"kind": args.kind, "form": sol.form, "status": sol.status, "objective": sol.objective,
               "routes_used": sol.routes_used(), "certified": sol.lp_solution.certified,
               "primal_residual": cert.primal_residual, "dual_residual": cert.dual_residual,
               "duality_gap": cert.duality_gap, "complementarity": cert.complementarity,
               "properties": "pass" if diag.passed else "fail"}
    flows, allocs = _solution_tables(sol)
    meta = _meta(args, kind=args.kind, form=sol.form)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        write_table(str(out / "flows.csv"), flows, ["route", "nodes", "flow"], meta)
        write_table(str(out / "allocations.csv"), allocs, ["route", "leg", "node", "allocation"], meta)
        write_table(str(out / "diagnostics.csv"),
                    [{"property": c.name, "result": ("pass" if c.passed else "fail") if c.applicable else "n/a",
                      "offenders": ";".join(c.offenders)} for c in diag.checks],
                    ["property", "result", "offenders"], meta)
        (out / "summary.json").write_text(json.dumps(summary, indent=2) + "\n", encoding="utf-8")
    print(json.dumps(summary))
    for c in diag.failed():
        print(f"property {c.name} failed: {', '.join(c.offenders[:10])}", file=sys.stderr)
    return EXIT_OK if diag.passed else EXIT_PROPERTY


def _solve_lp_file(args) -> int:
    lp = read_lp(Path(args.lp).read_text(encoding="utf-8"))
    sol = solve(lp, _tol(args))
    rec = {"status": sol.status, "objective": sol.objective if sol.is_optimal else None,
           "iterations": sol.iterations}
    if sol.is_optimal:
        rec["certified"] = sol.certified
    print(json.dumps(rec))
    return EXIT_OK if sol.is_optimal else EXIT_ERROR


def cmd_solve(args) -> int:
    if args.lp:
        return _solve_lp_file(args)
    if args.kind is None:
        raise CliError("--kind is required unless --lp is given")
    inst = _instance(args)
    tol = _tol(args)
    form = args.form
    s = args.supply if args.supply is not None else inst.network.total_demand
    if args.kind == "feed-in":
        model = FeedInModel.build(inst, args.ceiling)
        fi = model.feedin(model.reduced if form == REDUCED else model.routes)
        lp_builder = lambda: build_feedin_lp(fi)  # noqa: E731
        sol = solve_feedin(fi, tol)
        sol.form = form  # the feed-in LP has one shape; the form picks the route set
    elif args.kind == "supply-opt":
        model = FeedInModel.build(inst, args.ceiling)
        so = model.supplyopt(s)
        lp_builder = lambda: build_supplyopt_lp(so, form)  # noqa: E731
        sol = solve_supplyopt(so, form, tol=tol)
    else:
        fo = FeedOutModel.build(inst, args.ceiling).feedout(s)
        if args.kind == "feed-out":
            lp_builder = lambda: build_feedout_lp(fo, form)  # noqa: E731
            sol = solve_feedout(fo, form, tol=tol)
        else:
            lp_builder = None
            sol = solve_feedout_via_equivalence(fo, tol=tol)
    if args.dump_lp:
        lp = sol.lp if lp_builder is None else lp_builder()
        Path(args.dump_lp).write_text(write_lp(lp), encoding="utf-8")
    return _report_solution(args, sol)


def _sweep_b_point(inst: Instance, b: float, ceiling: int) -> dict:
    net, T, alpha = inst.network, inst.time_window, inst.value_of_time
    routes = enumerate_feedin_routes(net, T, ceiling)
    frontier = simple_route_frontier(net, T)
    prices = feedin_price_table(routes, best_alt_transport(net, T, alpha, b, frontier), T)
    stats = pruning_stats(routes, prices)
    sets = reduce_feedin_sets(routes, prices)
    rep = check_multileg_conditions(net, T, alpha, b, reduced=sets.routes)
    row = {"b": b, **stats.as_dict(), "multileg": int(rep.cond_a), "cond_b": int(rep.cond_b),
           "cond_c": int(rep.cond_c), "cond_d": int(rep.cond_d)}
    for l, v in rep.thresholds.items():
        row[f"b_star_{l}"] = v if v is not None else ""
    return row


def _map(fn, items, workers: int):
    if workers <= 1:
        return [fn(*it) for it in items]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, *zip(*items)))


def cmd_sweep_b(args) -> int:
    inst = _instance(args)
    grid = parse_grid(args.grid or "1.0:3.0:0.5")
    rows = _map(_sweep_b_point, [(inst.with_cost_factor(b), b, args.ceiling) for b in grid], args.workers)
    nodes = [l for l in inst.network.nodes if l != inst.network.interchange]
    cols = ["b", "R", "R_bar", "R1", "R2", "R_minus", "multileg", "cond_b", "cond_c", "cond_d"]
    cols += [f"b_star_{l}" for l in nodes]
    write_table(args.out, rows, cols, _meta(args, grid=args.grid))
    return EXIT_OK


def _sweep_s_point(inst: Instance, s: float, form: str, vrp: bool, ceiling: int, tol: Tolerances) -> dict:
    model = FeedInModel.build(inst, ceiling)
    sol = solve_supplyopt(model.supplyopt(s), form, tol=tol)
    if not sol.is_optimal:
        raise CliError(f"supply problem at s={s} ended with status {sol.status}")
    diag = verify_optimality_properties(sol)
    row = {"s": s, "J": sol.objective, "routes_used": sol.routes_used(),
           "certified": int(sol.lp_solution.certified), "properties": "pass" if diag.passed else "fail"}
    if vrp:
        net = inst.network
        depot = replace(net, supply={net.interchange: s})
        vmodel = FeedInModel.build(inst.with_network(depot), ceiling)
        vsol = solve_feedin(vmodel.feedin(vmodel.reduced), tol)
        row["J_vrp"] = vsol.objective
        row["routes_used_vrp"] = vsol.routes_used()
    return row


def cmd_sweep_s(args) -> int:
    inst = _instance(args)
    if inst.network.total_demand > 0:
        default = f"0:{inst.network.total_demand * 2}:{inst.network.total_demand / 5}"
    else:
        default = "0"
    grid = parse_grid(args.grid or default)
    tol = _tol(args)
    items = [(inst, s, args.form, args.vrp_baseline, args.ceiling, tol) for s in grid]
    rows = _map(_sweep_s_point, items, args.workers)
    j_max = FeedInModel.build(inst, args.ceiling).j_max()
    cols = ["s", "J", "routes_used", "certified", "properties"]
    if args.vrp_baseline:
        cols += ["J_vrp", "routes_used_vrp"]
    write_table(args.out, rows, cols, _meta(args, grid=args.grid, form=args.form), [f"# J_max={j_max!r}"])
    return EXIT_OK if all(r["properties"] == "pass" for r in rows) else EXIT_PROPERTY


def cmd_gen(args) -> int:
    recipe = InstanceRecipe(seed=args.seed if args.seed is not None else 0, n_nodes=args.nodes,
                            edge_density=args.density, price_mode=args.price_mode,
                            cost_factor=args.cost_factor, value_of_time=args.alpha)
    inst = generate(recipe)
    text = json.dumps(instance_document(inst), indent=2) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_verify(args) -> int:
    if args.instance:
        cases = [(args.seed if args.seed is not None else -1, _instance(args))]
    else:
        first = args.seed if args.seed is not None else 0
        cases = [(sd, generate(InstanceRecipe(seed=sd))) for sd in range(first, first + args.count)]
    rows = []
    for seed, inst in cases:
        rows.extend(paired_run(inst, seed))
    recs = []
    for r in rows:
        recs.append({"seed": r.seed, "kind": r.kind, "routes": r.routes, "reference": r.reference,
                     "primary": r.primary, "deviation": r.deviation, "guarded": int(r.guarded),
                     "properties": "fail" if "FAIL" in r.properties.values() else "pass"})
    tol = args.tol if args.tol is not None else 1e-9
    worst = max((r.deviation for r in rows if r.deviation is not None), default=0.0)
    write_table(args.out, recs, ["seed", "kind", "routes", "reference", "primary", "deviation", "guarded",
                                 "properties"], _meta(args), [f"# max_deviation={worst!r}"])
    ok = worst <= tol and all(r["properties"] == "pass" for r in recs)
    return EXIT_OK if ok else EXIT_PROPERTY


# ---------------------------------------------------------------------------
# entry point


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="feeder", description="Feeder-service route enumeration, pruning and LPs.")
    p.add_argument("--version", action="version", version=f"feeder {__version__}")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, instance=True):
        if instance:
            sp.add_argument("--instance", help="instance JSON file")
        sp.add_argument("--out", help="output file (or directory for solve); stdout if omitted")
        sp.add_argument("--tol", type=float, help="feasibility and duality-gap tolerance")
        sp.add_argument("--ceiling", type=int, default=DEFAULT_CEILING, help="maximum number of routes")
        sp.add_argument("--seed", type=int)
        return sp

    sp = common(sub.add_parser("routes", help="enumerate routes"))
    sp.add_argument("--direction", choices=("in", "out"), default="in")
    sp.set_defaults(func=cmd_routes)

    sp = common(sub.add_parser("prune", help="reduced route sets and pruning statistics"))
    sp.set_defaults(func=cmd_prune)

    sp = common(sub.add_parser("solve", help="solve one problem and check optimality properties"))
    sp.add_argument("--kind", choices=SOLVE_KINDS)
    sp.add_argument("--form", choices=(FULL, REDUCED), default=REDUCED)
    sp.add_argument("--supply", type=float, help="total supply (default: total demand)")
    sp.add_argument("--lp", help="solve an LP text file instead of an instance")
    sp.add_argument("--dump-lp", help="write the assembled LP in LP text format")
    sp.set_defaults(func=cmd_solve)

    sp = common(sub.add_parser("sweep-b", help="reduced-set size and viability over cost factors"))
    sp.add_argument("--grid", help="b values: 'a,b,c' or 'start:stop:step'")
    sp.add_argument("--workers", type=int, default=1)
    sp.set_defaults(func=cmd_sweep_b)

    sp = common(sub.add_parser("sweep-s", help="optimal profit over total supply"))
    sp.add_argument("--grid", help="s values: 'a,b,c' or 'start:stop:step'")
    sp.add_argument("--form", choices=(FULL, REDUCED), default=REDUCED)
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--vrp-baseline", action="store_true", help="also solve with all supply at the interchange")
    sp.set_defaults(func=cmd_sweep_s)

    sp = common(sub.add_parser("gen", help="generate a random instance"), instance=False)
    sp.add_argument("--nodes", type=int, default=4)
    sp.add_argument("--density", type=float, default=0.5)
    sp.add_argument("--price-mode", choices=("b", "explicit"), default="b")
    sp.add_argument("--cost-factor", type=float, default=2.5)
    sp.add_argument("--alpha", type=float, default=1.0)
    sp.set_defaults(func=cmd_gen)

    sp = common(sub.add_parser("verify", help="compare the pipeline with the exact reference"))
    sp.add_argument("--count", type=int, default=10, help="number of generated instances when no --instance")
    sp.set_defaults(func=cmd_verify)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (CliError, InstanceError, RouteLimitExceeded, LpError, GenerationError, NotOptimalError,
            OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
