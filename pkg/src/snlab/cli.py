"""Batch command-line surface: every analysis with file-based, reproducible IO.

Every run echoes its effective configuration into the output payload, all
collections are canonically ordered, and nothing wall-clock-dependent is
emitted, so identical invocations produce byte-identical outputs.  Exit
codes: 0 success, 2 precondition/parse problems, 3 exhausted budgets.
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import embeddability, io as snio, isoperimetry, metric_graph, zoo, zoom
from .errors import (
    BudgetExceededError,
    FileFormatError,
    MetricViolationError,
    PreconditionError,
    SnlabError,
)
from .exact import format_number, parse_number
from .spaces import discrete_neighborhood


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="snlab",
        description="isoperimetric and amenability invariants of locally finite spaces",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--output", default="-", help="output path, '-' for stdout")
        p.add_argument("--format", choices=("json", "csv"), default="json")
        p.add_argument("--emit", choices=("plot-data",), default=None,
                       help="also write a two-column plot CSV next to --output")
        p.add_argument("--config", default=None,
                       help="JSON file with defaults (flags take precedence)")
        p.add_argument("--jobs", type=int, default=1)

    def space_opts(p):
        p.add_argument("--space", default=None, help="zoo space kind (see `snlab zoo list`)")
        p.add_argument("--file", default=None, help="weighted-graph or finite-metric file")
        p.add_argument("--dim", type=int, default=None)
        p.add_argument("--rank", type=int, default=None)
        p.add_argument("--degree", type=int, default=None)
        p.add_argument("--branching", type=int, default=None)
        p.add_argument("--weight-base", default=None)
        p.add_argument("--box-family", default=None,
                       help="box-space family: cycles or random-regular")
        p.add_argument("--count", type=int, default=None)
        p.add_argument("--graph-degree", type=int, default=None)
        p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("zoo", help="zoo utilities")
    p.add_argument("action", choices=("list",))
    common(p)

    p = sub.add_parser("validate-graph", help="check the path-compatibility conditions")
    p.add_argument("--file", required=True)
    p.add_argument("--hop-budget", type=int, default=None)
    common(p)

    p = sub.add_parser("profile", help="isoperimetric quotient sequences")
    space_opts(p)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--family", choices=("nested",), default="nested")
    p.add_argument("--n-max", type=int, default=50)
    p.add_argument("--seed-point", default=None)
    common(p)

    p = sub.add_parser("sn-search", help="small-neighborhood witness search")
    space_opts(p)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--epsilon", default="1/100")
    p.add_argument("--max-steps", type=int, default=400)
    p.add_argument("--budget", type=int, default=200000,
                   help="largest candidate set size")
    common(p)

    p = sub.add_parser("amenability", help="closed-neighborhood or Folner test")
    space_opts(p)
    p.add_argument("--test", choices=("cgh", "bw"), required=True)
    p.add_argument("--k", default="1", help="neighborhood parameter (cgh)")
    p.add_argument("--factor", default="2", help="witness factor (cgh)")
    p.add_argument("--r", default="2", help="boundary radius (bw)")
    p.add_argument("--delta", default="1/10", help="boundary ratio target (bw)")
    p.add_argument("--max-steps", type=int, default=300)
    p.add_argument("--budget", type=int, default=100000)
    p.add_argument("--window-radius", type=int, default=None,
                   help="exhaustive search over the ball of this radius")
    common(p)

    p = sub.add_parser("tripod", help="constructive tripod search")
    space_opts(p)
    p.add_argument("--root", default=None)
    p.add_argument("--budget", type=int, default=6)
    p.add_argument("--window-radius", type=int, default=None,
                   help="hop radius of the materialized window (zoo spaces)")
    common(p)

    p = sub.add_parser("embed-check", help="Hilbert embeddability certificate")
    p.add_argument("--file", required=True)
    p.add_argument("--tolerance", type=float, default=1e-8)
    common(p)

    p = sub.add_parser("doubling", help="covering/packing estimates for B(x, 2t)")
    space_opts(p)
    p.add_argument("--point", default=None)
    p.add_argument("--t", required=True)
    common(p)

    p = sub.add_parser("growth-profile", help="growth radii of the ball around a point")
    space_opts(p)
    p.add_argument("--point", default=None)
    p.add_argument("--horizon", type=int, default=30)
    common(p)

    p = sub.add_parser("ubg", help="uniform bounded geometry sampling")
    space_opts(p)
    p.add_argument("--radii", default="1,2,4", help="comma-separated radii")
    p.add_argument("--points", default=None, help="comma-separated point labels")
    p.add_argument("--sample", type=int, default=5,
                   help="number of canonical sample points when --points is absent")
    common(p)

    p = sub.add_parser("sn-vs-doubling", help="expansion vs covering per dyadic band")
    space_opts(p)
    p.add_argument("--point", default=None)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--r-min", type=int, default=0)
    p.add_argument("--r-max", type=int, default=3)
    common(p)

    p = sub.add_parser("zoom", help="zoom constants around a point")
    space_opts(p)
    p.add_argument("--point", default=None)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--horizon", type=int, default=20)
    p.add_argument("--tail", type=int, default=None)
    common(p)

    p = sub.add_parser("growth-classify", help="polynomial vs exponential growth")
    space_opts(p)
    p.add_argument("--horizon", type=int, default=20)
    common(p)

    return parser


def _apply_config(args):
    if getattr(args, "config", None):
        try:
            overrides = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise FileFormatError(args.config, f"bad config file: {exc}") from exc
        for key, value in overrides.items():
            attr = key.replace("-", "_")
            if hasattr(args, attr) and getattr(args, attr) is None:
                setattr(args, attr, value)


def _build_space(args):
    if getattr(args, "file", None):
        if getattr(args, "space", None):
            raise PreconditionError("give either --space or --file, not both")
        return snio.load_space(args.file)
    kind = getattr(args, "space", None)
    if not kind:
        raise PreconditionError("a space is required: --space KIND or --file PATH")
    params = {}
    for name in ("dim", "rank", "degree", "branching", "count"):
        value = getattr(args, name, None)
        if value is not None:
            params[name] = value
    if getattr(args, "weight_base", None) is not None:
        params["weight_base"] = parse_number(str(args.weight_base))
    if getattr(args, "box_family", None) is not None:
        params["family"] = args.box_family
    if getattr(args, "graph_degree", None) is not None:
        params["degree"] = args.graph_degree
    if kind == "box-space":
        params["seed"] = getattr(args, "seed", 0)
    return zoo.make_space(kind, **params)


def _resolve_point(space, label):
    if label is None:
        if space.base_point is None:
            raise PreconditionError(f"space {space.id!r} has no default point")
        return space.base_point
    return space.parse_point(label)




def _record_row(rec, estimate=None):
    return {
        "k": rec.k,
        "set_size": rec.set_size,
        "boundary_size": rec.boundary_size,
        "quotient": rec.quotient,
        "witness": rec.witness,
        "direction": estimate.direction if estimate else isoperimetry.DIRECTION_UPPER,
        "certified": estimate.certified if estimate else False,
        "window": estimate.window if estimate else "",
    }


RECORD_FIELDS = ["k", "set_size", "boundary_size", "quotient", "witness",
                 "direction", "certified", "window"]


# -- command handlers -----------------------------------------------------------


def _cmd_zoo(args):
    rows = zoo.zoo_catalog()
    return {"kinds": rows}, rows, ["kind", "params", "description"], None


def _cmd_validate_graph(args):
    graph = snio.load_weighted_graph(args.file)
    report = metric_graph.validate_metric_graph(graph, args.hop_budget)
    payload = {
        "graph": graph.id,
        "vertices": len(graph.vertices),
        "report": report,
    }
    row = {
        "graph": graph.id,
        "condition1_ok": report.condition1_ok,
        "condition2_ok": report.condition2_ok,
        "hop_budget": report.hop_budget,
        "method": report.method,
    }
    return payload, [row], list(row), None


def _cmd_profile(args):
    space = _build_space(args)
    seed = _resolve_point(space, args.seed_point)
    records = []
    for n in range(args.n_max + 1):
        ball = discrete_neighborhood(space, {seed}, n)
        records.append(isoperimetry.k_quotient(space, ball.dn, args.k))
        if ball.levels_used.exhausted:
            break
    window = f"nested balls around {space.point_label(seed)}, n <= {args.n_max}"
    rows = [_record_row(r) | {"window": window} for r in records]
    payload = {"space": space.id, "k": args.k, "window": window, "records": records}
    plot = [(r.set_size, float(r.quotient)) for r in records]
    return payload, rows, RECORD_FIELDS, plot


def _cmd_sn_search(args):
    space = _build_space(args)
    epsilon = parse_number(str(args.epsilon))
    result = isoperimetry.sn_witness_search(
        space, args.k, epsilon, max_steps=args.max_steps, max_points=args.budget)
    rows = [_record_row(r) | {"window": "sn-search"} for r in result.records]
    plot = [(r.set_size, float(r.quotient)) for r in result.records]
    return {"space": space.id, "result": result}, rows, RECORD_FIELDS, plot


def _cmd_amenability(args):
    space = _build_space(args)
    window = None
    if args.window_radius is not None:
        window = space.enumerate_within({space.base_point}, args.window_radius)
    if args.test == "cgh":
        result = isoperimetry.amenability_cgh_test(
            space, parse_number(str(args.k)), factor=parse_number(str(args.factor)),
            max_steps=args.max_steps, max_points=args.budget, window=window)
        row = {
            "test": "cgh", "k": args.k, "verdict": result.verdict,
            "witness_size": result.witness_size,
            "neighborhood_size": result.neighborhood_size,
            "certified_disproof": result.certified_disproof,
        }
    else:
        lattice = isoperimetry.identity_lattice(space)
        result = isoperimetry.amenability_bw_test(
            space, lattice, parse_number(str(args.r)), parse_number(str(args.delta)),
            max_steps=args.max_steps, max_points=args.budget, window=window)
        row = {
            "test": "bw", "r": args.r, "delta": args.delta,
            "verdict": result.verdict, "witness_size": result.witness_size,
            "boundary_size": result.boundary_size,
            "certified_disproof": result.certified_disproof,
        }
    return {"space": space.id, "result": result}, [row], list(row), None


def _cmd_tripod(args):
    if args.file:
        graph = snio.load_weighted_graph(args.file)
        root = args.root if args.root is not None else graph.vertices[0]
        if root not in graph._index:
            raise PreconditionError(f"unknown root vertex {root!r}")
    else:
        space = _build_space(args)
        radius = args.window_radius if args.window_radius is not None else args.budget + 1
        root_point = _resolve_point(space, args.root)
        graph = zoo.graph_window(space, root_point, radius)
        root = space.point_label(root_point)
    witness = metric_graph.find_tripod(graph, root, args.budget)
    if witness is None:
        payload = {"graph": graph.id, "witness": None,
                   "note": "no tripod within budget; not a disproof"}
        row = {"found": False, "kind": None, "center": None, "arms": None}
    else:
        ok = metric_graph.verify_tripod_witness(graph, witness)
        payload = {"graph": graph.id, "witness": witness, "predicate_check": ok}
        row = {"found": True, "kind": witness.kind, "center": str(witness.center),
               "arms": [str(a) for a in witness.arms]}
    return payload, [row], list(row), None


def _cmd_embed_check(args):
    space = snio.load_finite_metric(args.file)
    result = embeddability.schoenberg_test_space(space, tolerance=args.tolerance)
    row = {
        "file": args.file, "verdict": result.verdict,
        "min_eigenvalue": result.min_eigenvalue, "exact_check": result.exact_check,
    }
    return {"result": result}, [row], list(row), None


def _cmd_doubling(args):
    space = _build_space(args)
    x = _resolve_point(space, args.point)
    est = embeddability.covering_estimate(space, x, parse_number(str(args.t)))
    row = {
        "center": est.center, "t": args.t,
        "greedy_cover_size": est.greedy_cover_size,
        "packing_size": est.packing_size, "ball_size": est.ball_size,
    }
    return {"space": space.id, "estimate": est}, [row], list(row), None


def _cmd_growth_profile(args):
    space = _build_space(args)
    x = _resolve_point(space, args.point)
    profile = embeddability.ball_growth_profile(space, x, args.horizon)
    rows = [
        {"n": n, "radius": r, "count": c}
        for n, (r, c) in enumerate(zip(profile.radii, profile.counts), start=1)
    ]
    plot = [(float(r), c) for r, c in zip(profile.radii, profile.counts)]
    return ({"space": space.id, "profile": profile}, rows,
            ["n", "radius", "count"], plot)


def _cmd_ubg(args):
    space = _build_space(args)
    radii = [parse_number(s) for s in args.radii.split(",") if s.strip()]
    if args.points:
        pts = [space.parse_point(s.strip()) for s in args.points.split(",")]
    else:
        ball = space.sort_points(space.enumerate_within({space.base_point}, max(radii)))
        pts = ball[: args.sample]
    report = embeddability.ubg_report(space, pts, radii)
    rows = [{"point": p, "r": r, "ball_size": s} for p, r, s in report.rows]
    return ({"space": space.id, "report": report}, rows,
            ["point", "r", "ball_size"], None)


def _cmd_sn_vs_doubling(args):
    space = _build_space(args)
    x = _resolve_point(space, args.point)
    report = embeddability.sn_vs_doubling_report(
        space, x, range(args.r_min, args.r_max + 1), k=args.k)
    rows = [
        {
            "r": row.r, "band_count": row.band_count,
            "expansion_min": row.expansion_min,
            "k_r_surrogate": row.k_r_surrogate,
            "cover_greedy": row.cover_greedy, "cover_packing": row.cover_packing,
            "next_ball": row.next_ball, "cover_bound": row.cover_bound,
        }
        for row in report.rows
    ]
    plot = [(row.r, row.next_ball) for row in report.rows]
    fields = ["r", "band_count", "expansion_min", "k_r_surrogate",
              "cover_greedy", "cover_packing", "next_ball", "cover_bound"]
    return {"space": space.id, "report": report}, rows, fields, plot


def _cmd_zoom(args):
    space = _build_space(args)
    x = _resolve_point(space, args.point)
    profile = zoom.zoom_profile(space, x, args.k, args.horizon, tail_window=args.tail)
    rows = [
        {
            "n": n,
            "ball_size": profile.sizes[n],
            "ratio": profile.ratios[n - 1],
            "running_inf": profile.running_inf[n - 1],
            "tail_sup": profile.tail_sup,
        }
        for n in range(1, len(profile.sizes))
    ]
    plot = [(n, float(profile.ratios[n - 1])) for n in range(1, len(profile.sizes))]
    return ({"space": space.id, "profile": profile}, rows,
            ["n", "ball_size", "ratio", "running_inf", "tail_sup"], plot)


def _cmd_growth_classify(args):
    space = _build_space(args)
    result = zoom.growth_classify(space, args.horizon)
    rows = [
        {"n": n, "ball_size": size,
         "nth_root": result.nth_roots[n - 1] if n >= 1 else ""}
        for n, size in enumerate(result.ball_sizes)
    ]
    plot = [(n, size) for n, size in enumerate(result.ball_sizes)]
    return ({"space": space.id, "classification": result}, rows,
            ["n", "ball_size", "nth_root"], plot)


HANDLERS = {
    "zoo": _cmd_zoo,
    "validate-graph": _cmd_validate_graph,
    "profile": _cmd_profile,
    "sn-search": _cmd_sn_search,
    "amenability": _cmd_amenability,
    "tripod": _cmd_tripod,
    "embed-check": _cmd_embed_check,
    "doubling": _cmd_doubling,
    "growth-profile": _cmd_growth_profile,
    "ubg": _cmd_ubg,
    "sn-vs-doubling": _cmd_sn_vs_doubling,
    "zoom": _cmd_zoom,
    "growth-classify": _cmd_growth_classify,
}


def _echo_config(args):
    skip = {"command", "output", "format", "emit", "config"}
    echo = {}
    for key, value in sorted(vars(args).items()):
        if key in skip or value is None:
            continue
        echo[key] = value if isinstance(value, (int, float, bool)) else str(value)
    echo["command"] = args.command
    return echo


def _write_output(args, payload, rows, fieldnames, plot):
    echo = _echo_config(args)
    payload = {"config": echo, "results": payload}
    if args.format == "json":
        text = snio.dump_json(payload)
    else:
        # CSV outputs stay self-describing through a config comment line.
        header = "# config " + json.dumps(echo, sort_keys=True) + "\n"
        text = header + snio.dump_csv(rows or [], fieldnames or [])
    if args.output == "-":
        sys.stdout.write(text)
    else:
        Path(args.output).write_text(text)
    if args.emit == "plot-data":
        if plot is None:
            raise PreconditionError(
                f"command {args.command!r} has no plot-data emission")
        if args.output == "-":
            raise PreconditionError("--emit plot-data needs a file --output")
        plot_text = "x,y\n" + "".join(f"{a},{b}\n" for a, b in plot)
        Path(str(args.output) + ".plot.csv").write_text(plot_text)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if not exc.code else 2
    try:
        _apply_config(args)
        handler = HANDLERS[args.command]
        payload, rows, fieldnames, plot = handler(args)
        _write_output(args, payload, rows, fieldnames, plot)
    except BudgetExceededError as exc:
        print(f"snlab: budget exhausted: {exc}", file=sys.stderr)
        return 3
    except (PreconditionError, FileFormatError, MetricViolationError) as exc:
        print(f"snlab: {exc}", file=sys.stderr)
        return 2
    except SnlabError as exc:
        print(f"snlab: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
