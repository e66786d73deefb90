"""Command-line entry points.

Exit codes: 0 success, 2 bad input (malformed files, failed validation,
empty region, unit mismatches), 3 solver-status failures (no feasible
binding set, terminated chains, numerical trouble).
"""

import argparse
import os
import sys
from dataclasses import replace

import numpy as np

from . import diet as diet_mod
from .costs import build_cone, infer_cost
from .errors import (
    AllInfeasibleError,
    EmptyConeError,
    EmptySetError,
    InfeasibleRegionError,
    InverseLearnError,
    MalformedError,
    MissingNutrientError,
    NoPreferredError,
    NotOptimalError,
    NumericalFailureError,
    TooLargeError,
    UnitMismatchError,
    ZeroCostError,
)
from .lp import Agg, DistanceSpec, Norm
from .model import ForwardInstance, ObservationSet, observation_stats, validate_instance
from .serialize import (
    canonical_json,
    cost_document,
    frontier_document,
    solution_document,
    stats_document,
)
from .solvers import (
    DEPENDENT,
    INDEPENDENT,
    DEFAULT_OPTIONS,
    algorithm1,
    solve_bil,
    solve_il,
    solve_mil,
    solve_seq,
    sweep,
)

# errors that mean "your input is bad" rather than "the solver gave up"
_INPUT_ERRORS = (
    MalformedError,
    InfeasibleRegionError,
    UnitMismatchError,
    MissingNutrientError,
    EmptySetError,
    TooLargeError,
)
_SOLVER_ERRORS = (
    AllInfeasibleError,
    EmptyConeError,
    NoPreferredError,
    NotOptimalError,
    NumericalFailureError,
    ZeroCostError,
)


def _read_text(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise MalformedError(f"cannot read {path}: {exc}") from exc


def _write_text(path, text):
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def _load_instance(path):
    return ForwardInstance.from_json(_read_text(path))


def _load_observations(path, inst=None):
    obs = ObservationSet.from_csv(_read_text(path))
    if inst is not None:
        obs.require_match(inst)
    return obs


def _spec(args):
    return DistanceSpec(Norm(args.norm), Agg(args.agg))


def _options(args):
    opts = DEFAULT_OPTIONS
    if getattr(args, "enum_budget", None) is not None:
        opts = replace(opts, enum_budget=args.enum_budget)
    if getattr(args, "big_m_default", None) is not None:
        opts = replace(opts, big_m_default=args.big_m_default)
    if getattr(args, "tolerance", None) is not None:
        opts = replace(opts, tol_feas=args.tolerance, tau_tight=args.tolerance)
    return opts


def _apply_preferred(inst, args):
    if getattr(args, "preferred", None):
        names = []
        for chunk in args.preferred:
            names.extend(s.strip() for s in chunk.split(",") if s.strip())
        return inst.with_preferred(names)
    return inst


def _add_solver_flags(parser):
    parser.add_argument("--norm", choices=[n.value for n in Norm], default="l1")
    parser.add_argument("--agg", choices=[a.value for a in Agg], default="sum")
    parser.add_argument("--enum-budget", type=int, default=None,
                        help="max subsets enumerated before branch-and-bound kicks in")
    parser.add_argument("--big-m-default", type=float, default=None,
                        help="slack bound used when a row's maximum slack is unbounded")
    parser.add_argument("--tolerance", type=float, default=None,
                        help="feasibility/tightness tolerance override")


def cmd_validate(args):
    inst = _load_instance(args.instance)
    report = validate_instance(inst, check_redundancy=not args.no_redundancy_check)
    doc = report.to_dict()
    _write_text(args.out, canonical_json(doc))
    for warning in report.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    return 0


def cmd_solve(args):
    inst = _apply_preferred(_load_instance(args.instance), args)
    obs = _load_observations(args.observations, inst)
    spec = _spec(args)
    opts = _options(args)
    method = args.method
    if method == "bil":
        if args.j is None and args.row is None:
            raise MalformedError("--method bil needs --j or --row")
        j = args.j if args.j is not None else _row_index(inst, args.row)
        sol = solve_bil(inst, obs, spec, j, opts)
    elif method == "alg1":
        sol = algorithm1(inst, obs, spec, opts)
    elif method == "il":
        sol = solve_il(inst, obs, spec, _require_p(args), opts)
    elif method == "seq":
        sol = solve_seq(inst, obs, spec, _require_p(args), opts)
    else:  # mil
        sol = solve_mil(inst, obs, spec, _require_p(args), args.omega1, args.omega2, opts)
    _write_text(args.out, canonical_json(solution_document(sol)))
    if sol.status != "OK":
        print(f"error: solver status {sol.status}", file=sys.stderr)
        return 3
    return 0


def _require_p(args):
    if args.p is None:
        raise MalformedError(f"--method {args.method} needs --p")
    return args.p


def _row_index(inst, name):
    try:
        return list(inst.relevant_names).index(name)
    except ValueError:
        raise MalformedError(f"no relevant row named {name!r}") from None


def cmd_sweep(args):
    inst = _apply_preferred(_load_instance(args.instance), args)
    obs = _load_observations(args.observations, inst)
    spec = _spec(args)
    opts = _options(args)
    mode = DEPENDENT if args.dependent else INDEPENDENT
    weights = (args.omega1, args.omega2) if args.mil else None
    frontier = sweep(inst, obs, spec, args.p_min, args.p_max, mode, weights, opts)
    _write_text(args.out, canonical_json(frontier_document(frontier)))
    if not any(pt.solution is not None and pt.solution.status == "OK" for pt in frontier.points):
        print("error: no sweep point solved to OK", file=sys.stderr)
        return 3
    return 0


def cmd_infer_cost(args):
    inst = _load_instance(args.instance)
    obs = _load_observations(args.observations, inst)
    if args.z is not None:
        z = np.array([float(v) for v in args.z.split(",")])
    else:
        import json

        sol_doc = json.loads(_read_text(args.solution))
        if sol_doc.get("z") is None:
            raise MalformedError("solution file has no point z to build a cone at")
        z = np.array(sol_doc["z"], dtype=float)
    tau = args.tolerance if args.tolerance is not None else DEFAULT_OPTIONS.tau_tight
    cone = build_cone(inst, z, tau)
    inferred = infer_cost(cone, obs)
    _write_text(args.out, canonical_json(cost_document(inferred)))
    return 0


def cmd_stats(args):
    obs = _load_observations(args.observations)
    percentiles = tuple(float(v) for v in args.percentiles.split(","))
    table = observation_stats(obs, percentiles)
    if args.json:
        _write_text(args.out, canonical_json(stats_document(table)))
    else:
        _write_text(args.out, table.to_csv())
    return 0


def cmd_diet_build(args):
    foods = diet_mod.FoodTable.from_csv(_read_text(args.foods))
    bounds = diet_mod.NutrientBounds.from_csv(_read_text(args.bounds))
    inst = diet_mod.build_diet_instance(foods, bounds, serving_cap=args.cap, name=args.name)
    _write_text(args.out, inst.to_json())
    return 0


def cmd_diet_report(args):
    inst = _apply_preferred(_load_instance(args.instance), args)
    obs = _load_observations(args.observations, inst)
    spec = _spec(args)
    opts = _options(args)
    mode = DEPENDENT if args.dependent else INDEPENDENT
    weights = (args.omega1, args.omega2) if args.mil else None
    frontier = sweep(inst, obs, spec, args.p_min, args.p_max, mode, weights, opts)

    bounds = foods = None
    try:
        foods, bounds, _cap = diet_mod.diet_tables_from_instance(inst)
    except InverseLearnError as exc:
        raise MalformedError(
            f"--instance does not look like a diet instance: {exc}"
        ) from exc
    os.makedirs(args.outdir, exist_ok=True)
    report = diet_mod.diet_report(
        frontier, obs, foods, args.outdir, bounds=bounds, instance=inst
    )
    _write_text(
        os.path.join(args.outdir, "frontier.json"),
        canonical_json(frontier_document(frontier)),
    )
    for name in sorted(report.files):
        print(report.files[name])
    if not any(pt.solution is not None and pt.solution.status == "OK" for pt in frontier.points):
        print("error: no sweep point solved to OK", file=sys.stderr)
        return 3
    return 0


def cmd_serve(args):
    import uvicorn

    from .service import create_app

    app = create_app(snapshot_path=args.snapshot)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="invlearn",
        description="Infer optimal decisions and costs for a partially known LP "
        "from observed decisions.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_val = sub.add_parser("validate", help="structural + feasibility checks on an instance")
    p_val.add_argument("--instance", required=True)
    p_val.add_argument("--no-redundancy-check", action="store_true")
    p_val.add_argument("--out", default=None)
    p_val.set_defaults(func=cmd_validate)

    p_solve = sub.add_parser("solve", help="solve one inverse problem")
    p_solve.add_argument("--instance", required=True)
    p_solve.add_argument("--observations", required=True)
    p_solve.add_argument("--method", choices=["bil", "alg1", "il", "seq", "mil"], required=True)
    p_solve.add_argument("--p", type=int, default=None)
    p_solve.add_argument("--j", type=int, default=None, help="relevant row index (bil)")
    p_solve.add_argument("--row", default=None, help="relevant row name (bil)")
    p_solve.add_argument("--omega1", type=float, default=1.0)
    p_solve.add_argument("--omega2", type=float, default=1.0)
    p_solve.add_argument("--preferred", action="append", default=None,
                         help="comma-separated relevant row names; overrides instance flags")
    _add_solver_flags(p_solve)
    p_solve.add_argument("--out", default=None)
    p_solve.set_defaults(func=cmd_solve)

    p_sweep = sub.add_parser("sweep", help="frontier over a range of binding counts")
    p_sweep.add_argument("--instance", required=True)
    p_sweep.add_argument("--observations", required=True)
    p_sweep.add_argument("--p-min", type=int, required=True)
    p_sweep.add_argument("--p-max", type=int, required=True)
    mode = p_sweep.add_mutually_exclusive_group()
    mode.add_argument("--dependent", action="store_true")
    mode.add_argument("--independent", action="store_true")
    p_sweep.add_argument("--mil", action="store_true", help="score subsets with the preference trade-off")
    p_sweep.add_argument("--omega1", type=float, default=1.0)
    p_sweep.add_argument("--omega2", type=float, default=1.0)
    p_sweep.add_argument("--preferred", action="append", default=None)
    _add_solver_flags(p_sweep)
    p_sweep.add_argument("--out", default=None)
    p_sweep.set_defaults(func=cmd_sweep)

    p_cost = sub.add_parser("infer-cost", help="recover a cost vector at a learning point")
    p_cost.add_argument("--instance", required=True)
    p_cost.add_argument("--observations", required=True)
    point = p_cost.add_mutually_exclusive_group(required=True)
    point.add_argument("--z", default=None, help="comma-separated coordinates")
    point.add_argument("--solution", default=None, help="solution JSON file from `solve`")
    p_cost.add_argument("--tolerance", type=float, default=None)
    p_cost.add_argument("--out", default=None)
    p_cost.set_defaults(func=cmd_infer_cost)

    p_stats = sub.add_parser("stats", help="per-variable observation percentiles")
    p_stats.add_argument("--observations", required=True)
    p_stats.add_argument("--percentiles", default="10,25,50,75,90")
    p_stats.add_argument("--json", action="store_true", help="emit JSON instead of CSV")
    p_stats.add_argument("--out", default=None)
    p_stats.set_defaults(func=cmd_stats)

    p_diet = sub.add_parser("diet", help="diet data path")
    diet_sub = p_diet.add_subparsers(dest="diet_command", required=True)

    p_build = diet_sub.add_parser("build", help="foods+bounds CSVs -> instance JSON")
    p_build.add_argument("--foods", required=True)
    p_build.add_argument("--bounds", required=True)
    p_build.add_argument("--cap", type=float, default=diet_mod.DEFAULT_SERVING_CAP)
    p_build.add_argument("--name", default="diet")
    p_build.add_argument("--out", default=None)
    p_build.set_defaults(func=cmd_diet_build)

    p_report = diet_sub.add_parser("report", help="sweep + CSV/SVG report bundle")
    p_report.add_argument("--instance", required=True)
    p_report.add_argument("--observations", required=True)
    p_report.add_argument("--outdir", required=True)
    p_report.add_argument("--p-min", type=int, default=1)
    p_report.add_argument("--p-max", type=int, default=2)
    p_report.add_argument("--dependent", action="store_true")
    p_report.add_argument("--mil", action="store_true")
    p_report.add_argument("--omega1", type=float, default=1.0)
    p_report.add_argument("--omega2", type=float, default=1.0)
    p_report.add_argument("--preferred", action="append", default=None)
    _add_solver_flags(p_report)
    p_report.set_defaults(func=cmd_diet_report)

    p_serve = sub.add_parser("serve", help="run the HTTP service")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument(
        "--port",
        type=int,
        default=int(os.environ.get("INVERSE_LEARN_PORT", "8000")),
    )
    p_serve.add_argument("--snapshot", default=None,
                         help="write the session registry to this file on shutdown")
    p_serve.set_defaults(func=cmd_serve)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _INPUT_ERRORS as exc:
        print(f"error: {exc.code}: {exc}", file=sys.stderr)
        return 2
    except _SOLVER_ERRORS as exc:
        print(f"error: {exc.code}: {exc}", file=sys.stderr)
        return 3
    except InverseLearnError as exc:  # pragma: no cover - future error kinds
        print(f"error: {exc.code}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
