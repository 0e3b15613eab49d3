"""Command-line interface: ``tetratsp {generate,opt,lp,ratio,bench,fit}``.

Exit codes: 0 success, 2 precondition or parse error, 3 size guard,
4 external command failure.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import analysis, bench
from .errors import PreconditionError, SizeGuardError
from .instances import (
    DEFAULT_SCALE,
    Family,
    build_modified,
    build_tetrahedron,
    build_three_lines,
)
from .oracle import MAX_HELD_KARP, held_karp_opt
from .subtour import MAX_ENUMERATION_VERTICES, enumerate_subtour_lp, lp_bounds, solve_subtour_lp
from .tours import build_tstar, format_tour, opt_tour_bounds, tour_length
from .tsplib import Metric, TsplibError, export_instance, read_tsplib

EXIT_OK = 0
EXIT_PRECONDITION = 2
EXIT_SIZE_GUARD = 3
EXIT_EXTERNAL = 4


def _fmt(v: float) -> str:
    return f"{v:.10g}"


def _load(args):
    """Instance from a TSPLIB path or from --n/--m (modified tetrahedron)."""
    if getattr(args, "instance", None):
        return read_tsplib(args.instance, scale=args.scale)
    if args.n is None or args.m is None:
        raise PreconditionError("give an instance file or both --n and --m")
    inst = build_modified(args.n, args.m)
    return inst


def cmd_generate(args) -> int:
    fam = Family(args.family)
    if fam is Family.TETRA:
        inst = build_tetrahedron(_need(args.n, "--n"), _need(args.m, "--m"))
    elif fam is Family.TETRA_MODIFIED:
        inst = build_modified(_need(args.n, "--n"), _need(args.m, "--m"))
    elif fam is Family.THREE_LINES:
        inst = build_three_lines(_need(args.n, "--n"), _need(args.d, "--d"))
    else:
        raise PreconditionError(f"cannot generate family {fam.value!r}")
    tf = export_instance(inst, args.scale)
    out = Path(args.out) if args.out else Path(f"{inst.name}.tsp")
    try:
        tf.write(out)
    except OSError as exc:
        raise PreconditionError(f"cannot write {out}: {exc}") from exc
    print(f"file: {out}")
    print(f"N: {inst.n_vertices}")
    if inst.gamma is not None:
        print(f"gamma: {_fmt(inst.gamma)}")
    if inst.i0 is not None:
        print(f"i0: {inst.i0}")
    return EXIT_OK


def _need(v, flag):
    if v is None:
        raise PreconditionError(f"{flag} is required for this family")
    return v


def cmd_opt(args) -> int:
    inst = _load(args)
    if inst.family is Family.TETRA_MODIFIED:
        tour = build_tstar(inst)
        method = "closed form"
    elif inst.n_vertices <= MAX_HELD_KARP:
        tour = held_karp_opt(inst).tour
        method = "Held-Karp"
    else:
        raise SizeGuardError(
            f"no exact path available for an arbitrary instance with {inst.n_vertices} vertices "
            f"(Held-Karp handles at most {MAX_HELD_KARP})"
        )
    exact = tour_length(tour, Metric.EXACT)
    print(f"method: {method}")
    print(f"tour: {format_tour(tour).strip()}")
    print(f"length: {_fmt(exact)}")
    print(f"euc2d_length: {int(tour_length(tour, Metric.EUC2D))}")
    if analysis.closed_form_applies(inst):
        _print_bounds("tour_bounds", exact, opt_tour_bounds(inst.n), inst, args.tolerance)
    return EXIT_OK


def _print_bounds(name, value, interval, inst, tol) -> None:
    lo, hi = interval
    ok = lo - tol <= value <= hi + tol
    note = "" if analysis.bounds_guaranteed(inst) else " (n > 1.5 m: not guaranteed)"
    print(f"{name}: [{_fmt(lo)}, {_fmt(hi)}] {'ok' if ok else 'outside'}{note}")


def cmd_lp(args) -> int:
    inst = _load(args)
    if args.oracle and inst.n_vertices > MAX_ENUMERATION_VERTICES:
        raise SizeGuardError(
            f"--oracle enumerates all subsets and is limited to {MAX_ENUMERATION_VERTICES} vertices"
        )
    res = solve_subtour_lp(inst)
    print(f"lp_value: {_fmt(res.objective)}")
    print(f"cuts: {res.rounds}")
    print(f"pivots: {res.pivots}")
    if analysis.closed_form_applies(inst):
        _print_bounds("lp_bounds", res.objective, lp_bounds(inst.n), inst, args.tolerance)
    if args.oracle:
        ref = enumerate_subtour_lp(inst)
        print(f"enumeration_value: {_fmt(ref)}")
        print(f"difference: {res.objective - ref:.3e}")
    return EXIT_OK


def _int_list(text: str) -> list[int]:
    out: list[int] = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if "-" in part[1:]:
            a, b = part.split("-", 1)
            out.extend(range(int(a), int(b) + 1))
        else:
            out.append(int(part))
    return out


def _ratio_grid(args) -> list[tuple[int, int]]:
    if args.n_values is not None:
        ns = _int_list(args.n_values)
    elif args.n_start is not None:
        stop = args.n_stop if args.n_stop is not None else args.n_start
        ns = list(range(args.n_start, stop + 1, args.n_step))
    else:
        ns = []
    ms = _int_list(args.m_values) if args.m_values else None
    if ms is not None and len(ms) != len(ns):
        raise PreconditionError("--m-values needs one entry per n")
    return [(n, ms[k] if ms else analysis.default_m(n)) for k, n in enumerate(ns)]


def cmd_ratio(args) -> int:
    grid = _ratio_grid(args)
    rows = analysis.convergence_table(grid, args.lp_source, args.tolerance)
    text = analysis.write_csv([r.report for r in rows])
    _emit_csv(text, args.csv_out)
    return EXIT_OK


def _emit_csv(text: str, path) -> None:
    if path:
        Path(path).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_bench(args) -> int:
    cfg = bench.BenchConfig(args.template, tuple(_int_list(args.seeds)), args.repetitions, args.timeout)
    records = bench.run_bench(cfg, args.files)
    _emit_csv(bench.records_csv(records), args.csv_out)
    summaries = bench.summarize(records)
    sys.stdout.write(bench.summary_csv(summaries))
    model = bench.fit_summaries(summaries)
    if model is None:
        print("fit: not enough completed instances (need 3)")
    else:
        print(f"fit: a={model.a:.6g} b={model.b:.8g} rms_log_residual={model.residual:.3g}")
    failed = sum(1 for r in records if not r.ok)
    if failed:
        print(f"failed_or_censored_runs: {failed}")
    return EXIT_OK


def cmd_fit(args) -> int:
    if args.published:
        model = analysis.PUBLISHED_MODEL
    else:
        if not args.points:
            raise PreconditionError("give a CSV of (N, seconds) points or --published")
        try:
            text = Path(args.points).read_text(encoding="utf-8")
        except OSError as exc:
            raise PreconditionError(f"cannot read {args.points}: {exc}") from exc
        model = analysis.fit_runtime_model(bench.read_points_csv(text))
    print(f"a: {model.a:.6g}")
    print(f"b: {model.b:.8g}")
    print(f"rms_log_residual: {model.residual:.3g}")
    for N in args.predict or []:
        s = analysis.predict_runtime(model, N)
        print(f"N={N}: {s:.4g} s = {s / analysis.SECONDS_PER_DAY:.4g} days = "
              f"{s / analysis.SECONDS_PER_YEAR:.4g} years")
    return EXIT_OK


def _global_flags(suppress: bool) -> argparse.ArgumentParser:
    # subcommands accept the global flags too; their defaults are suppressed
    # so that a value given before the subcommand is not overwritten
    def d(v):
        return argparse.SUPPRESS if suppress else v

    g = argparse.ArgumentParser(add_help=False)
    g.add_argument("--scale", type=int, default=d(DEFAULT_SCALE),
                   help=f"TSPLIB coordinate scale factor (default {DEFAULT_SCALE})")
    g.add_argument("--tolerance", type=float, default=d(analysis.BOUND_TOL),
                   help=f"slack for bound checks (default {analysis.BOUND_TOL})")
    g.add_argument("--csv-out", default=d(None), help="write CSV output to this path")
    return g


def build_parser() -> argparse.ArgumentParser:
    top = _global_flags(suppress=False)
    common = _global_flags(suppress=True)

    p = argparse.ArgumentParser(prog="tetratsp", parents=[top],
                                description="Hard TSP instances, their optimum tours and subtour LP bounds.")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", parents=[common], help="write a TSPLIB instance")
    g.add_argument("family", choices=[f.value for f in (Family.TETRA, Family.TETRA_MODIFIED, Family.THREE_LINES)])
    g.add_argument("--n", type=int)
    g.add_argument("--m", type=int)
    g.add_argument("--d", type=float, help="line distance (lines family)")
    g.add_argument("--out", help="output path (default <name>.tsp)")
    g.set_defaults(func=cmd_generate)

    o = sub.add_parser("opt", parents=[common], help="optimum tour and its length")
    o.add_argument("instance", nargs="?")
    o.add_argument("--n", type=int)
    o.add_argument("--m", type=int)
    o.set_defaults(func=cmd_opt)

    lp = sub.add_parser("lp", parents=[common], help="subtour LP value by cutting planes")
    lp.add_argument("instance", nargs="?")
    lp.add_argument("--n", type=int)
    lp.add_argument("--m", type=int)
    lp.add_argument("--oracle", action="store_true",
                    help=f"also solve with every subset row (<= {MAX_ENUMERATION_VERTICES} vertices)")
    lp.set_defaults(func=cmd_lp)

    r = sub.add_parser("ratio", parents=[common], help="integrality ratio CSV over a grid")
    r.add_argument("--n-values", help="comma list or ranges, e.g. 40,48,60")
    r.add_argument("--n-start", type=int)
    r.add_argument("--n-stop", type=int)
    r.add_argument("--n-step", type=int, default=20)
    r.add_argument("--m-values", help="one m per n (default ceil(2n/3)+1)")
    r.add_argument("--lp-source", default=analysis.LpSource.CUT_PLANE.value,
                   choices=[s.value for s in analysis.LpSource])
    r.set_defaults(func=cmd_ratio)

    b = sub.add_parser("bench", parents=[common], help="time an external solver")
    b.add_argument("--template", required=True, help="command with {file} and {seed}, e.g. 'concorde -s {seed} {file}'")
    b.add_argument("--seeds", default="1-10", help="comma list or ranges (default %(default)s)")
    b.add_argument("--repetitions", type=int, default=1)
    b.add_argument("--timeout", type=float, default=3600.0, help="seconds per run")
    b.add_argument("files", nargs="+")
    b.set_defaults(func=cmd_bench)

    f = sub.add_parser("fit", parents=[common], help="exponential runtime fit and predictions")
    f.add_argument("points", nargs="?", help="CSV with N,seconds columns or a bench record CSV")
    f.add_argument("--published", action="store_true", help="use the published constants instead of fitting")
    f.add_argument("--predict", type=int, nargs="*", help="vertex counts to extrapolate to")
    f.set_defaults(func=cmd_fit)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_PRECONDITION
    try:
        return args.func(args)
    except SizeGuardError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SIZE_GUARD
    except bench.ExternalCommandError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_EXTERNAL
    except (PreconditionError, TsplibError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION


if __name__ == "__main__":
    sys.exit(main())
