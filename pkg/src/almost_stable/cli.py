"""Command-line entry point: ``almost-stable <subcommand> ...``.

Exit status is 0 on success, 2 on invalid input and 3 when an instance is
too large for exhaustive search or admits no feasible matching.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .bench import ExperimentConfig, Scheme, Solver, format_summary, gen_random, run_experiment, summarize
from .classic import irving
from .constructions import (
    parse_formula,
    reduce_sat_to_smi,
    reduce_sat_to_sri,
    build_prop34,
    build_prop36,
    witness_from_assignment_smi,
    witness_from_assignment_sri,
    witness_prop34,
)
from .core import AlmostStableError, Instance, Kind, blocking_report, ceil_half, format_instance, parse_instance, parse_matching, result_record
from .exact import DEFAULT_CAP, Cardinality, Objective, solve_exact
from .ilp import Mode, build_model, export_lp, format_variable_map
from .localsearch import approx_with_cut
from .shortlist import solve_minimax_max_smi_deg2, solve_minimax_sri_deg2

EXIT_INVALID = 2
# descriptive spellings accepted by ``gen --family``
_FAMILY_ALIASES = {"nested-cycles": "prop34", "pendant-star": "prop36"}
EXIT_UNSOLVED = 3
_UNSOLVED_CODES = {"TOO_LARGE", "INFEASIBLE"}


def _read_instance(path: str) -> Instance:
    return parse_instance(Path(path).read_text())


def _emit(record: dict) -> None:
    print(json.dumps(record))


def cmd_solve(args) -> int:
    inst = _read_instance(args.instance)
    card = Cardinality(args.cardinality)
    if inst.d_max <= 2 and card is Cardinality.ANY:
        m, method = solve_minimax_sri_deg2(inst), "shortlist"
    elif inst.d_max <= 2 and card is Cardinality.MAX_CARD and inst.kind is Kind.SMI:
        m, method = solve_minimax_max_smi_deg2(inst), "shortlist"
    elif inst.n <= args.cap or card is not Cardinality.ANY:
        m, method = solve_exact(inst, Objective.MINIMAX, card, cap=args.cap).witness, "exact"
    else:
        m, method = approx_with_cut(inst)[0], "approx"
    rec = result_record(m, blocking_report(inst, m))
    rec["method"] = method
    _emit(rec)
    return 0


def cmd_approx(args) -> int:
    inst = _read_instance(args.instance)
    m, cut = approx_with_cut(inst)
    rep = blocking_report(inst, m)
    rec = result_record(m, rep)
    rec["per_agent"] = list(rep.per_agent)
    rec["bound"] = [ceil_half(d) for d in inst.degrees]
    rec["flips"] = 0 if cut is None else cut.flips
    _emit(rec)
    return 0


def cmd_exact(args) -> int:
    inst = _read_instance(args.instance)
    res = solve_exact(inst, args.objective, args.cardinality, cap=args.cap, force=args.force)
    rec = result_record(res.witness, blocking_report(inst, res.witness), Objective(args.objective).value, res.value)
    rec["explored"] = res.explored
    _emit(rec)
    return 0


def cmd_gen(args) -> int:
    args.family = _FAMILY_ALIASES.get(args.family, args.family)
    if args.family == "prop34":
        if args.k is None:
            raise AlmostStableError("--k is required for prop34", "BAD_K")
        inst = build_prop34(args.k)
        text = format_instance(inst)
        if args.witness:
            m = witness_prop34(args.k)
            Path(args.witness).write_text(json.dumps(result_record(m, blocking_report(inst, m))) + "\n")
    elif args.family == "prop36":
        if args.k is None:
            raise AlmostStableError("--k is required for prop36", "BAD_K")
        text = format_instance(build_prop36(args.k))
    else:
        if args.n is None or args.l is None:
            raise AlmostStableError("--n and --l are required for random instances", "BAD_CONFIG")
        text = format_instance(gen_random(args.n, args.l, args.kind, args.seed, args.scheme))
    _write_or_print(text, args.out)
    return 0


def _parse_assignment(text: str, num_vars: int) -> tuple[bool, ...]:
    values = [None] * num_vars
    for tok in text.replace(",", " ").split():
        v = int(tok)
        if v == 0 or abs(v) > num_vars:
            raise AlmostStableError(f"assignment literal {v} out of range", "UNSATISFYING_ASSIGNMENT")
        values[abs(v) - 1] = v > 0
    if any(x is None for x in values):
        raise AlmostStableError("assignment must give every variable a value", "UNSATISFYING_ASSIGNMENT")
    return tuple(values)  # type: ignore[arg-type]


def cmd_reduce(args) -> int:
    f = parse_formula(Path(args.formula).read_text())
    red = reduce_sat_to_sri(f) if args.target == "sri" else reduce_sat_to_smi(f)
    names = dict(enumerate(red.agent_names))
    _write_or_print(format_instance(red.instance, names), args.out)
    if args.assignment is not None:
        a = _parse_assignment(args.assignment, f.num_vars)
        build = witness_from_assignment_sri if args.target == "sri" else witness_from_assignment_smi
        m = build(red, a)
        rec = json.dumps(result_record(m, blocking_report(red.instance, m))) + "\n"
        if args.witness:
            Path(args.witness).write_text(rec)
        else:
            sys.stderr.write(rec)
    return 0


def cmd_ilp_export(args) -> int:
    inst = _read_instance(args.instance)
    model = build_model(inst, Mode(args.mode))
    text = export_lp(model)
    if args.out:
        Path(args.out).write_text(text)
        map_path = args.map or args.out + ".map.json"
        Path(map_path).write_text(format_variable_map(model))
    else:
        sys.stdout.write(text)
        if args.map:
            Path(args.map).write_text(format_variable_map(model))
    return 0


def cmd_bench(args) -> int:
    cfg = ExperimentConfig(
        n=args.n,
        l=args.l,
        kind=args.kind,
        mode=args.mode,
        count=args.count,
        base_seed=args.seed,
        solver=args.solver,
        out=Path(args.out) if args.out else None,
        budget_ms=args.budget_ms,
        cap=args.cap,
        scheme=args.scheme,
        timing=args.timing,
        lp_dir=Path(args.lp_dir) if args.lp_dir else None,
    )
    rows = run_experiment(cfg)
    sys.stdout.write(format_summary([summarize(rows)]))
    if args.plot:
        from .report import plot_rows

        plot_rows(rows, args.plot)
    return 0


def cmd_check(args) -> int:
    inst = _read_instance(args.instance)
    m = parse_matching(inst, Path(args.matching).read_text())
    rep = blocking_report(inst, m)
    rec = result_record(m, rep)
    rec["per_agent"] = list(rep.per_agent)
    rec["solvable"] = irving(inst) is not None
    _emit(rec)
    return 0


def _write_or_print(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="almost-stable", description="Minimax almost-stable matchings.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="minimax matching, choosing the method from the instance")
    s.add_argument("--instance", required=True)
    s.add_argument("--cardinality", choices=["any", "max", "perfect"], default="any")
    s.add_argument("--cap", type=int, default=DEFAULT_CAP)
    s.set_defaults(func=cmd_solve)

    s = sub.add_parser("approx", help="stable matching or balanced-cut approximation")
    s.add_argument("--instance", required=True)
    s.set_defaults(func=cmd_approx)

    s = sub.add_parser("exact", help="exhaustive branch and bound")
    s.add_argument("--instance", required=True)
    s.add_argument("--objective", choices=[o.value for o in Objective], default="minimax")
    s.add_argument("--cardinality", choices=[c.value for c in Cardinality], default="any")
    s.add_argument("--cap", type=int, default=DEFAULT_CAP)
    s.add_argument("--force", action="store_true", help="ignore the size cap")
    s.set_defaults(func=cmd_exact)

    s = sub.add_parser("gen", help="write a constructed or random instance")
    s.add_argument("--family", choices=["prop34", "prop36", *_FAMILY_ALIASES, "random"], required=True)
    s.add_argument("--k", type=int)
    s.add_argument("--n", type=int)
    s.add_argument("--l", type=int)
    s.add_argument("--kind", choices=["sri", "smi"], default="sri")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--scheme", choices=[x.value for x in Scheme], default="capped")
    s.add_argument("--witness", help="also write the family's witness matching (prop34)")
    s.add_argument("--out")
    s.set_defaults(func=cmd_gen)

    s = sub.add_parser("reduce", help="build the gadget instance for a (2,2)-E3-SAT formula")
    s.add_argument("--target", choices=["sri", "smi"], required=True)
    s.add_argument("--formula", required=True)
    s.add_argument("--assignment", help="signed literals, e.g. '1 -2 -3', to build a witness")
    s.add_argument("--witness", help="file for the witness record (default: stderr)")
    s.add_argument("--out")
    s.set_defaults(func=cmd_reduce)

    s = sub.add_parser("ilp-export", help="write the integer program in LP format")
    s.add_argument("--instance", required=True)
    s.add_argument("--mode", choices=[m.value for m in Mode], default="minimax")
    s.add_argument("--out")
    s.add_argument("--map", help="variable map path (default: OUT.map.json)")
    s.set_defaults(func=cmd_ilp_export)

    s = sub.add_parser("bench", help="random experiment with CSV rows and a summary table")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--l", type=int, required=True)
    s.add_argument("--kind", choices=["sri", "smi"], default="sri")
    s.add_argument("--mode", choices=[m.value for m in Mode], default="minimax")
    s.add_argument("--count", type=int, default=1)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out")
    s.add_argument("--solver", choices=[x.value for x in Solver], default="auto")
    s.add_argument("--budget-ms", type=int, default=10_000)
    s.add_argument("--cap", type=int, default=DEFAULT_CAP)
    s.add_argument("--scheme", choices=[x.value for x in Scheme], default="capped")
    s.add_argument("--timing", action="store_true", help="write measured solve_ms to the CSV")
    s.add_argument("--lp-dir", help="also export each solved model as an LP file")
    s.add_argument("--plot", help="write a PNG figure of the rows")
    s.set_defaults(func=cmd_bench)

    s = sub.add_parser("check", help="blocking report of a matching")
    s.add_argument("--instance", required=True)
    s.add_argument("--matching", required=True)
    s.set_defaults(func=cmd_check)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except AlmostStableError as e:
        print(f"error: {e.code}: {e}", file=sys.stderr)
        return EXIT_UNSOLVED if e.code in _UNSOLVED_CODES else EXIT_INVALID
    except (OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
