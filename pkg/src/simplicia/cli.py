"""Command-line entry point.

Usage::

    simplicia solve med:n=3,m=3,p=1,1,1 --density 10 --seed 42 --all-subsets -o front.json
    simplicia stratify fig1 --density 12 -o fig1.json
    simplicia check dtlz3:n=7,m=3          # exit 3 when simplicity is falsified
    simplicia oracle example1 --grid 1001 --subset 0
    simplicia export-csv front.json -o front.csv

JSON goes to ``--out`` or, without it, to stdout. Human-readable tables go to
stdout when a file is written and to stderr otherwise.

Exit codes: 0 success (``check``: NOT_FALSIFIED), 1 evaluation failure,
2 usage/selector/archive errors, 3 NON_SIMPLE, 4 INCONCLUSIVE only.
"""

from __future__ import annotations

import argparse
import dataclasses
import logging
import sys

from . import io
from .dominance import DEFAULT_GRID_BUDGET, GridSpec, grid_oracles
from .problem import DomainError, EvaluationError, ObjectiveSubset, enumerate_subproblems
from .scalarize import SolverConfig, SweepFailure, estimate_utopian, weight_sweep
from .simplicity import SimplicityReport, SuiteConfig, Verdict, run_simplicity_suite
from .strata import build_stratification
from .suites import SelectorError, from_selector

log = logging.getLogger("simplicia")

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_USAGE = 2
EXIT_NON_SIMPLE = 3
EXIT_INCONCLUSIVE = 4

# keys accepted by --config, mapped to argparse destinations
CONFIG_KEYS = {
    "seed": int, "density": int, "restarts": int, "max_iters": int, "xtol": float, "ftol": float,
    "budget": int, "grid": int, "all_subsets": lambda v: v.strip().lower() in ("1", "true", "yes"),
    "subset": str,
}


class UsageError(Exception):
    pass


def read_config(path: str) -> dict:
    """Parse a flat ``key=value`` file; ``#`` starts a comment, dashes in keys become underscores."""
    out = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip().lstrip("-").replace("-", "_")
        if not sep or key not in CONFIG_KEYS:
            raise UsageError(f"{path}:{lineno}: expected one of {sorted(CONFIG_KEYS)} as key=value")
        try:
            out[key] = CONFIG_KEYS[key](value.strip())
        except ValueError:
            raise UsageError(f"{path}:{lineno}: bad value for {key}: {value.strip()!r}") from None
    return out


def parse_subset(text: str, m: int) -> ObjectiveSubset:
    """``"0,2"`` -> objectives {0, 2}; ``"-"`` or ``""`` -> the empty subset."""
    text = text.strip()
    if text in ("", "-"):
        return ObjectiveSubset(0, m)
    try:
        idx = sorted({int(t) for t in text.replace("+", ",").split(",") if t.strip()})
    except ValueError:
        raise UsageError(f"bad subset {text!r}") from None
    if any(i < 0 or i >= m for i in idx):
        raise UsageError(f"subset {text!r} out of range for {m} objectives")
    return ObjectiveSubset.from_indices(idx, m)


def _subsets(args, m: int) -> list[ObjectiveSubset]:
    if args.all_subsets:
        return [s for s in enumerate_subproblems(m) if s.k > 0]
    if args.subset is not None:
        return [parse_subset(args.subset, m)]
    return [ObjectiveSubset.full(m)]


def solver_config(args) -> SolverConfig:
    base = SolverConfig()
    try:
        return SolverConfig(
            restarts=args.restarts if args.restarts is not None else base.restarts,
            max_iters=args.max_iters if args.max_iters is not None else base.max_iters,
            x_tolerance=args.xtol if args.xtol is not None else base.x_tolerance,
            f_tolerance=args.ftol if args.ftol is not None else base.f_tolerance,
            seed=args.seed,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _emit(args, doc: dict, table: str = "") -> None:
    text = io.finalize(doc)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        if table:
            print(table)
    else:
        sys.stdout.write(text)
        if table:
            print(table, file=sys.stderr)


def _failures_doc(failures: list[SweepFailure]) -> list[dict]:
    return [{"weight": io._floats(f.weight), "error": f.message} for f in failures]


def cmd_solve(args) -> int:
    problem = from_selector(args.selector)
    config = solver_config(args)
    z = estimate_utopian(problem, config)
    strata, failures = [], []
    for subset in _subsets(args, problem.m):
        if subset.k == 0:
            continue
        fails: list[SweepFailure] = []
        arch = weight_sweep(problem, subset, args.density, z, config, fails)
        strata.append(io.stratum_entry(arch))
        failures += fails
    for f in failures:
        log.warning("weight %s failed: %s", list(f.weight), f.message)
    doc = {
        "manifest": io.manifest("solve", args.selector, _resolved(args, config)),
        "n": problem.n, "m": problem.m,
        "utopian": io._floats(z.z),
        "strata": strata,
        "diagnostics": {"failed_weights": _failures_doc(failures)},
    }
    table = "\n".join(f"{'{' + ','.join(map(str, s['subset'])) + '}':<14}{len(s['points']):>6} points" for s in strata)
    _emit(args, doc, table)
    return EXIT_OK


def cmd_stratify(args) -> int:
    problem = from_selector(args.selector)
    config = solver_config(args)
    strat = build_stratification(problem, args.density, config=config)
    strata, diagnostics = io.stratification_doc(strat)
    doc = {
        "manifest": io.manifest("stratify", args.selector, _resolved(args, config)),
        "n": problem.n, "m": problem.m,
        "utopian": io._floats(strat.utopian.z),
        "strata": strata,
        "diagnostics": diagnostics,
    }
    _emit(args, doc, io.gluing_table(strat.diagnostics))
    return EXIT_OK


def check_exit_code(report: SimplicityReport) -> int:
    return {Verdict.NOT_FALSIFIED: EXIT_OK, Verdict.NON_SIMPLE: EXIT_NON_SIMPLE,
            Verdict.INCONCLUSIVE: EXIT_INCONCLUSIVE}[report.verdict]


def cmd_check(args) -> int:
    problem = from_selector(args.selector)
    config = solver_config(args)
    suite = SuiteConfig(solver=config, density=args.density)
    if args.budget is not None:
        suite = dataclasses.replace(suite, oracle_budget=float(args.budget))
    report = run_simplicity_suite(problem, suite)
    doc = {"manifest": io.manifest("check", args.selector, _resolved(args, suite)), **io.report_doc(report)}
    _emit(args, doc, report.table())
    return check_exit_code(report)


def cmd_oracle(args) -> int:
    problem = from_selector(args.selector)
    budget = args.budget if args.budget is not None else DEFAULT_GRID_BUDGET
    count = args.grid
    if count is None:
        count = max(2, int(round(min(budget, 1e6) ** (1.0 / problem.n))))
    try:
        spec = GridSpec.uniform(problem.n, count, budget)
        subsets = _subsets(args, problem.m)
        archives = grid_oracles(problem, spec, subsets)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    strata = [io.stratum_entry(archives[s][0]) for s in subsets]
    weak = [io.stratum_entry(archives[s][1]) for s in subsets]
    doc = {
        "manifest": io.manifest("oracle", args.selector, {"grid": list(spec.counts), "budget": budget}),
        "n": problem.n, "m": problem.m,
        "strata": strata,
        "diagnostics": {"weak": weak},
    }
    table = "\n".join(f"{str(s):<14}{len(archives[s][0]):>8} pareto{len(archives[s][1]):>8} weak" for s in subsets)
    _emit(args, doc, table)
    return EXIT_OK


def cmd_export_csv(args) -> int:
    doc = io.read_archive(args.archive)
    text = io.archive_csv(doc)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _resolved(args, config) -> dict:
    out = {"density": args.density, "all_subsets": bool(args.all_subsets), "subset": args.subset}
    out.update(dataclasses.asdict(config))
    return out


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="base random seed (default: 0)")
    common.add_argument("-o", "--out", default=None, help="output path (default: stdout)")
    common.add_argument("--density", type=int, default=10, help="simplex-lattice weight density (default: 10)")
    common.add_argument("--restarts", type=int, default=None, help="pattern-search restarts per weight")
    common.add_argument("--max-iters", type=int, default=None, help="pattern-search iterations per restart")
    common.add_argument("--xtol", type=float, default=None, help="step tolerance relative to box width")
    common.add_argument("--ftol", type=float, default=None, help="objective stall tolerance")
    common.add_argument("--budget", type=int, default=None, help="maximum lattice points for grid oracles")
    common.add_argument("--all-subsets", action="store_true", help="process every nonempty objective subset")
    common.add_argument("--subset", default=None, help="comma-separated objective indices, e.g. 0,2")
    common.add_argument("--grid", type=int, default=None, help="oracle lattice points per coordinate")
    common.add_argument("--config", default=None, help="flat key=value file; command-line flags win")

    parser = argparse.ArgumentParser(prog="simplicia", description="Pareto set stratification and simplicity checks")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn, helptext in [
        ("solve", cmd_solve, "Tchebyshev weight sweep"),
        ("stratify", cmd_stratify, "sweep every subproblem and check the gluing"),
        ("check", cmd_check, "run the simplicity falsification suite"),
        ("oracle", cmd_oracle, "exhaustive grid Pareto sets"),
    ]:
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument("selector", help="problem selector, e.g. med:n=3,m=3,p=1,1,1")
        p.set_defaults(func=fn)
    p = sub.add_parser("export-csv", help="flatten an archive file to CSV")
    p.add_argument("archive")
    p.add_argument("-o", "--out", default=None)
    p.set_defaults(func=cmd_export_csv, config=None)
    return parser


def parse_args(argv=None) -> argparse.Namespace:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        try:
            values = read_config(args.config)
        except UsageError as exc:
            parser.error(str(exc))
        # rerun the parse with file values as defaults so explicit flags still win
        for action in parser._subparsers._group_actions[0].choices[args.command]._actions:
            if action.dest in values:
                action.default = values[action.dest]
        args = parser.parse_args(argv)
    return args


def main(argv=None) -> int:
    args = parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (SelectorError, UsageError, io.ArchiveFormatError) as exc:
        print(f"simplicia: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DomainError, EvaluationError) as exc:
        print(f"simplicia: evaluation failed: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
