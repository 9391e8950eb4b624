"""Command-line front end.

Subcommands: ``run`` a scenario file, ``reproduce`` a built-in example,
``list-families``, and ``schema``.  Mathematical verdicts (hypothesis
failures, equality failures, fail rows in reproduction tables) are data
and exit 0; only validation (2), I/O (3), and solver/precondition (4)
problems set a nonzero status.
"""

from __future__ import annotations

import argparse
import json
import sys

from .errors import (
    PreconditionError,
    ScenarioValidationError,
    SetModuliError,
    SolverFailureError,
)
from .families import FAMILY_KINDS
from .scenario import (
    EXAMPLE_IDS,
    format_table,
    load_scenario,
    reproduce_paper,
    run_scenario,
    scenario_schema,
)

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_IO = 3
EXIT_SOLVER = 4


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="setmoduli",
        description="Calmness / Lipschitz upper-semicontinuity moduli of "
                    "parametric set-valued mappings",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run a scenario file")
    run_p.add_argument("scenario", help="path to a scenario JSON file")
    _common_flags(run_p)

    rep_p = sub.add_parser("reproduce", help="reproduce a built-in example")
    rep_p.add_argument("example_id", choices=EXAMPLE_IDS)
    _common_flags(rep_p)

    sub.add_parser("list-families", help="list the mapping family kinds")
    sub.add_parser("schema", help="print the scenario file schema")
    return parser


def _common_flags(p):
    p.add_argument("--out-dir", default=None, help="write report.json and CSV traces here")
    p.add_argument("--seed", type=int, default=None, help="override the schedule seed")
    p.add_argument("--schedule-levels", type=int, default=None,
                   help="override the number of radius levels")
    p.add_argument("--samples", type=int, default=None,
                   help="override samples per radius level")


def _apply_overrides(doc, args):
    sched = dict(doc.get("schedule", {}))
    if args.seed is not None:
        sched["seed"] = args.seed
    if args.schedule_levels is not None:
        sched["levels"] = args.schedule_levels
        sched.pop("radii", None)
    if args.samples is not None:
        sched["samples_per_radius"] = args.samples
    doc = dict(doc)
    doc["schedule"] = sched
    return doc


def _cmd_run(args):
    from .scenario import scenario_from_dict

    try:
        with open(args.scenario, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        print(f"error: cannot read scenario: {exc}", file=sys.stderr)
        return EXIT_IO
    except json.JSONDecodeError as exc:
        print(f"error: invalid JSON in scenario: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    doc = _apply_overrides(doc, args)
    scenario = scenario_from_dict(doc)
    report = run_scenario(scenario, out_dir=args.out_dir)
    if args.out_dir is None:
        print(report.to_json())
    else:
        print(f"report written to {args.out_dir}/report.json "
              f"({len(report.results)} analyses, {report.wall_time_s:.2f}s)")
    return EXIT_OK


def _cmd_reproduce(args):
    seed = 0 if args.seed is None else args.seed
    report, rows = reproduce_paper(args.example_id, seed=seed, out_dir=args.out_dir)
    print(format_table(rows))
    n_fail = sum(not r.passed for r in rows)
    print(f"\n{len(rows) - n_fail}/{len(rows)} checks pass "
          f"({report.wall_time_s:.2f}s)")
    return EXIT_OK


def main(argv=None):
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "reproduce":
            return _cmd_reproduce(args)
        if args.command == "list-families":
            for kind in FAMILY_KINDS:
                print(kind)
            return EXIT_OK
        if args.command == "schema":
            print(json.dumps(scenario_schema(), indent=2))
            return EXIT_OK
        return EXIT_VALIDATION
    except ScenarioValidationError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (PreconditionError, SolverFailureError) as exc:
        print(f"solver/precondition failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except SetModuliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
