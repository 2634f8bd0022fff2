"""Command-line interface.

Subcommands:
  gen       synthesize a scenario file set from a scene spec (or built-ins)
  run-kat   run one step/full KAT against a scenario
  regress   run a suite of KATs and feature tests, write a JSON report
  diff-mem  tolerance-aware comparison of two memh files
  regmap    print the register/memory address map

Exit codes: 0 pass, 1 test failures, 2 usage or load errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .harness import (
    compare_mem,
    default_suite,
    run_full_kat,
    run_regression,
    run_step_kat,
)
from .memimage import MemhParseError, parse_memh
from .scenario import ScenarioError, discover_scenarios, load_scenario, select_scenario

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_USAGE = 2


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="radarkat", description=__doc__.split("\n")[0])
    p.add_argument("--version", action="version", version=f"radarkat {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate scenario file sets")
    src = g.add_mutually_exclusive_group(required=True)
    src.add_argument("--spec", type=Path, help="scene spec JSON file")
    src.add_argument(
        "--builtin",
        choices=["single", "multi", "noise", "all"],
        help="generate one of the built-in scenes (or all three)",
    )
    g.add_argument("--out", type=Path, required=True, help="output directory")
    g.add_argument(
        "--force", action="store_true",
        help="generate even when the separation check reports violations",
    )

    k = sub.add_parser("run-kat", help="run a single KAT")
    k.add_argument("--scenario", default="", help="scenario name (empty/unknown: seeded random pick)")
    k.add_argument("--step", required=True, choices=["mti", "rfft", "cfft", "cfar", "ae", "full"])
    k.add_argument("--access", default="backdoor", choices=["frontdoor", "backdoor"])
    k.add_argument("--seed", type=int, default=0)
    k.add_argument("--scenarios", type=Path, default=Path("scenarios"), help="scenario root directory")

    r = sub.add_parser("regress", help="run a regression suite")
    r.add_argument("--suite", type=Path, help="suite spec JSON (default: built-in default suite)")
    r.add_argument("--scenario", default=None, help="restrict to one scenario (empty/unknown: seeded random pick)")
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--scenarios", type=Path, default=Path("scenarios"), help="scenario root directory")
    r.add_argument("--report", type=Path, help="write the JSON report here")

    d = sub.add_parser("diff-mem", help="compare two memh files")
    d.add_argument("a", type=Path)
    d.add_argument("b", type=Path)
    d.add_argument("--bits", type=int, required=True, choices=[16, 24])
    d.add_argument("--tol-lsb", type=int, default=0)

    sub.add_parser("regmap", help="print the register/memory address map")
    return p


def _load_scenarios(root: Path) -> dict:
    found = discover_scenarios(root)
    if not found:
        raise ScenarioError(
            f"no scenarios under {root} (generate some with: radarkat gen --builtin all --out {root})"
        )
    return {name: load_scenario(path) for name, path in found.items()}


def _cmd_gen(args: argparse.Namespace) -> int:
    from .scenariogen import SceneSpec, generate_scenario

    if args.builtin:
        names = ["single", "multi", "noise"] if args.builtin == "all" else [args.builtin]
        from .scenariogen import builtin_specs

        specs = builtin_specs()
        for name in names:
            out = args.out / name if args.builtin == "all" else args.out
            scen = generate_scenario(specs[name], out, force=args.force)
            print(f"generated scenario {scen.name!r} -> {out}")
        return EXIT_PASS
    spec = SceneSpec.from_dict(json.loads(args.spec.read_text()))
    scen = generate_scenario(spec, args.out, force=args.force)
    print(f"generated scenario {scen.name!r} -> {args.out}")
    return EXIT_PASS


def _cmd_run_kat(args: argparse.Namespace) -> int:
    scenarios = _load_scenarios(args.scenarios)
    scen = select_scenario(args.scenario, scenarios, args.seed)
    print(f"SCENARIO={scen.name}")
    if args.step == "full":
        report = run_full_kat(scen, args.access)
    else:
        report = run_step_kat(scen, args.step, args.access)
    print(report.summary_line())
    for m in report.mismatches:
        print(f"  {m.severity}: {m.kind} at {m.where} expected={m.expected} actual={m.actual} delta={m.delta}")
    return EXIT_PASS if report.passed else EXIT_FAIL


def _cmd_regress(args: argparse.Namespace) -> int:
    scenarios = _load_scenarios(args.scenarios)
    if args.suite:
        suite = json.loads(args.suite.read_text())
        tests = suite["tests"] if isinstance(suite, dict) else suite
    else:
        tests = default_suite(sorted(scenarios))
    result = run_regression(tests, scenarios, seed=args.seed, scenario_filter=args.scenario)
    for report in result.reports:
        print(report.summary_line())
    counts = result.counts
    print(
        f"summary: {counts['passed']} passed, {counts['failed']} failed, "
        f"{counts['skipped']} skipped, {counts['tie_ambiguous_warnings']} tie-ambiguous"
    )
    if args.report:
        args.report.parent.mkdir(parents=True, exist_ok=True)
        args.report.write_text(json.dumps(result.to_dict(), indent=2, sort_keys=True) + "\n")
        print(f"report written to {args.report}")
    return result.exit_code


def _cmd_diff_mem(args: argparse.Namespace) -> int:
    images = []
    for path in (args.a, args.b):
        if not path.is_file():
            print(f"error: no such file {path}", file=sys.stderr)
            return EXIT_USAGE
        images.append(parse_memh(path.read_text(), args.bits))
    mismatches = compare_mem(images[1], images[0], args.tol_lsb)
    for m in mismatches:
        print(f"{m.kind} at {m.where}: expected={m.expected} actual={m.actual} delta={m.delta}")
    print(f"{len(mismatches)} mismatches (tol {args.tol_lsb} LSB)")
    return EXIT_PASS if not mismatches else EXIT_FAIL


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "gen":
            return _cmd_gen(args)
        if args.command == "run-kat":
            return _cmd_run_kat(args)
        if args.command == "regress":
            return _cmd_regress(args)
        if args.command == "diff-mem":
            return _cmd_diff_mem(args)
        if args.command == "regmap":
            from .device import register_map_text

            print(register_map_text(), end="")
            return EXIT_PASS
    except (ScenarioError, MemhParseError, OSError, json.JSONDecodeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
