"""Command-line front end.

    relkin run <scenario> --out <csv>    simulate a scenario file
    relkin verify [--suite S] [--seed N] [--trials M]
    relkin presets                       list motion presets

Exit codes: 0 success, 1 verification failure, 2 runtime/model error,
3 input error.
"""

from __future__ import annotations

import argparse
import sys

from .constitutive import Loading, NoConvergence
from .minkowski import BetaSuperluminal
from .scenario import ParseError, ValidationError, load_scenario, write_csv
from .verify import SUITES, run_suites
from .worldline import MOTION_PRESETS, simulate

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_RUNTIME = 2
EXIT_INPUT = 3

_SAMPLE_SCENARIO = """\
[motion]
preset = uniform_stretch
rate = 0.05

[material]
m0 = 1.0
c1 = 1.0
t0 = 0.2
H = 0.5

[grid]
L0 = 1.0
X_count = 2
t_start = 0.0
t_end = 2.0
dt = 0.001

[mode]
mode = relativistic
c = 1.0
"""


def _cmd_run(args) -> int:
    try:
        scenario = load_scenario(args.scenario)
    except (ParseError, ValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    try:
        records = simulate(scenario)
        write_csv(records, args.out)
    except (NoConvergence, BetaSuperluminal, RuntimeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    final_gamma = max(r.Gamma_p for r in records)
    max_xi = max(r.xi for r in records)
    plastic = [abs(r.sigma_bar - r.t_y) for r in records if r.loading is Loading.PLASTIC]
    max_gap = max(plastic) if plastic else 0.0
    print(f"wrote {len(records)} records to {args.out}")
    print(f"final Gamma_p = {final_gamma:.12g}")
    print(f"max xi = {max_xi:.12g}")
    print(f"max consistency residual = {max_gap:.3e}")
    return EXIT_OK


def _cmd_verify(args) -> int:
    names = list(SUITES) if args.suite == "all" else [args.suite]
    try:
        report = run_suites(names, seed=args.seed, trials=args.trials)
    except (NoConvergence, BetaSuperluminal, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except ValueError as exc:  # e.g. malformed RELKIN_TOL_OVERRIDE
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    all_ok = True
    for suite_name, results in report:
        print(f"[{suite_name}]")
        for res in results:
            status = "PASS" if res.passed else "FAIL"
            all_ok &= res.passed
            print(f"  {status}  {res.name:<45s} residual={res.residual:.3e} tol={res.tolerance:.3e}")
    print("verification:", "PASS" if all_ok else "FAIL")
    return EXIT_OK if all_ok else EXIT_VERIFY_FAILED


def _cmd_presets(args) -> int:
    print("motion presets:")
    for name, (_, params) in sorted(MOTION_PRESETS.items()):
        print(f"  {name:<18s} parameters: {', '.join(params)}")
    print()
    print("sample scenario file:")
    print(_SAMPLE_SCENARIO)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="relkin",
                                     description="Relativistic elastic-plastic bar simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="simulate a scenario file and write CSV")
    p_run.add_argument("scenario", help="path to the scenario file")
    p_run.add_argument("--out", required=True, help="output CSV path")
    p_run.set_defaults(func=_cmd_run)

    p_ver = sub.add_parser("verify", help="run the property suites")
    p_ver.add_argument("--suite", default="all", choices=sorted(SUITES) + ["all"])
    p_ver.add_argument("--seed", type=int, default=0)
    p_ver.add_argument("--trials", type=int, default=200)
    p_ver.set_defaults(func=_cmd_verify)

    p_pre = sub.add_parser("presets", help="list motion presets and a sample scenario")
    p_pre.set_defaults(func=_cmd_presets)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except BrokenPipeError:
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
