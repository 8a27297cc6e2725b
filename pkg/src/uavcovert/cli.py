"""Command line entry point: ``uavcovert plan|sweep|simulate-detector|bench``.

Exit codes: 0 success, 2 bad arguments or scenario, 3 infeasible scenario
(a JSON reason is printed on stderr).
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import _backend, ci, harness
from .model import CovertnessViolation, InfeasibleScenario, ScenarioError
from .scenario_io import bundled_scenario_path, load_scenario, parse_point

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INFEASIBLE = 3


def _seed(text: str) -> int:
    try:
        val = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"seed must be an integer, got {text!r}") from None
    if not 0 <= val < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return val


def _positive_float(text: str) -> float:
    try:
        val = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}") from None
    if not val > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text!r}")
    return val


def _positive_int(text: str) -> int:
    try:
        val = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if val < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return val


def _int_list(text: str) -> list:
    return [_positive_int(t) for t in text.split(",") if t.strip()]


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--scenario", type=Path, default=bundled_scenario_path(), help="scenario file (.scn)")
    p.add_argument("--out", type=Path, default=Path("out"), help="output directory")
    p.add_argument("--seed", type=_seed, default=0)


def _ci_flags(p: argparse.ArgumentParser) -> None:
    d = ci.CiConfig()
    p.add_argument("--bcd-tol", type=_positive_float, default=d.bcd_tolerance)
    p.add_argument("--max-iters", type=_positive_int, default=d.max_bcd_iters)
    p.add_argument("--cccp-tol", type=_positive_float, default=d.cccp_tolerance)
    p.add_argument("--angle", choices=ci.ANGLE_RULES, default=d.angle, help="turn-slot angle for the CI start")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="uavcovert", description="UAV-jammer trajectory and covert power planning")
    parser.add_argument("-v", "--verbose", action="store_true")
    parser.add_argument("--backend", choices=("numba", "numpy"), default=None, help="kernel backend")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("plan", help="plan one scenario")
    _common(p)
    p.add_argument("--method", choices=("gm", "ci", "both"), default="both")
    p.add_argument("--return-rule", choices=("intersection", "paper"), default=None)
    _ci_flags(p)

    p = sub.add_parser("sweep", help="sweep one scenario parameter")
    _common(p)
    p.add_argument("--param", choices=harness.SWEEP_PARAMS, required=True)
    p.add_argument("--values", required=True, help="';'-separated values; points as 'x,y'")
    p.add_argument("--methods", default="gm,ci", help="comma list of gm, ci")
    p.add_argument("--workers", type=_positive_int, default=1)
    _ci_flags(p)

    p = sub.add_parser("simulate-detector", help="Monte Carlo radiometer against the closed forms")
    _common(p)
    p.add_argument("--slot", type=_positive_int, default=None, help="slot of the GM plan (default: hover slot)")
    p.add_argument("--p-a", type=_positive_float, default=None, help="transmit power in W (default: GM power)")
    p.add_argument("--m", type=_positive_float, default=None, help="samples per radiometer window (default: large-m limit)")
    p.add_argument("--samples", type=_positive_int, default=1_000_000)

    p = sub.add_parser("bench", help="runtime scaling in N")
    _common(p)
    p.add_argument("--N", dest="n_list", type=_int_list, default=[100, 200, 400, 800])
    p.add_argument("--methods", default="gm,ci")
    p.add_argument("--repeats", type=_positive_int, default=5)
    return parser


def _ci_config(args) -> ci.CiConfig:
    return ci.CiConfig(
        bcd_tolerance=args.bcd_tol, max_bcd_iters=args.max_iters, cccp_tolerance=args.cccp_tol, angle=args.angle
    )


def _sweep_values(param: str, text: str) -> list:
    if param in ("q_w", "q_b"):
        return [parse_point(v) for v in text.split(";") if v.strip()]
    return [float(v) for v in text.replace(";", ",").split(",") if v.strip()]


def _load(args):
    parsed = load_scenario(args.scenario)
    if getattr(args, "return_rule", None):
        parsed.options["return_rule"] = args.return_rule
    return parsed


def _run(args) -> int:
    if args.command == "plan":
        parsed = _load(args)
        results = harness.run_scenario(parsed, args.method, args.out, args.seed, _ci_config(args))
        for name, res in results.items():
            print(f"{name}: average covert rate {res.average_rate:.6f} bps/Hz")
    elif args.command == "sweep":
        parsed = _load(args)
        try:
            values = _sweep_values(args.param, args.values)
        except ValueError as exc:
            raise ScenarioError(f"--values: {exc}") from None
        spec = harness.SweepSpec(args.param, tuple(values), tuple(harness.methods_from(args.methods)), args.seed)
        rows = harness.run_sweep(spec, parsed, args.workers, _ci_config(args))
        args.out.mkdir(parents=True, exist_ok=True)
        harness.write_sweep_csv(args.out / f"sweep_{args.param}.csv", rows)
        failed = [r for r in rows if r["status"] != "ok"]
        print(f"sweep {args.param}: {len(rows) - len(failed)} ok, {len(failed)} failed")
    elif args.command == "simulate-detector":
        parsed = _load(args)
        s = harness.simulate_detector(parsed, args.out, args.seed, args.slot, args.p_a, args.m, args.samples)
        print(f"slot {s['slot']}: empirical {s['empirical_min_total']:.5f}, closed form {s['closed_form_min_total']:.5f}")
    elif args.command == "bench":
        parsed = _load(args)
        table = harness.bench_scaling(args.n_list, parsed.scenario, harness.methods_from(args.methods), args.repeats)
        args.out.mkdir(parents=True, exist_ok=True)
        harness.write_bench_csv(args.out / f"bench_{table.backend}.csv", table)
        for k, v in table.slopes.items():
            print(f"{k}: log-log slope {'n/a' if v is None else f'{v:.3f}'}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.backend:
            _backend.set_backend(args.backend)
        return _run(args)
    except InfeasibleScenario as exc:
        reason = {"error": "infeasible", "reason": str(exc), "distance_m": exc.distance, "reach_m": exc.reach}
        print(json.dumps(reason), file=sys.stderr)
        return EXIT_INFEASIBLE
    except CovertnessViolation as exc:
        print(json.dumps({"error": "covertness", "reason": str(exc)}), file=sys.stderr)
        return EXIT_INFEASIBLE
    except (ScenarioError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
