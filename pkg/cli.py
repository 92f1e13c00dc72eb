#!/usr/bin/env python3
"""Command-line entry: simulate / verify / scan.

Exit codes: 0 ok, 1 failed checks or numerical failure, 2 bad input,
3 blowup flagged, 4 boundary contamination.
"""
from dotenv import load_dotenv
load_dotenv()

import argparse
import json
import math
import sys
from pathlib import Path
from typing import List, Optional

from pydantic import ValidationError

from skyrme.config import load_run_config
from skyrme.errors import BlowupSuspected, ConfigError, ContractError, DomainError, SkyrmeError
from skyrme.export import write_json
from skyrme.pipeline import simulate
from skyrme.verify import (MIN_SCAN_RESOLUTION, SUITES, SuiteSettings, corollary1_scan,
                           lemma1_scan, render_table, run_suite)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2
EXIT_BLOWUP = 3
EXIT_BOUNDARY = 4

_STATUS_EXIT = {"completed": EXIT_OK, "blowup_flagged": EXIT_BLOWUP,
                "boundary_contaminated": EXIT_BOUNDARY}


def _fail(message: str, code: int) -> int:
    sys.stderr.write(f"[error] {message}\n")
    return code


def cmd_simulate(args: argparse.Namespace) -> int:
    try:
        config = load_run_config(args.config)
    except ConfigError as e:
        return _fail(f"Bad config: {e}", EXIT_USAGE)
    out = Path(args.out) if args.out else None
    try:
        outcome, summary = simulate(config, out)
    except ConfigError as e:
        return _fail(f"Bad config: {e}", EXIT_USAGE)
    except BlowupSuspected as e:
        return _fail(f"Blowup: {e}", EXIT_BLOWUP)
    except SkyrmeError as e:
        return _fail(f"Simulation failed: {e}", EXIT_FAILED)
    drift = summary["energy"]["max_relative_drift"]
    print(f"{outcome.status}: t={outcome.t:.6g} steps={outcome.steps} max G={outcome.max_G:.6g} "
          f"energy drift={drift:.3e}")
    if outcome.message:
        print(outcome.message)
    return _STATUS_EXIT[outcome.status]


def cmd_verify(args: argparse.Namespace) -> int:
    if args.suite not in SUITES:
        return _fail(f"Unknown suite '{args.suite}' (choose from {', '.join(SUITES)})", EXIT_USAGE)
    try:
        settings = SuiteSettings(seed=args.seed, workers=args.workers)
    except ValidationError as e:
        return _fail(f"Bad settings: {e.errors()[0]['msg']}", EXIT_USAGE)
    report = run_suite(args.suite, settings)
    print(render_table(report))
    if args.out:
        write_json(args.out, json.loads(report.to_json()))
    if not report.passed:
        for e in report.failures():
            sys.stderr.write(f"[fail] {e.check_name} ({e.eq_tag}): value={e.value} tol={e.tol}\n")
        return EXIT_FAILED
    return EXIT_OK


def _r0_from_file(path: str) -> float:
    try:
        body = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, ValueError) as e:
        raise ConfigError(f"cannot read r0 from {path}: {e}")
    r0 = body.get("r0", body.get("provenance", {}).get("r0")) if isinstance(body, dict) else None
    if not isinstance(r0, (int, float)) or not r0 > 0:
        raise ConfigError(f"{path} holds no positive r0")
    return float(r0)


def cmd_scan(args: argparse.Namespace) -> int:
    try:
        if args.target == "lemma1":
            if args.resolution is not None and args.resolution < MIN_SCAN_RESOLUTION:
                return _fail(f"Resolution must be at least {MIN_SCAN_RESOLUTION} per pi", EXIT_USAGE)
            scan = lemma1_scan(r_max=args.r_max, beta_max=args.beta_max,
                               resolution=args.resolution or MIN_SCAN_RESOLUTION,
                               r_samples=args.r_samples, workers=args.workers)
            report = scan.report()
            body = json.loads(scan.model_dump_json())
            print(f"r0={scan.r0:.6g} min F={scan.min_value:.3e} r1={scan.r1:.6g} ({scan.note})")
        else:
            r0 = args.r0 if args.r0 is not None else (_r0_from_file(args.r0_file) if args.r0_file else None)
            if r0 is None:
                return _fail("corollary1 needs --r0 or --r0-file", EXIT_USAGE)
            report = corollary1_scan(r0, z_max=args.z_max, resolution=args.resolution or 512,
                                     workers=args.workers)
            body = json.loads(report.to_json())
            print(render_table(report))
    except (ConfigError, ContractError, DomainError) as e:
        return _fail(str(e), EXIT_USAGE)
    if args.out:
        write_json(args.out, body)
    return EXIT_OK if report.passed else EXIT_FAILED


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(description="Skyrme hedgehog simulator and verification harness.")
    sub = ap.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="Evolve a configured run and write its diagnostics")
    sim.add_argument("--config", required=True, help="Path to a key=value run config")
    sim.add_argument("--out", help="Output directory (default: output.dir from the config)")
    sim.set_defaults(func=cmd_simulate)

    ver = sub.add_parser("verify", help="Run a verification suite")
    ver.add_argument("--suite", required=True, help=f"One of: {', '.join(SUITES)}")
    ver.add_argument("--seed", type=int, default=0)
    ver.add_argument("--workers", type=int, default=None)
    ver.add_argument("--out", help="Write the JSON report here")
    ver.set_defaults(func=cmd_verify)

    sc = sub.add_parser("scan", help="Sign scan of F(r, beta) (lemma1) or the G1/G2 margin scan (corollary1)")
    sc.add_argument("target", choices=("lemma1", "corollary1"))
    sc.add_argument("--r-max", type=float, default=0.5)
    sc.add_argument("--beta-max", type=float, default=20 * math.pi)
    sc.add_argument("--resolution", type=int, default=None,
                    help=f"Samples per pi for lemma1 (>= {MIN_SCAN_RESOLUTION}); grid size for corollary1")
    sc.add_argument("--r-samples", type=int, default=64)
    sc.add_argument("--r0", type=float, default=None)
    sc.add_argument("--r0-file", help="JSON from a previous lemma1 scan")
    sc.add_argument("--z-max", type=float, default=8 * math.pi)
    sc.add_argument("--workers", type=int, default=None)
    sc.add_argument("--out", help="Write the JSON result here")
    sc.set_defaults(func=cmd_scan)
    return ap


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
