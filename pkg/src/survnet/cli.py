"""Command line entry point: ``survnet theory|simulate|compare|preset|selftest``.

Exit codes: 0 success, 1 validation or usage error, 2 statistical gate
failure, 3 I/O failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .experiments import (
    DEFAULT_SAMPLES,
    DEFAULT_SEED,
    PRESETS,
    SweepSpec,
    rows_to_csv,
    run_compare,
    run_preset,
    run_selftest,
    theory_for,
)
from .geometry import Disk
from .montecarlo import estimate_disconnect
from .network import NetworkError
from .scenario import ScenarioError, ScenarioInvalid, load_document, scenario_from_dict

EXIT_OK, EXIT_USAGE, EXIT_GATE, EXIT_IO = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors; 2 is reserved for gate failures here
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="survnet", description="Connection probability of a network under a random half-plane disaster.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, scenario=True, sim=True):
        if scenario:
            sp.add_argument("--scenario", required=True, metavar="PATH", help="scenario JSON file")
        if sim:
            sp.add_argument("--samples", type=_positive, default=DEFAULT_SAMPLES, metavar="N")
            sp.add_argument("--seed", type=int, default=DEFAULT_SEED, metavar="S")
            sp.add_argument("--workers", type=_positive, default=1, metavar="W")

    common(sub.add_parser("theory", help="closed-form disconnection probability"), sim=False)
    common(sub.add_parser("simulate", help="Monte Carlo disconnection probability"))

    sp = sub.add_parser("compare", help="theory vs simulation, optionally swept; writes CSV")
    common(sp)
    sp.add_argument("--sweep", metavar="NAME=START:STOP:STEP")
    sp.add_argument("--out", metavar="PATH", help="CSV path (default: stdout)")

    sp = sub.add_parser("preset", help="run a shipped experiment")
    sp.add_argument("name", choices=PRESETS)
    common(sp, scenario=False)
    sp.add_argument("--out", metavar="DIR", default="results")

    sp = sub.add_parser("selftest", help="check the line sampler against known hit rates")
    common(sp, scenario=False)
    sp.add_argument("--radius", type=float, default=2.0, help="radius of the disk area of interest")
    sp.add_argument("--biased", action="store_true", help=argparse.SUPPRESS)
    return p


def _cmd_theory(args) -> int:
    sc = scenario_from_dict(load_document(args.scenario))
    th = theory_for(sc)
    if th.applicability == "bound":
        print(f"{sc.id}: p_disconnect<={th.p_disconnect!r} applicability=bound (weakest-arrangement value)")
    else:
        print(f"{sc.id}: p_disconnect={th.p_disconnect!r} p_connect={1.0 - th.p_disconnect!r} applicability={th.applicability}")
    return EXIT_OK


def _cmd_simulate(args) -> int:
    sc = scenario_from_dict(load_document(args.scenario))
    est = estimate_disconnect(sc, args.samples, args.seed, workers=args.workers)
    print(f"{sc.id}: p_disconnect={est.p_hat!r} stderr={est.stderr!r} n={est.n} seed={est.seed}")
    return EXIT_OK


def _cmd_compare(args) -> int:
    doc = load_document(args.scenario)
    sweep = SweepSpec.parse(args.sweep) if args.sweep else None
    rows = run_compare(doc, sweep, args.samples, args.seed, out_path=args.out, workers=args.workers)
    if args.out is None:
        sys.stdout.write(rows_to_csv(rows))
    return EXIT_GATE if any(r.pass_flag == "false" for r in rows) else EXIT_OK


def _cmd_preset(args) -> int:
    out = run_preset(args.name, args.samples, args.seed, args.out, workers=args.workers)
    bad = 0
    for fname, rows in out.items():
        print(f"wrote {Path(args.out) / fname} ({len(rows)} rows)")
        bad += sum(r.pass_flag == "false" for r in rows)
    return EXIT_GATE if bad else EXIT_OK


def _cmd_selftest(args) -> int:
    if not args.radius > 0:
        raise ValueError("--radius must be positive")
    rho_power = 2.0 if args.biased else 1.0
    reports, ok = run_selftest(Disk((0.0, 0.0), args.radius), args.samples, args.seed, rho_power)
    for r in reports:
        status = "PASS" if r.passed else "FAIL"
        print(
            f"{status} {r.label:<9} target={r.target:.6f} p_hat={r.estimate.p_hat:.6f} "
            f"diff={r.abs_diff:.2e} gate={r.gate:.2e} n={r.estimate.n}"
        )
    return EXIT_OK if ok else EXIT_GATE


COMMANDS = {
    "theory": _cmd_theory,
    "simulate": _cmd_simulate,
    "compare": _cmd_compare,
    "preset": _cmd_preset,
    "selftest": _cmd_selftest,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except ScenarioInvalid as exc:
        print("error: scenario failed validation:", file=sys.stderr)
        for d in exc.diagnostics:
            print(f"  - {d}", file=sys.stderr)
        return EXIT_USAGE
    except (ScenarioError, NetworkError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
