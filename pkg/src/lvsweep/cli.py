"""Command-line interface.

Subcommands: simulate, experiment, predict, ode, genealogy, jumps,
bdp-check.  Progress and logs go to stderr; machine-readable output goes
to files under --out (or stdout for predict).  Exit codes: 0 ok,
1 tolerance breach, 2 validation error, 3 runtime error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__, dynsys, harness, ssa
from .errors import ParameterError, ValidationError

EXIT_OK = 0
EXIT_TOLERANCE = 1
EXIT_VALIDATION = 2
EXIT_RUNTIME = 3


def _common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", required=True, help="experiment JSON path")
    parser.add_argument("--seed", type=int, default=None,
                        help="override the config seed_base")
    parser.add_argument("--workers", type=int, default=1,
                        help="worker processes for replicates")
    parser.add_argument("--out", default=None, help="output directory")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lvsweep",
        description="Two-locus selective-sweep simulator and analytics",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run one replicate, write trajectory CSV")
    _common(p)
    p.add_argument("--replicate", type=int, default=0, help="replicate index")
    p.add_argument("--dt", type=float, default=None,
                   help="trajectory sampling step (default: full events)")

    p = sub.add_parser("experiment", help="run the configured experiment")
    _common(p)

    p = sub.add_parser("predict", help="print closed-form predictions")
    _common(p)

    p = sub.add_parser("ode", help="integrate the 4D limit with quadrature, write CSV")
    _common(p)
    p.add_argument("--r", type=float, required=True, help="recombination probability")
    p.add_argument("--t-end", type=float, required=True)
    p.add_argument("--points", type=int, default=1000)

    for name in ("genealogy", "jumps", "bdp-check"):
        p = sub.add_parser(name, help=f"run the {name} scenario from the config")
        _common(p)

    return parser


def _load(args) -> harness.ExperimentSpec:
    with open(args.config) as fh:
        doc = json.load(fh)
    if args.seed is not None:
        doc["seed_base"] = args.seed
    return harness.load_spec(doc)


def _out_dir(args) -> Path:
    out = Path(args.out) if args.out else Path(".")
    out.mkdir(parents=True, exist_ok=True)
    return out


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _dispatch(args)
    except (ValidationError, ParameterError, FileNotFoundError,
            json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


def _dispatch(args) -> int:
    spec = _load(args)

    if args.command == "predict":
        print(harness.predict_table(spec))
        return EXIT_OK

    if args.command == "simulate":
        scaling = spec.scaling[0]
        if spec.scenario == "soft":
            initial = ssa.soft_initial_state(spec.z, scaling.K)
        else:
            initial = ssa.hard_initial_state(spec.params, scaling.K, spec.z_Ab1_frac)
        mode = "sampled" if args.dt else "full"
        cfg = ssa.SimConfig(
            initial_state=initial,
            seed=ssa.replicate_seed(spec.seed_base, args.replicate),
            max_events=min(spec.max_events, 2_000_000) if mode == "full" else spec.max_events,
            epsilon=spec.epsilon,
            record_mode=mode,
            dt_sample=args.dt or 0.0,
        )
        outcome, traj = ssa.run_sweep(spec.params, scaling, cfg)
        out = _out_dir(args)
        path = out / f"trajectory_{args.replicate}.csv"
        traj.to_csv(path)
        print(json.dumps({
            "status": outcome.status, "fixed": outcome.fixed,
            "t_ext": outcome.t_ext, "p_ab1_final": outcome.p_ab1_final,
            "events_used": outcome.events_used, "trajectory": str(path),
        }, sort_keys=True))
        return EXIT_OK

    if args.command == "ode":
        scaling = spec.scaling[0]
        if spec.z is None:
            raise ValidationError("ode command requires z in the config")
        z = dynsys.DenseState(*spec.z)
        import numpy as np

        sol = dynsys.integrate_lv4_with_F(
            spec.params, args.r, z, args.t_end,
            t_eval=np.linspace(0.0, args.t_end, args.points),
        )
        out = _out_dir(args)
        path = out / "ode_trajectory.csv"
        dynsys.trajectory_csv(path, sol)
        print(json.dumps({"trajectory": str(path),
                          "F_at_t_end": float(sol.y[5, -1])}, sort_keys=True))
        return EXIT_OK

    if args.command in ("experiment", "genealogy", "jumps", "bdp-check"):
        if args.command != "experiment":
            scenario = args.command if args.command != "bdp-check" else "bdp-check"
            if spec.scenario != scenario:
                doc = spec.to_json_dict()
                doc["scenario"] = scenario
                spec = harness.load_spec(doc)
        report = harness.run_experiment(
            spec, out_dir=args.out, workers=max(1, args.workers)
        )
        breaches = harness.report_breaches(report)
        if args.out is None:
            print(json.dumps(report, indent=2, sort_keys=True))
        for b in breaches:
            print(f"tolerance breach: {b}", file=sys.stderr)
        return EXIT_TOLERANCE if breaches else EXIT_OK

    raise ValidationError(f"unknown command {args.command!r}")


if __name__ == "__main__":
    sys.exit(main())
