"""Command-line interface.

Subcommands, one per artifact of the model:

* ``mode``   -- dispersion table omega_c(z), kappa1(z) and derivatives,
* ``steady`` -- enumeration of all classical operating points,
* ``scan``   -- adiabatic laser-frequency scan(s), the hysteresis experiment,
* ``sweep``  -- full pipeline over temperature / power / detuning / z0,
* ``verify`` -- invariant battery (Lyapunov residual, ODE + Monte Carlo
                oracles, physicality).

Output is CSV with a '#'-prefixed header block carrying the resolved
configuration (hash, every effective parameter, assumed= markers) so each
file can be re-run exactly.  Exit codes: 0 success, 2 invalid configuration,
3 instability encountered, 4 internal numerical failure.
"""

from __future__ import annotations

import argparse
import sys

from . import __version__
from .config import ResolvedConfig, load_config_file, parse_set_overrides, resolve
from .errors import ConfigError, OptomembraneError, StabilityError
from .harness import (
    MODE_COLUMNS,
    SCAN_COLUMNS,
    STEADY_COLUMNS,
    SWEEP_COLUMNS,
    SweepSpec,
    run_mode_table,
    run_scan,
    run_steady_table,
    run_sweep,
)
from .verify import run_verification

_UNITS = {
    "z_m": "m", "q": "dimensionless", "omega_c_rad_s": "rad/s",
    "kappa1_rad_s": "rad/s", "domega_dq_rad_s": "rad/s", "dkappa1_dq_rad_s": "rad/s",
    "d2omega_dq2_rad_s": "rad/s", "branch": "-", "q_s": "dimensionless",
    "alpha_sq": "photons", "delta_rad_s": "rad/s", "kappa_T_rad_s": "rad/s",
    "stable": "bool", "margin_rad_s": "rad/s", "residual_q": "dimensionless",
    "transmission_W": "W", "direction": "-", "omega_l_rad_s": "rad/s",
    "offset_rad_s": "rad/s", "variable": "-", "value": "key-units", "status": "-",
    "g_rad_s": "rad/s", "n_phonon": "quanta", "log_negativity": "dimensionless",
    "eta_minus": "dimensionless", "n_bath": "quanta", "warnings": "-",
    "check": "-", "passed": "bool", "measured": "check-specific",
    "bound": "check-specific", "detail": "-",
}

VERIFY_COLUMNS = ["check", "passed", "measured", "bound", "detail"]


def _fmt(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _emit(out_path, header_lines, columns, records) -> None:
    lines = list(header_lines)
    lines.append("# columns: " + ",".join(columns))
    lines.append("# units: " + ",".join(_UNITS.get(c, "-") for c in columns))
    lines.append(",".join(columns))
    for rec in records:
        lines.append(",".join(_fmt(rec[c]) for c in columns))
    text = "\n".join(lines) + "\n"
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _header(cfg: ResolvedConfig, command: str, seed: int, extra: dict | None = None) -> list[str]:
    lines = [f"# optomembrane {__version__}", f"# command = {command}"]
    lines += cfg.header_lines()
    lines.append(f"# seed = {seed}")
    for key in sorted(extra or {}):
        lines.append(f"# {key} = {_fmt(extra[key])}")
    return lines


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="optomembrane",
        description="Steady states and quantum fluctuations of a membrane in a driven cavity",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", help="flat key=value configuration file")
        sp.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        help="override a configuration key (repeatable)")
        sp.add_argument("--out", help="output CSV path (default: stdout)")
        sp.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("mode", help="dispersion table over membrane position")
    common(p)
    p.add_argument("--zmin", type=float, help="window start (m); default z0 - lambda/4")
    p.add_argument("--zmax", type=float, help="window end (m); default z0 + lambda/4")
    p.add_argument("--points", type=int, default=401)

    p = sub.add_parser("steady", help="enumerate classical steady states")
    common(p)

    p = sub.add_parser("scan", help="adiabatic laser-frequency scan")
    common(p)
    p.add_argument("--scan-min", type=float, required=True,
                   help="lowest omega_l - omega_b (rad/s)")
    p.add_argument("--scan-max", type=float, required=True,
                   help="highest omega_l - omega_b (rad/s)")
    p.add_argument("--points", type=int, default=200)
    p.add_argument("--direction", choices=("up", "down", "both"), default="both")

    p = sub.add_parser("sweep", help="pipeline sweep over one variable")
    common(p)
    p.add_argument("--var", required=True,
                   choices=("temperature", "power", "detuning", "z0"))
    p.add_argument("--min", type=float, required=True, dest="vmin")
    p.add_argument("--max", type=float, required=True, dest="vmax")
    p.add_argument("--points", type=int, default=25)
    p.add_argument("--log", action="store_true", help="log-spaced sweep values")
    p.add_argument("--branch", choices=("lower", "upper"), default="lower")

    p = sub.add_parser("verify", help="run the invariant battery")
    common(p)
    p.add_argument("--traj", type=int, default=600,
                   help="Monte Carlo trajectory count")
    p.add_argument("--dt-factor", type=float, default=0.001,
                   help="time step as a fraction of 1/max|A|")
    p.add_argument("--horizons", type=float, default=10.0,
                   help="burn-in in units of the slowest relaxation time")
    p.add_argument("--sigma", type=float, default=3.0,
                   help="Monte Carlo agreement band in standard errors")
    return parser


def _dispatch(args) -> int:
    file_values = load_config_file(args.config) if args.config else {}
    cfg = resolve(file_values, parse_set_overrides(args.set))
    params = cfg.params

    if args.command == "mode":
        records = run_mode_table(params, args.zmin, args.zmax, args.points)
        _emit(args.out, _header(cfg, "mode", args.seed), MODE_COLUMNS, records)
        return 0

    if args.command == "steady":
        records = run_steady_table(params)
        _emit(args.out, _header(cfg, "steady", args.seed), STEADY_COLUMNS, records)
        return 0

    if args.command == "scan":
        records = run_scan(
            params, (args.scan_min, args.scan_max), args.direction, args.points
        )
        extra = {"scan_min_rad_s": args.scan_min, "scan_max_rad_s": args.scan_max,
                 "direction": args.direction, "points": args.points}
        _emit(args.out, _header(cfg, "scan", args.seed, extra), SCAN_COLUMNS, records)
        return 0

    if args.command == "sweep":
        spec = SweepSpec(
            base=params,
            variable=args.var,
            vmin=args.vmin,
            vmax=args.vmax,
            points=args.points,
            scale="log" if args.log else "linear",
            branch=args.branch,
        )
        records = run_sweep(spec)
        extra = {"sweep_var": args.var, "sweep_min": args.vmin,
                 "sweep_max": args.vmax, "sweep_points": args.points,
                 "sweep_scale": spec.scale, "sweep_branch": args.branch}
        _emit(args.out, _header(cfg, "sweep", args.seed, extra), SWEEP_COLUMNS, records)
        return 0

    if args.command == "verify":
        report = run_verification(
            params,
            n_traj=args.traj,
            dt_factor=args.dt_factor,
            horizons=args.horizons,
            seed=args.seed,
            mc_sigmas=args.sigma,
        )
        extra = {f"summary_{k}": v for k, v in report.summary.items()}
        extra.update(traj=args.traj, dt_factor=args.dt_factor,
                     horizons=args.horizons, sigma=args.sigma)
        records = [
            {"check": c.name, "passed": c.passed, "measured": c.value,
             "bound": c.bound, "detail": c.detail}
            for c in report.checks
        ]
        _emit(args.out, _header(cfg, "verify", args.seed, extra), VERIFY_COLUMNS, records)
        return 0 if report.passed else 4

    raise AssertionError(f"unhandled command {args.command!r}")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _dispatch(args)
    except ConfigError as err:
        print(f"configuration error: {err}", file=sys.stderr)
        return 2
    except FileNotFoundError as err:
        print(f"configuration error: {err}", file=sys.stderr)
        return 2
    except StabilityError as err:
        print(f"instability: {err}", file=sys.stderr)
        return 3
    except ValueError as err:
        print(f"invalid request: {err}", file=sys.stderr)
        return 2
    except OptomembraneError as err:
        print(f"numerical failure: {err}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
