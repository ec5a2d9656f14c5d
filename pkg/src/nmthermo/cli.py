"""Command-line front end: trajectory tables, the s-sweep, and operator checks.

    nmthermo dissipative --out fig1.csv
    nmthermo dephasing --s 1.5 --out fig2_s15.csv
    nmthermo measure --out fig3.csv
    nmthermo check --operators ops.json
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from typing import Sequence

import numpy as np

from . import io
from .dynamics import (
    DecoherenceTable, OhmicParams, coherence_factor, dephasing_trajectory, dissipative_flows,
    dissipative_trajectory, dephasing_channel,
)
from .errors import DegenerateHamiltonian, NotAState, QuadratureFailure
from .nonmarkov import SearchGrid, measure_general, s_grid, sweep
from .qubit import BlochState, FieldVector, is_incoherent_sufficient, is_unital_sufficient
from .thermo import accumulate, dephasing_heat

EXIT_USAGE = 2
EXIT_NUMERICS = 3
FIG1_STATE = (0.5, 0.0, 0.5)


class UsageError(Exception):
    pass


def _triple(text: str) -> tuple[float, float, float]:
    parts = text.split(",")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected x,y,z, got {text!r}")
    try:
        return tuple(float(p) for p in parts)  # type: ignore[return-value]
    except ValueError:
        raise argparse.ArgumentTypeError(f"non-numeric component in {text!r}") from None


def _require(ok: bool, flag: str, msg: str):
    if not ok:
        raise UsageError(f"{flag}: {msg}")


def _common_output(p: argparse.ArgumentParser, fmt: bool = False):
    p.add_argument("--out", default="-", help="output path, '-' for stdout")
    p.add_argument("--precision", type=int, default=io.FULL_PRECISION, help="significant digits")
    if fmt:
        p.add_argument("--format", choices=("csv", "json"), default="csv", help="output format")


def _trajectory_flags(p, t_max, steps):
    p.add_argument("--omega0", type=float, default=1.0, help="level splitting, H = omega0 sigma_z")
    p.add_argument("--t-max", type=float, default=t_max, help="final time")
    p.add_argument("--steps", type=int, default=steps, help="number of time samples")


def build_parser() -> argparse.ArgumentParser:
    fmt = argparse.ArgumentDefaultsHelpFormatter
    parser = argparse.ArgumentParser(prog="nmthermo", description=__doc__.splitlines()[0], formatter_class=fmt)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("dissipative", formatter_class=fmt,
                       help="sigma_x channel at constant rate (closed form)")
    p.add_argument("--gamma", type=float, default=0.1, help="Lindblad rate")
    _trajectory_flags(p, 50.0, 2000)
    p.add_argument("--r0", type=_triple, default=FIG1_STATE, help="initial Bloch vector x,y,z")
    _common_output(p)

    p = sub.add_parser("dephasing", formatter_class=fmt,
                       help="sigma_z channel with the Ohmic-like rate (closed form)")
    p.add_argument("--s", type=float, default=3.5, help="ohmicity")
    p.add_argument("--omega-c", type=float, default=1.0, help="bath cutoff frequency")
    _trajectory_flags(p, 10.0, 2000)
    p.add_argument("--r0", type=_triple, default=(math.sqrt(1 - 0.05**2), 0.0, 0.05),
                   help="initial Bloch vector x,y,z")
    _common_output(p)

    p = sub.add_parser("measure", formatter_class=fmt,
                       help="heat and coherence measures over s (csv) or one pipeline run (json)")
    p.add_argument("--s-min", type=float, default=0.0, help="first ohmicity of the sweep")
    p.add_argument("--s-max", type=float, default=8.0, help="last ohmicity of the sweep")
    p.add_argument("--s-step", type=float, default=0.05, help="sweep step")
    p.add_argument("--s", type=float, default=3.5, help="ohmicity for --format json")
    p.add_argument("--omega0", type=float, default=1.0, help="level splitting")
    p.add_argument("--omega-c", type=float, default=1.0, help="bath cutoff frequency")
    p.add_argument("--functional", choices=("Q_ent", "C", "S", "U"), default="Q_ent",
                   help="monitored function for --format json")
    p.add_argument("--refine", type=int, default=12, help="local refinement rounds for --format json")
    p.add_argument("--jobs", type=int, default=1, help="worker processes for the sweep")
    _common_output(p, fmt=True)

    p = sub.add_parser("check", formatter_class=fmt,
                       help="sufficient unitality / incoherence checks for Lindblad operators")
    p.add_argument("--operators", required=True, help="JSON operator file")
    p.add_argument("--omega0", type=float, default=1.0, help="level splitting defining the energy basis")
    p.add_argument("--tol", type=float, default=1e-10, help="relative tolerance")
    return parser


def _validate(args):
    if getattr(args, "steps", None) is not None:
        _require(args.steps >= 2, "--steps", "must be >= 2")
    if getattr(args, "t_max", None) is not None:
        _require(math.isfinite(args.t_max) and args.t_max > 0, "--t-max", "must be > 0")
    if getattr(args, "s_step", None) is not None:
        _require(math.isfinite(args.s_step) and args.s_step > 0, "--s-step", "must be > 0")
        _require(0 <= args.s_min <= args.s_max, "--s-min", "need 0 <= s-min <= s-max")
    if getattr(args, "precision", None) is not None:
        _require(1 <= args.precision <= 17, "--precision", "must be between 1 and 17")
    if getattr(args, "gamma", None) is not None:
        _require(math.isfinite(args.gamma) and args.gamma >= 0, "--gamma", "must be >= 0")
    if getattr(args, "s", None) is not None:
        _require(math.isfinite(args.s) and args.s >= 0, "--s", "must be >= 0")
    if getattr(args, "omega_c", None) is not None:
        _require(math.isfinite(args.omega_c) and args.omega_c > 0, "--omega-c", "must be > 0")
    if getattr(args, "jobs", None) is not None:
        _require(args.jobs >= 1, "--jobs", "must be >= 1")
    if getattr(args, "refine", None) is not None:
        _require(args.refine >= 0, "--refine", "must be >= 0")
    _require(math.isfinite(args.omega0), "--omega0", "must be finite")
    if getattr(args, "r0", None) is not None:
        try:
            BlochState.validated(args.r0)
        except NotAState as exc:
            raise UsageError(f"--r0: {exc}") from None


def cmd_dissipative(args) -> int:
    grid = np.linspace(0.0, args.t_max, args.steps)
    traj = dissipative_trajectory(args.r0, grid, args.gamma, args.omega0)
    thermo = accumulate(traj, FieldVector.along_z(args.omega0))
    cols = thermo.columns()
    if np.allclose(args.r0, FIG1_STATE, rtol=0, atol=1e-15):
        cols["Qdot_ent"], cols["Cdot"] = dissipative_flows(grid, args.gamma, args.omega0)
    io.write_csv(args.out, cols, args.precision)
    return 0


def cmd_dephasing(args) -> int:
    p = OhmicParams(args.s, args.omega_c)
    grid = np.linspace(0.0, args.t_max, args.steps)
    factor = DecoherenceTable(p, t_max=args.t_max)(grid)
    traj = dephasing_trajectory(args.r0, grid, p, factor=lambda _t: factor)
    thermo = accumulate(traj, FieldVector.along_z(args.omega0))
    cols = thermo.columns()
    r0 = float(np.linalg.norm(args.r0))
    z_r0 = args.r0[2] / r0 if r0 > 0 else 0.0
    # closed form evaluated with direct quadrature, independent of the table
    cols["Q_closed"] = dephasing_heat(grid, lambda t: coherence_factor(t, p), z_r0, r0, args.omega0)
    io.write_csv(args.out, cols, args.precision)
    return 0


def cmd_measure(args) -> int:
    if args.format == "json":
        p = OhmicParams(args.s, args.omega_c)
        channel = dephasing_channel(p)
        res = measure_general(channel, args.functional, search=SearchGrid(refine_levels=args.refine),
                              field=FieldVector.along_z(args.omega0))
        with io.open_output(args.out) as fh:
            json.dump(res.to_json(), fh, indent=2)
            fh.write("\n")
        return 0
    table = sweep(s_grid(args.s_min, args.s_max, args.s_step), args.omega0, args.omega_c, args.jobs)
    cols = {"s": table.s, "N_Q": table.N_Q, "N_C": table.N_C, "z_max": table.z_max}
    z_text = [io.format_log_number(v, args.precision) for v in table.log_z_max]
    io.write_csv(args.out, cols, args.precision, text_columns={"z_max": z_text})
    return 0


def cmd_check(args) -> int:
    try:
        terms = io.load_operators(args.operators)
    except OSError as exc:
        raise UsageError(f"--operators: {exc.strerror}: {args.operators}") from None
    except io.OperatorFileError as exc:
        raise UsageError(f"--operators: {exc}") from None
    field = FieldVector.along_z(args.omega0)
    try:
        for k, term in enumerate(terms):
            unital = is_unital_sufficient([term], args.tol)
            incoherent = is_incoherent_sufficient([term], field, args.tol)
            print(f"term {k}: unital-sufficient {'yes' if unital else 'no'}, "
                  f"incoherent-sufficient {'yes' if incoherent else 'no'}")
    except DegenerateHamiltonian as exc:
        raise UsageError(f"--omega0: {exc}") from None
    return 0


COMMANDS = {
    "dissipative": cmd_dissipative,
    "dephasing": cmd_dephasing,
    "measure": cmd_measure,
    "check": cmd_check,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _validate(args)
        return COMMANDS[args.command](args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"nmthermo {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except QuadratureFailure as exc:
        print(f"nmthermo {args.command}: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICS


if __name__ == "__main__":
    sys.exit(main())
