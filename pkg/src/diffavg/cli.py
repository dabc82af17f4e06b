"""Command-line driver for synthesis, field extraction, reconstruction,
averaging, and the bundled experiment reproduction.

Exit codes: 0 success, 1 usage error, 2 validation error, 3 numerical
failure.  Failures emit one line ``diffavg: <kind>: <reason>`` on stderr.
All outputs are deterministic given flags and seed; no timestamps or
timings go into output files.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path
from typing import Sequence

import numpy as np

from . import synth
from .averaging import (
    average_diffeomorphisms,
    average_fields,
    distance_weights,
    euclidean_average,
    fold_check,
)
from .diffops import curl2d, jacobian_det
from .errors import NumericalError, ValidationError
from .gridio import read_field, read_grid, write_field, write_grid
from .grids import DomainSpec, GridTransform, WeightVector, grid_rms_distance, identity_grid, rms_displacement
from .reconstruct import ConvergenceReport, ReconstructOptions, reconstruct


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _num(x: float) -> str:
    return format(float(x), ".17g")


def _parse_center(text: str) -> tuple[float, float]:
    parts = text.split(",")
    if len(parts) != 2:
        raise _UsageError(f"--center expects 'cx,cy', got {text!r}")
    try:
        return float(parts[0]), float(parts[1])
    except ValueError:
        raise _UsageError(f"--center expects 'cx,cy', got {text!r}") from None


def _load_grids(text: str) -> list[GridTransform]:
    paths = [p for p in text.split(",") if p]
    if not paths:
        raise _UsageError("--grids expects a comma-separated list of paths")
    return [read_grid(p) for p in paths]


def _parse_weights(text: str, grids: list[GridTransform]) -> WeightVector:
    if text == "uniform":
        return WeightVector.uniform(len(grids))
    if text == "distance":
        return distance_weights(grids)
    try:
        raw = [float(p) for p in text.split(",")]
    except ValueError:
        raise _UsageError(
            f"--weights expects 'uniform', 'distance', or comma-separated numbers, got {text!r}"
        ) from None
    return WeightVector.normalized(raw)


def _write_report(report: ConvergenceReport, path: str | Path) -> None:
    with Path(path).open("w", encoding="ascii", newline="") as f:
        report.write_csv(f)


def _opts_from(args) -> ReconstructOptions:
    return ReconstructOptions(
        max_iters=args.max_iters,
        energy_decrease_target=args.target_decrease,
    )


def _require_target(report: ConvergenceReport, target: float) -> None:
    if report.stopping_reason != "target_reached":
        raise NumericalError(
            f"energy decrease target {target} not reached "
            f"(stopped on {report.stopping_reason} at {report.energy_decrease:.4f})"
        )


def _cmd_synth(args) -> int:
    spec = DomainSpec(args.nx, args.ny)
    if args.kind == "identity":
        g = identity_grid(spec)
    elif args.kind == "phi0":
        g = synth.synthetic_phi0(spec, args.amplitude, args.modes, args.seed)
    else:
        g = synth.windowed_rotation(
            spec,
            np.radians(args.theta_deg),
            _parse_center(args.center),
            args.r_inner,
            args.r_outer,
        )
    write_grid(g, args.out)
    return 0


def _cmd_fields(args) -> int:
    g = read_grid(args.grid)
    write_field(jacobian_det(g), args.out_jac)
    write_field(curl2d(g), args.out_curl)
    return 0


def _cmd_reconstruct(args) -> int:
    f0 = read_field(args.jac)
    g0 = read_field(args.curl)
    init = read_grid(args.init) if args.init else identity_grid(f0.spec)
    result, report = reconstruct(init, f0, g0, _opts_from(args))
    write_grid(result, args.out)
    if args.report:
        _write_report(report, args.report)
    _require_target(report, args.target_decrease)
    return 0


def _cmd_average(args) -> int:
    grids = _load_grids(args.grids)
    w = _parse_weights(args.weights, grids)
    result, report = average_diffeomorphisms(grids, w, _opts_from(args))
    write_grid(result, args.out)
    if args.report:
        _write_report(report, args.report)
    _require_target(report, args.target_decrease)
    return 0


def _cmd_euclid(args) -> int:
    grids = _load_grids(args.grids)
    w = _parse_weights(args.weights, grids)
    write_grid(euclidean_average(grids, w), args.out)
    return 0


def _cmd_check(args) -> int:
    g = read_grid(args.grid)
    min_jac, nonpositive = fold_check(g)
    line = f"min_jac={_num(min_jac)} nonpositive={nonpositive}"
    if args.ref:
        ref = read_grid(args.ref)
        line += f" rms={_num(grid_rms_distance(g, ref))}"
    print(line)
    return 0


def _cmd_repro(args) -> int:
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    spec = DomainSpec(args.size, args.size)
    summary: list[tuple[str, str]] = []

    phi0 = synth.synthetic_phi0(spec)
    write_grid(phi0, out_dir / "phi0.grid")
    f0 = jacobian_det(phi0)
    g0 = curl2d(phi0)
    write_field(f0, out_dir / "phi0_jac.field")
    write_field(g0, out_dir / "phi0_curl.field")
    disp = rms_displacement(phi0)
    summary.append(("phi0_rms_displacement", _num(disp)))

    for tag, target in (("90", 0.90), ("99", 0.99)):
        t0 = time.perf_counter()
        result, report = reconstruct(
            identity_grid(spec), f0, g0,
            ReconstructOptions(energy_decrease_target=target, max_iters=args.max_iters),
        )
        elapsed = time.perf_counter() - t0
        write_grid(result, out_dir / f"recon{tag}.grid")
        _write_report(report, out_dir / f"recon{tag}_report.csv")
        rms = grid_rms_distance(result, phi0)
        summary.append((f"recon{tag}_energy_decrease", _num(report.energy_decrease)))
        summary.append((f"recon{tag}_rms_vs_phi0", _num(rms)))
        summary.append((f"recon{tag}_rms_over_displacement", _num(rms / disp)))
        summary.append((f"recon{tag}_min_interior_jac", _num(result.min_interior_jacobian)))
        print(
            f"reconstruction target {target}: decrease={report.energy_decrease:.4f} "
            f"rms={rms:.3e} ({rms / disp:.3f} of displacement) in {elapsed:.2f}s",
            file=sys.stderr,
        )
        _require_target(report, target)

    theta = np.radians(args.theta_deg)
    phi1, phi2 = synth.rotated_pair(phi0, theta)
    write_grid(phi1, out_dir / "phi1.grid")
    write_grid(phi2, out_dir / "phi2.grid")
    w = WeightVector.uniform(2)

    euclid = euclidean_average([phi1, phi2], w)
    write_grid(euclid, out_dir / "euclid.grid")
    rms_euclid = grid_rms_distance(euclid, phi0)
    min_jac_euclid, nonpos_euclid = fold_check(euclid)

    f0_avg, g0_avg = average_fields([phi1, phi2], w)
    write_field(f0_avg, out_dir / "avg_jac.field")
    write_field(g0_avg, out_dir / "avg_curl.field")
    t0 = time.perf_counter()
    averaged, report = average_diffeomorphisms(
        [phi1, phi2], w,
        ReconstructOptions(energy_decrease_target=0.99, max_iters=args.max_iters),
    )
    elapsed = time.perf_counter() - t0
    write_grid(averaged, out_dir / "average.grid")
    _write_report(report, out_dir / "average_report.csv")
    rms_avg = grid_rms_distance(averaged, phi0)

    summary.append(("rotation_theta_deg", _num(args.theta_deg)))
    summary.append(("euclid_rms_vs_phi0", _num(rms_euclid)))
    summary.append(("euclid_min_interior_jac", _num(min_jac_euclid)))
    summary.append(("euclid_nonpositive_nodes", str(nonpos_euclid)))
    summary.append(("average_rms_vs_phi0", _num(rms_avg)))
    summary.append(("average_min_interior_jac", _num(averaged.min_interior_jacobian)))
    summary.append(("average_over_euclid_rms", _num(rms_avg / rms_euclid)))
    print(
        f"averaging at theta={args.theta_deg} deg: rms(avg)={rms_avg:.3e} "
        f"rms(euclid)={rms_euclid:.3e} ratio={rms_avg / rms_euclid:.3f} in {elapsed:.2f}s",
        file=sys.stderr,
    )

    with (out_dir / "summary.csv").open("w", encoding="ascii", newline="") as f:
        f.write("name,value\n")
        for name, value in summary:
            f.write(f"{name},{value}\n")
    for name, value in summary:
        print(f"{name}={value}")
    _require_target(report, 0.99)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="diffavg", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="emit identity/phi0/rotation fixture grids")
    p.add_argument("--nx", type=int, default=65)
    p.add_argument("--ny", type=int, default=65)
    p.add_argument("--kind", choices=("identity", "phi0", "rotation"), required=True)
    p.add_argument("--amplitude", type=float, default=synth.DEFAULT_AMPLITUDE)
    p.add_argument("--modes", type=int, default=synth.DEFAULT_MODES)
    p.add_argument("--theta-deg", type=float, default=synth.DEFAULT_THETA_DEG)
    p.add_argument("--center", default="0.5,0.5")
    p.add_argument("--r-inner", type=float, default=synth.DEFAULT_R_INNER)
    p.add_argument("--r-outer", type=float, default=synth.DEFAULT_R_OUTER)
    p.add_argument("--seed", type=int, default=synth.DEFAULT_SEED)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("fields", help="write the Jacobian determinant and curl of a grid")
    p.add_argument("--grid", required=True)
    p.add_argument("--out-jac", required=True)
    p.add_argument("--out-curl", required=True)
    p.set_defaults(func=_cmd_fields)

    p = sub.add_parser("reconstruct", help="build a grid matching target fields")
    p.add_argument("--jac", required=True)
    p.add_argument("--curl", required=True)
    p.add_argument("--init", default=None)
    p.add_argument("--target-decrease", type=float, default=0.90)
    p.add_argument("--max-iters", type=int, default=5000)
    p.add_argument("--report", default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_reconstruct)

    p = sub.add_parser("average", help="field-based average of grids")
    p.add_argument("--grids", required=True, help="comma-separated grid files")
    p.add_argument("--weights", default="uniform")
    p.add_argument("--target-decrease", type=float, default=0.99)
    p.add_argument("--max-iters", type=int, default=5000)
    p.add_argument("--out", required=True)
    p.add_argument("--report", default=None)
    p.set_defaults(func=_cmd_average)

    p = sub.add_parser("euclid", help="nodewise Euclidean average of grids")
    p.add_argument("--grids", required=True, help="comma-separated grid files")
    p.add_argument("--weights", default="uniform")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_euclid)

    p = sub.add_parser("check", help="fold diagnostics and RMS distance to a reference")
    p.add_argument("--grid", required=True)
    p.add_argument("--ref", default=None)
    p.set_defaults(func=_cmd_check)

    p = sub.add_parser("repro", help="run the reconstruction and averaging experiments")
    p.add_argument("--size", type=int, default=65)
    p.add_argument("--theta-deg", type=float, default=synth.DEFAULT_THETA_DEG)
    p.add_argument("--max-iters", type=int, default=40000)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=_cmd_repro)

    return parser


def cli_main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except _UsageError as e:
        print(f"diffavg: usage: {e}", file=sys.stderr)
        return 1
    except SystemExit as e:
        # argparse exits directly for --help
        return int(e.code or 0)
    except ValidationError as e:
        print(f"diffavg: validation: {e}", file=sys.stderr)
        return 2
    except NumericalError as e:
        print(f"diffavg: numerical: {e}", file=sys.stderr)
        return 3
    except OSError as e:
        print(f"diffavg: validation: {e}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(cli_main())
