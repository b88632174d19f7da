"""Command-line front end.

Subcommands: case, scan, fig1, nr, threshold, fock, verify-all. Angle
flags accept plain numbers or multiples of pi ('pi', '-pi', '0.5pi').
Exit codes: 0 pass, 1 usage error, 2 verification/detection failure.
Tables are CSV (or JSON with --format json) at full double precision so
runs are reproducible byte for byte.
"""
from __future__ import annotations

import argparse
import contextlib
import json
import math
import sys
from typing import TextIO

import numpy as np

from .backflow_scan import (
    DEFAULT_TOL,
    NoSignChange,
    ScanGrid,
    backflow_threshold,
    find_backflow_regions,
    region_grid,
    scan_current,
    write_grid_csv,
    write_samples_csv,
)
from .case_catalog import CASE_IDS, CaseSpec, build_case, critical_amplitude, verify_case
from .currents import NodeSingular, nr_velocity, quantum_potential
from .dirac_states import PhysicalParams
from .fock_toy import MAX_MODES, build_lattice, current_charge_report

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VERIFY = 2


class _Parser(argparse.ArgumentParser):
    """argparse exits with status 2 on bad flags; usage errors must be 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def angle(text: str) -> float:
    """Parse '0.7', 'pi', '-pi' or '0.5pi' into radians."""
    token = text.strip().lower()
    scale = 1.0
    if token.endswith("pi"):
        head = token[:-2]
        token = head if head not in ("", "+", "-") else head + "1"
        scale = math.pi
    try:
        return float(token) * scale
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid angle {text!r}; use a number or e.g. '0.5pi'")


def _fail(flag: str, message: str) -> int:
    print(f"error: {flag}: {message}", file=sys.stderr)
    return EXIT_USAGE


@contextlib.contextmanager
def _output(path: str | None):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            yield fh


def _emit_json(payload: dict, fh: TextIO) -> None:
    json.dump(payload, fh, sort_keys=True)
    fh.write("\n")


def _samples_table(samples, fmt: str, fh: TextIO) -> None:
    if fmt == "csv":
        write_samples_csv(samples, fh)
        return
    rows = []
    for s in samples:
        rows.append(
            {
                "z": s.z,
                "t": s.t,
                "rho": s.rho,
                "jx": float(s.j[0]),
                "jy": float(s.j[1]),
                "jz": float(s.j[2]),
                "vz": None if s.v is None else float(s.v[2]),
                "flag_node": bool(s.node),
            }
        )
    json.dump(rows, fh, sort_keys=True)
    fh.write("\n")


def _case_spec(args, params: PhysicalParams) -> CaseSpec:
    return CaseSpec(
        case_id=args.id,
        a=args.a,
        phi=args.phi,
        helicity=args.lam,
        k=args.k,
        energy_sign=args.energy_sign,
        params=params,
    )


def _validated_case_spec(args, params: PhysicalParams) -> CaseSpec | int:
    if args.id not in CASE_IDS:
        return _fail("--id", f"unknown case {args.id}; valid ids are 1..7")
    if not args.a >= 0.0:
        return _fail("--a", f"weight must be nonnegative, got {args.a}")
    if not args.k > 0.0:
        return _fail("--k", f"wavenumber must be positive, got {args.k}")
    return _case_spec(args, params)


def cmd_case(args, params: PhysicalParams) -> int:
    spec = _validated_case_spec(args, params)
    if isinstance(spec, int):
        return spec
    tol = args.tol if args.tol is not None else DEFAULT_TOL
    zs = np.linspace(args.z0, args.z1, args.samples)
    report = verify_case(spec, zs, t=args.t, tol=tol)
    state = build_case(spec)
    region = find_backflow_regions(state, (args.z0, args.z1), t=args.t, tol=tol)
    report.backflow_intervals = list(region.intervals)
    samples = scan_current(state, ScanGrid(args.z0, args.z1, args.samples, t=args.t))
    if args.out:
        with _output(args.out) as fh:
            _samples_table(samples, args.format, fh)
    jz = np.array([s.j[2] for s in samples])
    payload = report.as_dict()
    payload["t"] = args.t
    payload["z_range"] = [args.z0, args.z1]
    payload["summary"] = {
        "jz_min": float(jz.min()),
        "jz_max": float(jz.max()),
        "jx_max_abs": float(max(abs(s.j[0]) for s in samples)),
        "jy_max_abs": float(max(abs(s.j[1]) for s in samples)),
        "rho_min": float(min(s.rho for s in samples)),
        "rho_max": float(max(s.rho for s in samples)),
    }
    _emit_json(payload, sys.stdout)
    return EXIT_OK if report.passed else EXIT_VERIFY


def cmd_scan(args, params: PhysicalParams) -> int:
    spec = _validated_case_spec(args, params)
    if isinstance(spec, int):
        return spec
    samples = scan_current(build_case(spec), ScanGrid(args.z0, args.z1, args.samples, t=args.t))
    with _output(args.out) as fh:
        _samples_table(samples, args.format, fh)
    return EXIT_OK


def cmd_fig1(args, params: PhysicalParams) -> int:
    if args.res < 2:
        return _fail("--res", f"resolution must be at least 2, got {args.res}")
    with _output(args.out) as fh:
        write_grid_csv(
            fh,
            a_range=(args.a0, args.a1),
            x_range=(args.x0, args.x1),
            resolution=args.res,
            params=params,
            k=args.k,
            phi=args.phi,
        )
    return EXIT_OK


def cmd_nr(args, params: PhysicalParams) -> int:
    if not args.a >= 0.0:
        return _fail("--a", f"weight must be nonnegative, got {args.a}")
    if args.x is not None:
        try:
            payload = {
                "a": args.a,
                "k": args.k,
                "phi": args.phi,
                "x": args.x,
                "v": nr_velocity(args.a, args.k, args.x, args.phi, params),
                "Q": quantum_potential(args.a, args.k, args.x, args.phi, params),
            }
        except NodeSingular as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_VERIFY
        with _output(args.out) as fh:
            _emit_json(payload, fh)
        return EXIT_OK
    xs = np.linspace(args.x0, args.x1, args.samples)
    with _output(args.out) as fh:
        fh.write("x,v,Q\n")
        for x in xs:
            try:
                v = nr_velocity(args.a, args.k, float(x), args.phi, params)
                q = quantum_potential(args.a, args.k, float(x), args.phi, params)
            except NodeSingular:
                v = q = float("nan")
            fh.write(f"{x:.17g},{v:.17g},{q:.17g}\n")
    return EXIT_OK


def cmd_threshold(args, params: PhysicalParams) -> int:
    if args.gamma is not None:
        if args.gamma < 1.0:
            return _fail("--gamma", f"Lorentz factor must be >= 1, got {args.gamma}")
        if args.gamma == 1.0:
            k = None
        else:
            k = math.sqrt(args.gamma * args.gamma - 1.0) * params.mass * params.c / params.hbar
        if k is None:
            payload = {"case_id": args.id, "gamma": args.gamma, "threshold": 0.0, "closed_form": 0.0}
            with _output(args.out) as fh:
                _emit_json(payload, fh)
            return EXIT_OK
        args = argparse.Namespace(**{**vars(args), "k": k})
    spec = _validated_case_spec(args, params)
    if isinstance(spec, int):
        return spec
    tol = args.tol if args.tol is not None else DEFAULT_TOL
    try:
        threshold = backflow_threshold(spec, bracket=(args.a0, args.a1), t=args.t, tol=tol)
    except NoSignChange as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    payload = {
        "case_id": args.id,
        "bracket": [args.a0, args.a1],
        "threshold": threshold,
        "k": spec.k,
        "phi": spec.phi,
        "helicity": spec.helicity,
    }
    if args.id == 2:
        gamma = abs(math.hypot(params.c * params.hbar * spec.k, params.rest_energy)) / params.rest_energy
        payload["gamma"] = gamma
        payload["closed_form"] = critical_amplitude(gamma)
    _emit_json(payload, sys.stdout)
    return EXIT_OK


def cmd_fock(args, params: PhysicalParams) -> int:
    if not (1 <= args.modes <= MAX_MODES):
        return _fail("--modes", f"must be in 1..{MAX_MODES}, got {args.modes}")
    if not args.strength > 0.0:
        return _fail("--strength", f"must be positive, got {args.strength}")
    lattice = build_lattice(args.modes)
    report = current_charge_report(lattice, spin=args.spin, strength=args.strength)
    with _output(args.out) as fh:
        _emit_json(report, fh)
    return EXIT_OK if report["identity_holds"] else EXIT_VERIFY


def cmd_verify_all(args, params: PhysicalParams) -> int:
    rng = np.random.default_rng(args.seed)
    tol = args.tol if args.tol is not None else DEFAULT_TOL
    failures = 0
    checks = 0

    def report_line(name: str, ok: bool, detail: str) -> None:
        nonlocal failures, checks
        checks += 1
        failures += 0 if ok else 1
        print(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")

    zs = np.linspace(-10.0, 10.0, 401)
    for case_id in CASE_IDS:
        worst = 0.0
        ok = True
        for _ in range(args.draws):
            spec = CaseSpec(
                case_id=case_id,
                a=float(rng.uniform(0.0, 1.0)),
                phi=float(rng.uniform(0.0, 2.0 * math.pi)),
                helicity=int(rng.choice([1, -1])),
                k=float(rng.uniform(0.05, 3.0)),
                energy_sign=int(rng.choice([1, -1])),
                params=params,
            )
            result = verify_case(spec, zs, tol=tol)
            worst = max(worst, result.max_residual)
            ok = ok and result.passed
        report_line(f"case {case_id}", ok, f"worst residual {worst:.3e} over {args.draws} draws")

    for modes in range(1, 5):
        for spin in (0.5, -0.5):
            fock = current_charge_report(build_lattice(modes), spin=spin)
            report_line(
                f"fock M={modes} spin={spin:+.1f}",
                fock["identity_holds"],
                f"max entry deviation {fock['max_entry_deviation']:.3e}",
            )

    grid = region_grid(resolution=100, params=params)
    predicate = (grid.a[:, None] + np.cos(grid.x[None, :])) < 0.0
    interior = (grid.a > 0.0) & (grid.a < 1.0 - 1e-6)
    mask_ok = bool(np.array_equal(grid.mask_v[interior], predicate[interior]))
    report_line("region grid", mask_ok, "negative-velocity mask matches a + cos(x) < 0")

    gamma = 2.0
    spec = CaseSpec(case_id=2, phi=math.pi, helicity=1, k=math.sqrt(3.0), params=params)
    onset = backflow_threshold(spec, bracket=(1e-6, 1.0 - 1e-9))
    expected = critical_amplitude(gamma)
    report_line("case 2 onset", abs(onset - expected) < 1e-8, f"bisection {onset:.10f} vs closed form {expected:.10f}")

    summary = {"checks": checks, "failures": failures, "seed": args.seed, "draws": args.draws}
    _emit_json(summary, sys.stdout)
    return EXIT_OK if failures == 0 else EXIT_VERIFY


def _build_parser() -> _Parser:
    common = _Parser(add_help=False)
    common.add_argument("--hbar", type=float, default=1.0, help="reduced Planck constant (default 1)")
    common.add_argument("--c", type=float, default=1.0, help="speed of light (default 1)")
    common.add_argument("--mass", type=float, default=1.0, help="particle mass (default 1)")
    common.add_argument("--out", default=None, help="output path ('-' or omitted: stdout)")
    common.add_argument("--format", choices=("csv", "json"), default="csv", help="sample table format")
    common.add_argument("--tol", type=float, default=None, help="tolerance override (default 1e-10)")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized sweeps")

    case_flags = _Parser(add_help=False)
    case_flags.add_argument("--id", type=int, required=True, help="family id, 1..7")
    case_flags.add_argument("--a", type=float, default=0.5, help="superposition weight")
    case_flags.add_argument("--phi", type=angle, default=0.0, help="relative phase (accepts 'pi' forms)")
    case_flags.add_argument("--lambda", dest="lam", type=int, choices=(1, -1), default=1, help="spin label")
    case_flags.add_argument("--k", type=float, default=1.0, help="wavenumber (> 0)")
    case_flags.add_argument(
        "--energy-sign", dest="energy_sign", type=int, choices=(1, -1), default=1,
        help="energy sign for families 1 and 6",
    )
    case_flags.add_argument("--t", type=float, default=0.0, help="evaluation time")
    case_flags.add_argument("--z0", type=float, default=-10.0, help="scan start")
    case_flags.add_argument("--z1", type=float, default=10.0, help="scan end")
    case_flags.add_argument("--samples", type=int, default=801, help="scan resolution")

    parser = _Parser(prog="diracflow", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("case", parents=[common, case_flags], help="verify a family against its closed form")
    p.set_defaults(func=cmd_case)

    p = sub.add_parser("scan", parents=[common, case_flags], help="sample density/current/velocity on a grid")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("fig1", parents=[common], help="export the (a, x) region grid")
    p.add_argument("--a0", type=float, default=0.0)
    p.add_argument("--a1", type=float, default=1.0)
    p.add_argument("--x0", type=float, default=-6.0)
    p.add_argument("--x1", type=float, default=6.0)
    p.add_argument("--res", type=int, default=400, help="points per axis")
    p.add_argument("--k", type=float, default=1.0, help="wavenumber of the second wave")
    p.add_argument("--phi", type=angle, default=0.0)
    p.set_defaults(func=cmd_fig1)

    p = sub.add_parser("nr", parents=[common], help="nonrelativistic velocity and quantum potential")
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--k", type=float, default=1.0)
    p.add_argument("--phi", type=angle, default=0.0)
    p.add_argument("--x", type=float, default=None, help="single evaluation point (JSON output)")
    p.add_argument("--x0", type=float, default=-6.0)
    p.add_argument("--x1", type=float, default=6.0)
    p.add_argument("--samples", type=int, default=401)
    p.set_defaults(func=cmd_nr)

    p = sub.add_parser("threshold", parents=[common, case_flags], help="locate the backflow onset weight")
    p.add_argument("--a0", type=float, default=1e-6, help="bracket start")
    p.add_argument("--a1", type=float, default=1.0 - 1e-9, help="bracket end")
    p.add_argument("--gamma", type=float, default=None, help="family 2: set k from a Lorentz factor")
    p.set_defaults(func=cmd_threshold)

    p = sub.add_parser("fock", parents=[common], help="current vs charge operator identity check")
    p.add_argument("--modes", type=int, required=True, help=f"momentum modes, 1..{MAX_MODES}")
    p.add_argument("--spin", type=float, choices=(0.5, -0.5), default=0.5)
    p.add_argument("--strength", type=float, default=1.0, help="positive normalization constant K")
    p.set_defaults(func=cmd_fock)

    p = sub.add_parser("verify-all", parents=[common], help="run the whole verification sweep")
    p.add_argument("--draws", type=int, default=20, help="random draws per family")
    p.set_defaults(func=cmd_verify_all)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        params = PhysicalParams(hbar=args.hbar, c=args.c, mass=args.mass)
    except ValueError as exc:
        return _fail("--hbar/--c/--mass", str(exc))
    return args.func(args, params)


if __name__ == "__main__":
    sys.exit(main())
