"""``fowler`` command-line entrypoint.

Usage:
    fowler constants --n 6 --format json
    fowler integrate --config run.json
    fowler delaunay --n 6 --a 0.6 --relative --out-trajectory orbit.csv
    fowler atlas --n 6 --a-min 0.3 --a-max 0.9 --steps 7 --relative --workers 4
    fowler classify --input grid.csv --n 6
    fowler verify --suite all

Exit codes: 0 success, 1 numerical or internal failure, 2 invalid input.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from collections.abc import Callable, Sequence
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import NoReturn

import numpy as np
from pydantic import ValidationError

from fowler_cli import io
from fowler_cli.models import ConstantsReport, RunConfig
from fowler_cli.settings import FowlerSettings
from fowler_core.classify import ClassifyConfig, classify
from fowler_core.errors import FowlerError, InvalidGrid, InvalidRunConfig, UsageError
from fowler_core.invariants import invariant_report
from fowler_core.model import check_necksize, derive_params
from fowler_core.ode.integrate import integrate
from fowler_core.shooting import AtlasRow, atlas, delaunay_orbit
from fowler_core.sim.synthetic import log_radii
from fowler_core.suites import SUITES, run_suites, suite_names

logger = logging.getLogger(__name__)

Handler = Callable[[argparse.Namespace, FowlerSettings], int]


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _float_list(value: str) -> list[float]:
    try:
        return [float(x) for x in value.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers: '{value}'") from exc


def _validation_detail(exc: ValidationError) -> str:
    return "; ".join(
        f"{'.'.join(str(part) for part in err['loc']) or 'config'}: {err['msg']}"
        for err in exc.errors()
    )


# ---- subcommands ----------------------------------------------------------------


def cmd_constants(args: argparse.Namespace, settings: FowlerSettings) -> int:
    report = ConstantsReport.from_params(derive_params(args.n, args.p))
    if args.format == "json":
        _emit(io.dumps(report.model_dump()), args.out)
    else:
        row = report.csv_row()
        _emit(io.render_rows(list(row), [list(row.values())]), args.out)
    return 0


def load_run_config(path: str) -> RunConfig:
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise InvalidRunConfig(f"cannot read config {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InvalidRunConfig(f"{path} is not valid JSON: {exc.msg} (line {exc.lineno})") from None
    try:
        return RunConfig.model_validate(raw)
    except ValidationError as exc:
        raise InvalidRunConfig(_validation_detail(exc)) from None


def cmd_integrate(args: argparse.Namespace, settings: FowlerSettings) -> int:
    config = load_run_config(args.config)
    params = derive_params(config.n, config.p)
    traj = integrate(params, config.initial_state(params), config.stepper_config())
    io.write_trajectory(config.out_trajectory, traj, params)
    io.write_events(io.events_path(config.out_trajectory), traj)
    io.write_json(config.out_invariants, invariant_report(params, traj).to_dict())
    logger.info("integrated %d states, terminal %s", len(traj), traj.terminal.value)
    return 0


def _necksize(args: argparse.Namespace, value: float) -> float:
    return value * derive_params(args.n).a0 if args.relative else value


def cmd_delaunay(args: argparse.Namespace, settings: FowlerSettings) -> int:
    params = derive_params(args.n, args.p)
    a = _necksize(args, args.a)
    orbit = delaunay_orbit(params, a, lam=args.lam, phase=args.phase)
    times = np.linspace(0.0, args.periods * orbit.period, args.samples)
    io.write_trajectory(args.out_trajectory, orbit.trajectory(times), params)
    row = AtlasRow(orbit.a, orbit.b, orbit.period, orbit.hamiltonian, orbit.residual)
    io.write_json(args.out_row, row.to_dict())
    if args.out_radial:
        radii = log_radii(args.r_min, args.r_max, args.radial_points)
        io.write_radial_grid(args.out_radial, orbit.radial_grid(radii))
    return 0


def cmd_atlas(args: argparse.Namespace, settings: FowlerSettings) -> int:
    params = derive_params(args.n)
    if args.steps < 1:
        raise InvalidRunConfig(f"--steps must be at least 1, got {args.steps}")
    a_min, a_max = _necksize(args, args.a_min), _necksize(args, args.a_max)
    if a_min > a_max:
        raise InvalidRunConfig(f"--a-min ({a_min:.12g}) exceeds --a-max ({a_max:.12g})")
    check_necksize(params, a_min)
    check_necksize(params, a_max)
    a_values = [float(a) for a in np.linspace(a_min, a_max, args.steps)]

    workers = min(settings.worker_count(args.workers), len(a_values))
    logger.info("atlas: %d necksizes on %d worker(s)", len(a_values), workers)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as executor:
            rows = atlas(params, a_values, executor=executor)
    else:
        rows = atlas(params, a_values)
    io.write_atlas(args.out, rows)

    failed = [row for row in rows if row.error is not None]
    for row in failed:
        assert row.error is not None
        sys.stderr.write(f"ERROR {row.error['code']}: a={row.a!r}: {row.error['detail']}\n")
    return 1 if failed else 0


def cmd_classify(args: argparse.Namespace, settings: FowlerSettings) -> int:
    params = derive_params(args.n, 1)
    try:
        grid = io.read_radial_grid(args.input)
    except OSError as exc:
        raise InvalidGrid(f"cannot read {args.input}: {exc.strerror}") from None
    if grid.p != params.p:
        params = derive_params(args.n, grid.p)
    report = classify(grid, params, ClassifyConfig(margin=args.margin))
    _emit(io.dumps(report.to_dict()), args.out)
    return 0


def cmd_verify(args: argparse.Namespace, settings: FowlerSettings) -> int:
    workers = settings.worker_count(args.workers)
    if workers > 1 and len(suite_names(args.suite)) > 1:
        with ProcessPoolExecutor(max_workers=workers) as executor:
            results = run_suites(args.suite, executor)
    else:
        results = run_suites(args.suite)

    for result in results:
        status = "PASS" if result.passed else "FAIL"
        sys.stdout.write(f"{status} {result.name} ({result.elapsed:.2f}s)\n")
        for check in result.checks:
            if not check.passed:
                sys.stdout.write(
                    f"  - {check.name}: value {check.value!r}, threshold {check.threshold!r}\n"
                )
    if args.out:
        io.write_json(args.out, [result.to_dict() for result in results])
    return 0 if all(result.passed for result in results) else 1


# ---- parser -----------------------------------------------------------------------


class FowlerArgumentParser(argparse.ArgumentParser):
    """Reports usage mistakes as :class:`UsageError` instead of exiting."""

    def error(self, message: str) -> NoReturn:
        raise UsageError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    parser = FowlerArgumentParser(
        prog="fowler", description="Fourth-order Gross-Pitaevskii lab"
    )
    parser.add_argument(
        "--log-level",
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
        default=None,
        help="Overrides FOWLER_LOG_LEVEL (default WARNING)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("constants", help="Print the dimension constants")
    p.add_argument("--n", type=int, required=True, help="Dimension (>= 5)")
    p.add_argument("--p", type=int, default=1, help="Number of components")
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.add_argument("--out", default=None, help="Output file (default stdout)")
    p.set_defaults(handler=cmd_constants)

    p = sub.add_parser("integrate", help="Integrate the cylinder ODE from a JSON config")
    p.add_argument("--config", required=True, help="RunConfig JSON file")
    p.set_defaults(handler=cmd_integrate)

    p = sub.add_parser("delaunay", help="Shoot for one periodic orbit and export it")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=int, default=1)
    p.add_argument("--a", type=float, required=True, help="Necksize in (0, a0]")
    p.add_argument("--relative", action="store_true", help="Read --a as a fraction of a0")
    p.add_argument("--lambda", dest="lam", type=_float_list, default=None)
    p.add_argument("--phase", type=float, default=0.0)
    p.add_argument("--periods", type=float, default=1.0, help="Periods to tile")
    p.add_argument("--samples", type=int, default=1001)
    p.add_argument("--out-trajectory", default="delaunay.csv")
    p.add_argument("--out-row", default="delaunay.json")
    p.add_argument("--out-radial", default=None, help="Also write the radial profile CSV")
    p.add_argument("--r-min", type=float, default=1e-4)
    p.add_argument("--r-max", type=float, default=1e2)
    p.add_argument("--radial-points", type=int, default=2000)
    p.set_defaults(handler=cmd_delaunay)

    p = sub.add_parser("atlas", help="Tabulate b(a), T_a and H over a necksize range")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--a-min", type=float, required=True)
    p.add_argument("--a-max", type=float, required=True)
    p.add_argument("--steps", type=int, default=11)
    p.add_argument("--relative", action="store_true", help="Read a-min/a-max as fractions of a0")
    p.add_argument("--workers", type=int, default=None, help="Overrides FOWLER_THREADS")
    p.add_argument("--out", default="atlas.csv")
    p.set_defaults(handler=cmd_atlas)

    p = sub.add_parser("classify", help="Classify a sampled radial solution")
    p.add_argument("--input", required=True, help="CSV with header r,u_1,...,u_p")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--margin", type=int, default=5)
    p.add_argument("--out", default=None, help="Report JSON (default stdout)")
    p.set_defaults(handler=cmd_classify)

    p = sub.add_parser("verify", help="Run the property suites")
    p.add_argument("--suite", default="all", help=f"all or one of: {', '.join(SUITES)}")
    p.add_argument("--workers", type=int, default=None, help="Overrides FOWLER_THREADS")
    p.add_argument("--out", default=None, help="Also write the results as JSON")
    p.set_defaults(handler=cmd_verify)

    return parser


def _configure_logging(level: str) -> None:
    logging.basicConfig(
        stream=sys.stderr, format="%(asctime)s %(levelname)s %(name)s: %(message)s"
    )
    logging.getLogger().setLevel(level.upper())


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        sys.stderr.write(f"ERROR {exc.code}: {exc}\n")
        return exc.exit_code
    handler: Handler = args.handler
    try:
        try:
            settings = FowlerSettings()
        except ValidationError as exc:
            raise InvalidRunConfig(_validation_detail(exc)) from None
        _configure_logging(args.log_level or settings.log_level)
        return handler(args, settings)
    except FowlerError as exc:
        sys.stderr.write(f"ERROR {exc.code}: {exc}\n")
        return exc.exit_code
    except Exception as exc:
        logger.debug("unhandled error", exc_info=True)
        sys.stderr.write(f"ERROR {type(exc).__name__}: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
