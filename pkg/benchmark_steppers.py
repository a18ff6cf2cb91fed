#!/usr/bin/env python3
"""Benchmark the two steppers on the same homoclinic orbit.

Usage:
    python benchmark_steppers.py              # defaults: n=6, RK4 steps 4e-3..5e-4
    python benchmark_steppers.py --n 8 --skip-plot

Produces ``benchmark_drift.png`` in the current directory.
"""

from __future__ import annotations

import argparse
import time
from dataclasses import dataclass

import numpy as np

from fowler_core.invariants import drift
from fowler_core.model import Params, derive_params, spherical_derivatives, spherical_state
from fowler_core.ode.integrate import StepperConfig, integrate, measure_convergence_order

# ---- default problem setup --------------------------------------------------

DEFAULT_RK4_STEPS = (4e-3, 2e-3, 1e-3, 5e-4)
DEFAULT_TOLERANCES = (1e-8, 1e-10, 1e-12)
START = -10.0


@dataclass(frozen=True)
class BenchmarkRow:
    label: str
    steps: int
    drift: float
    max_error: float
    seconds: float


def run_case(params: Params, cfg: StepperConfig, label: str) -> BenchmarkRow:
    """Approach branch of the bubble, from t = -10 up to the peak at t = 0."""
    init = spherical_state(params, 1.0, START)
    start = time.perf_counter()
    traj = integrate(params, init, cfg)
    seconds = time.perf_counter() - start
    exact = spherical_derivatives(params, 1.0, traj.times, order=3).T
    return BenchmarkRow(
        label=label,
        steps=len(traj) - 1,
        drift=drift(params, traj),
        max_error=float(np.max(np.abs(traj.values - exact))),
        seconds=seconds,
    )


def build_cases(
    steps: tuple[float, ...], tolerances: tuple[float, ...]
) -> list[tuple[str, StepperConfig]]:
    cases = [
        (f"rk4 dt={dt:g}", StepperConfig(method="rk4", dt=dt, t_end=0.0, detect_events=False))
        for dt in steps
    ]
    cases.extend(
        (
            f"dopri45 tol={tol:g}",
            StepperConfig(
                method="dopri45", abs_tol=tol, rel_tol=tol, t_end=0.0, detect_events=False
            ),
        )
        for tol in tolerances
    )
    return cases


def _plot_drift(rows: list[BenchmarkRow], steps: tuple[float, ...], out_path: str) -> None:
    try:
        import matplotlib.pyplot as plt
    except ModuleNotFoundError as exc:
        raise ModuleNotFoundError(
            "matplotlib is required to generate plots. Install with: pip install -e '.[bench]'"
        ) from exc

    fig, ax = plt.subplots(figsize=(8, 5))
    rk4 = rows[: len(steps)]
    ax.loglog(steps, [max(r.drift, 1e-18) for r in rk4], "o-", label="rk4 drift")
    ax.loglog(steps, [max(r.max_error, 1e-18) for r in rk4], "s--", label="rk4 error")
    ax.set_xlabel("dt", fontsize=12)
    ax.set_ylabel("max deviation", fontsize=12)
    ax.set_title("Hamiltonian drift and tracking error on the approach branch", fontsize=13)
    ax.legend(fontsize=11)
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)


def main() -> None:
    parser = argparse.ArgumentParser(description="Benchmark cylinder ODE steppers")
    parser.add_argument("--n", type=int, default=6, help="Dimension")
    parser.add_argument(
        "--skip-plot",
        action="store_true",
        help="Print the table without saving a plot.",
    )
    args = parser.parse_args()

    params = derive_params(args.n)
    cases = build_cases(DEFAULT_RK4_STEPS, DEFAULT_TOLERANCES)
    rows = [run_case(params, cfg, label) for label, cfg in cases]

    out_path = "benchmark_drift.png"
    if args.skip_plot:
        print("[benchmark] Plot generation skipped (--skip-plot).")
    else:
        _plot_drift(rows, DEFAULT_RK4_STEPS, out_path)
        print(f"[benchmark] Saved drift chart -> {out_path}")

    print(f"\n{'Case':<22} {'Steps':>7} {'Drift':>11} {'Max error':>11} {'Seconds':>9}")
    print("-" * 64)
    for row in rows:
        print(
            f"{row.label:<22} {row.steps:>7d} {row.drift:>11.3e} "
            f"{row.max_error:>11.3e} {row.seconds:>9.3f}"
        )

    order = measure_convergence_order(params, spherical_state(params, 1.0, START), t_end=0.0)
    shown = "no signal" if order is None else f"{order:.3f}"
    print(f"\nObserved RK4 order on the approach branch: {shown}")


if __name__ == "__main__":
    main()
