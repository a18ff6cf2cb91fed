"""Property suites run by ``fowler verify``.

Each suite evaluates a handful of named checks against closed-form
oracles and returns a :class:`SuiteResult`; nothing here raises for a
failed check.
"""

from __future__ import annotations

import logging
import math
import time
from collections.abc import Callable
from concurrent.futures import Executor
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from fowler_core.classify import classify, fit_proportions
from fowler_core.errors import FowlerError, UnknownSuite
from fowler_core.invariants import (
    Verdict,
    blowup_envelope,
    drift,
    hamiltonian,
    monitor_bound,
    monitor_gradient_bound,
    quotient_spread,
    sobolev_integrals,
    sobolev_quotient,
)
from fowler_core.model import derive_params, spherical_derivatives, spherical_radial
from fowler_core.model import spherical_state
from fowler_core.ode.integrate import StepperConfig, integrate
from fowler_core.ode.state import CylState, Trajectory
from fowler_core.shooting import atlas, delaunay_orbit, find_b, fundamental_period
from fowler_core.shooting import linearized_period
from fowler_core.sim.synthetic import (
    constant_cylinder_grid,
    constant_trajectory,
    delaunay_grid,
    log_radii,
    spherical_grid,
    spherical_trajectory,
)
from fowler_core.transform import kelvin, three_spheres_check, verify_kelvin_identity

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Check:
    name: str
    value: float
    threshold: float
    passed: bool

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "value": self.value,
            "threshold": self.threshold,
            "pass": self.passed,
        }


@dataclass(frozen=True)
class SuiteResult:
    name: str
    checks: list[Check] = field(default_factory=list)
    elapsed: float = 0.0

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def to_dict(self) -> dict[str, Any]:
        return {
            "suite": self.name,
            "pass": self.passed,
            "elapsed": self.elapsed,
            "checks": [check.to_dict() for check in self.checks],
        }


def _at_most(name: str, value: float, threshold: float) -> Check:
    return Check(name, float(value), threshold, bool(value <= threshold))


def _at_least(name: str, value: float, threshold: float) -> Check:
    return Check(name, float(value), threshold, bool(value >= threshold))


def _holds(name: str, condition: bool) -> Check:
    return Check(name, 1.0 if condition else 0.0, 1.0, bool(condition))


def homoclinic_branches(
    n: int, dt: float, p: int = 1, lam: Any = None, span: float = 10.0
) -> tuple[Trajectory, Trajectory]:
    """The bubble orbit integrated forward on [-span, 0] and backward on [span, 0]."""
    params = derive_params(n, p)
    out = []
    for start in (-span, span):
        init = spherical_state(derive_params(n, 1), 1.0, start)
        if p > 1:
            init = init.scaled(lam)
        cfg = StepperConfig(method="rk4", dt=dt, t_end=0.0, detect_events=False)
        out.append(integrate(params, init, cfg))
    return out[0], out[1]


# ---- suites ---------------------------------------------------------------------------


def _sech_residual() -> list[Check]:
    params = derive_params(6)
    t = np.linspace(-10.0, 10.0, 1000)
    v, _, d2, _, d4 = spherical_derivatives(params, 1.0, t, order=4)
    coupling = params.c * np.abs(v) ** params.nonlinear_exp * v
    residual = d4 - (params.K2 * d2 - params.K0 * v + coupling)
    peak = max(
        abs(p.gamma**2 / 2.0 - p.K0 / 2.0 + p.chat) / p.K0
        for p in (derive_params(n) for n in range(5, 13))
    )
    return [
        _at_most("sech_ode_residual", float(np.max(np.abs(residual))), 1e-9),
        _at_most("peak_hamiltonian_n5_12", peak, 1e-12),
    ]


def _hamiltonian() -> list[Check]:
    params = derive_params(6)
    fine = max(drift(params, branch) for branch in homoclinic_branches(6, 1e-3))
    coarse = max(drift(params, branch) for branch in homoclinic_branches(6, 2e-3))
    const = integrate(
        params, CylState(0.0, [params.a0, 0.0, 0.0, 0.0]), StepperConfig(dt=1e-3, t_end=100.0)
    )
    return [
        _at_most("homoclinic_drift_dt1e-3", fine, 1e-8),
        _at_least("drift_ratio_halving_dt", coarse / fine if fine > 0 else math.inf, 12.0),
        _at_most("constant_orbit_deviation", float(np.max(np.abs(const.v - params.a0))), 1e-10),
    ]


def _kelvin() -> list[Check]:
    params = derive_params(6)
    radii = [0.5, 1.0, 2.0]

    def gaussian(r: np.ndarray) -> np.ndarray:
        return np.exp(-np.asarray(r) ** 2)

    def bubble(r: np.ndarray) -> np.ndarray:
        return spherical_radial(params, 1.0, r)

    probe = np.array(radii)
    twice = kelvin(lambda s: kelvin(gaussian, 1.0, s, params), 1.0, probe, params)
    gauss_res = verify_kelvin_identity(gaussian, 1.0, radii, params, 2e-3)
    bubble_res = verify_kelvin_identity(bubble, 1.0, radii, params, 2e-3)
    return [
        _at_most("kelvin_identity_gaussian", gauss_res, 1e-4),
        _at_most("kelvin_identity_bubble", bubble_res, 1e-4),
        _at_most("kelvin_involution", float(np.max(np.abs(twice - gaussian(probe)))), 1e-12),
        _at_most(
            "bubble_fixed_point",
            float(np.max(np.abs(kelvin(bubble, 1.0, probe, params) - bubble(probe)))),
            1e-12,
        ),
    ]


def _three_spheres() -> list[Check]:
    params = derive_params(6)
    probes = np.linspace(0.6, 1.9, 14)
    e = 4 - params.n

    def fundamental(r: np.ndarray) -> np.ndarray:
        return 1.0 + 2.0 * np.asarray(r) ** e

    def bubble(r: np.ndarray) -> np.ndarray:
        return spherical_radial(params, 1.0, r)

    def square(r: np.ndarray) -> np.ndarray:
        return np.asarray(r) ** 2

    equality = three_spheres_check(fundamental, 0.5, 2.0, probes, params)
    sphere = three_spheres_check(bubble, 0.5, 2.0, probes, params)
    counter = three_spheres_check(square, 0.5, 2.0, probes, params)
    return [
        _at_most("fundamental_margin", float(np.max(np.abs(equality.margins))), 1e-10),
        _at_least("bubble_margin", sphere.min_margin, -1e-10),
        _holds("square_detected", counter.min_margin < 0),
    ]


def _sobolev_identity() -> list[Check]:
    params = derive_params(6)
    lap, nonlinear = sobolev_integrals(params, 1.0)
    q_small, q_large = sobolev_quotient(params, 0.5), sobolev_quotient(params, 2.0)
    return [
        _at_most("sobolev_identity", abs(lap - nonlinear) / lap, 1e-6),
        _at_most("sobolev_quotient_scale_free", abs(q_small - q_large) / q_large, 1e-6),
    ]


def _pohozaev() -> list[Check]:
    params = derive_params(6)
    radii = log_radii(1e-4, 1e2, 2000)
    sph = classify(spherical_grid(params, 1.0, radii), params)
    const = classify(constant_cylinder_grid(params, radii), params)
    dela = classify(delaunay_grid(params, 0.6 * params.a0, radii), params)
    expected = params.sphere_area * hamiltonian(params, CylState(0.0, [params.a0, 0, 0, 0]))
    return [
        _holds("spherical_verdict", sph.verdict is Verdict.NON_SINGULAR_SPHERICAL),
        _at_most("spherical_pohozaev", abs(sph.pohozaev_estimate) - sph.uncertainty, 0.0),
        _holds("constant_verdict", const.verdict is Verdict.SINGULAR_DELAUNAY),
        _at_most(
            "constant_pohozaev_rel_error",
            abs(const.pohozaev_estimate - expected) / abs(expected),
            0.01,
        ),
        _holds("delaunay_verdict", dela.verdict is Verdict.SINGULAR_DELAUNAY),
        _holds("delaunay_negative", dela.pohozaev_estimate < -dela.uncertainty),
    ]


def _shooting() -> list[Check]:
    params = derive_params(6)
    near = 0.999 * params.a0
    period = fundamental_period(params, near, find_b(params, near))
    linear = linearized_period(params)
    rows = atlas(params, [f * params.a0 for f in (0.3, 0.6, 0.9)])
    return [
        _holds("b_at_a0_is_zero", find_b(params, params.a0) == 0.0),
        _at_most("near_a0_period_rel_error", abs(period - linear) / linear, 0.02),
        _holds("atlas_rows_ok", all(row.error is None for row in rows)),
        _holds("atlas_energy_negative", all(row.H < 0 for row in rows)),
        _at_most("atlas_residual", max(row.residual for row in rows), 1e-6),
    ]


def _monitors() -> list[Check]:
    params = derive_params(6)
    homoclinic = spherical_trajectory(params, 1.0, np.linspace(-10.0, 10.0, 2001))
    orbit = delaunay_orbit(params, 0.6 * params.a0)
    tiled = orbit.trajectory(np.linspace(0.0, 5.0 * orbit.period, 4001))
    c1, c2 = orbit.envelope_constants()
    constant = constant_trajectory(params, np.linspace(0.0, 10.0, 101))
    envelope = blowup_envelope(params, orbit.radial_grid(log_radii(1e-4, 1.0, 500)), c1, c2)
    return [
        _holds("homoclinic_gradient_bound", monitor_gradient_bound(params, homoclinic).passed),
        _holds("homoclinic_bound", monitor_bound(params, homoclinic).passed),
        _holds("delaunay_gradient_bound", monitor_gradient_bound(params, tiled).passed),
        _holds("delaunay_bound", monitor_bound(params, tiled).passed),
        _at_most("delaunay_drift_5_periods", drift(params, tiled), 1e-8),
        _holds("delaunay_envelope", envelope.passed),
        _holds("constant_bound", monitor_bound(params, constant).passed),
        _holds("constant_gradient_bound", monitor_gradient_bound(params, constant).passed),
    ]


def _vector() -> list[Check]:
    params = derive_params(6, 3)
    lam = np.array([1.0, 2.0, 2.0]) / 3.0
    spread = max(quotient_spread(b) for b in homoclinic_branches(6, 1e-3, p=3, lam=lam))
    grid = spherical_grid(params, 1.0, log_radii(1e-2, 1e2, 400), lam=lam)
    lam_hat, deviation = fit_proportions(grid)
    return [
        _at_most("quotient_spread", spread, 1e-9),
        _at_most("proportions_recovered", float(np.max(np.abs(lam_hat - lam))), 1e-10),
        _at_most("proportion_deviation", deviation, 1e-10),
    ]


SUITES: dict[str, Callable[[], list[Check]]] = {
    "sech-residual": _sech_residual,
    "hamiltonian": _hamiltonian,
    "kelvin": _kelvin,
    "three-spheres": _three_spheres,
    "sobolev-identity": _sobolev_identity,
    "pohozaev": _pohozaev,
    "shooting": _shooting,
    "monitors": _monitors,
    "vector": _vector,
}


def suite_names(name: str) -> list[str]:
    key = name.strip().lower().replace("_", "-")
    if key == "all":
        return list(SUITES)
    if key not in SUITES:
        raise UnknownSuite(f"Unknown suite '{name}'. Valid values: all, {', '.join(SUITES)}.")
    return [key]


def run_suite(name: str) -> SuiteResult:
    """Run one registered suite by its exact name."""
    start = time.perf_counter()
    logger.info("suite %s: start", name)
    try:
        checks = SUITES[name]()
    except FowlerError as exc:
        logger.error("suite %s aborted: %s", name, exc)
        checks = [Check(f"error:{exc.code}", math.nan, math.nan, False)]
    elapsed = time.perf_counter() - start
    result = SuiteResult(name, checks, elapsed)
    logger.info("suite %s: %s in %.2fs", name, "pass" if result.passed else "FAIL", elapsed)
    return result


def run_suites(name: str, executor: Executor | None = None) -> list[SuiteResult]:
    """Results in registry order, whether or not they ran concurrently."""
    names = suite_names(name)
    if executor is None or len(names) == 1:
        return [run_suite(n) for n in names]
    return list(executor.map(run_suite, names))
