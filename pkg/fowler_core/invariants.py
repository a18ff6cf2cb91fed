"""Hamiltonian energy, Pohozaev invariants and runtime monitors.

Monitors check qualitative properties that exact solutions satisfy. They
report pass/fail with the worst margin instead of raising; they raise
:class:`NonPositiveComponent` only when the property is not defined on
the given data.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any

import numpy as np
from scipy.integrate import quad

from fowler_core.errors import EmptyTrajectory, NonPositiveComponent, NonPositiveScale
from fowler_core.model import Params, spherical_laplacian, spherical_radial
from fowler_core.ode.state import CylState, Trajectory
from fowler_core.transform import RadialGrid

logger = logging.getLogger(__name__)

LIMIT_TOLERANCE = 1e-6
QUOTIENT_TOLERANCE = 1e-9


class Verdict(str, Enum):
    NON_SINGULAR_SPHERICAL = "NonSingularSpherical"
    SINGULAR_DELAUNAY = "SingularDelaunay"
    INCONSISTENT = "Inconsistent"


# ---- energy ---------------------------------------------------------------------


def hamiltonian_values(params: Params, values: np.ndarray) -> np.ndarray:
    """H for every row of an (m, 4p) state matrix."""
    arr = np.atleast_2d(np.asarray(values, dtype=float))
    p = arr.shape[1] // 4
    v, d1, d2, d3 = (arr[:, k * p : (k + 1) * p] for k in range(4))
    norm2 = np.sum(v * v, axis=1)
    return (
        -np.sum(d3 * d1, axis=1)
        + 0.5 * np.sum(d2 * d2, axis=1)
        + 0.5 * params.K2 * np.sum(d1 * d1, axis=1)
        - 0.5 * params.K0 * norm2
        + params.chat * norm2 ** (params.sobolev_exp / 2.0)
    )


def hamiltonian(params: Params, state: CylState) -> float:
    """H = -⟨V''',V'⟩ + ½|V''|² + (K₂/2)|V'|² - (K₀/2)|V|² + ĉ|V|^{2**}."""
    return float(hamiltonian_values(params, state.y)[0])


def pohozaev(params: Params, state: CylState) -> tuple[float, float]:
    """(cylindrical, spherical) Pohozaev invariants of a radial state."""
    cyl = hamiltonian(params, state)
    return cyl, params.sphere_area * cyl


def drift(params: Params, traj: Trajectory) -> float:
    """max_k |H(state_k) - H(state_0)|."""
    if len(traj) == 0:
        raise EmptyTrajectory("drift needs at least one state")
    energies = hamiltonian_values(params, traj.values)
    return float(np.max(np.abs(energies - energies[0])))


def classification_tolerance(measured_drift: float) -> float:
    return max(1e-8, 100.0 * measured_drift)


def orbit_verdict(params: Params, traj: Trajectory) -> Verdict:
    """Sign of the initial energy against max(1e-8, 100 × drift)."""
    eps = classification_tolerance(drift(params, traj))
    h0 = hamiltonian(params, traj.first)
    if abs(h0) <= eps:
        return Verdict.NON_SINGULAR_SPHERICAL
    if h0 < -eps:
        return Verdict.SINGULAR_DELAUNAY
    return Verdict.INCONSISTENT


# ---- monitors ---------------------------------------------------------------------


@dataclass(frozen=True)
class MonitorResult:
    name: str
    passed: bool
    worst_margin: float
    worst_t: float
    sup: float | None = None

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "pass": self.passed,
            "worst_margin": self.worst_margin,
            "worst_t": self.worst_t,
        }
        if self.sup is not None:
            out["sup"] = self.sup
        return out


def _require_positive(traj: Trajectory, what: str) -> None:
    if len(traj) == 0:
        raise EmptyTrajectory(f"{what} needs at least one state")
    if np.any(traj.v <= 0):
        k = int(np.argmax(np.any(traj.v <= 0, axis=1)))
        raise NonPositiveComponent(
            f"{what} needs strictly positive components; v <= 0 at t={traj.times[k]:.12g}"
        )


def monitor_gradient_bound(params: Params, traj: Trajectory) -> MonitorResult:
    """v_i' < γ v_i along the orbit."""
    _require_positive(traj, "gradient bound monitor")
    margins = params.gamma * traj.v - traj.d1
    k, _ = np.unravel_index(int(np.argmin(margins)), margins.shape)
    worst = float(margins.min())
    return MonitorResult("gradient_bound", worst > 0, worst, float(traj.times[k]))


def monitor_bound(params: Params, traj: Trajectory) -> MonitorResult:
    """v_i < K₀^{(n-4)/8} along the orbit; reports the supremum."""
    if len(traj) == 0:
        raise EmptyTrajectory("bound monitor needs at least one state")
    k, _ = np.unravel_index(int(np.argmax(traj.v)), traj.v.shape)
    sup = float(traj.v.max())
    worst = params.bound_constant - sup
    return MonitorResult("bound", worst > 0, worst, float(traj.times[k]), sup=sup)


def quotient_spread(traj: Trajectory) -> float:
    """max over t, i, j of |v_i/v_j(t) - v_i/v_j(t₀)|; zero for p = 1."""
    if traj.p == 1:
        return 0.0
    _require_positive(traj, "quotient spread")
    v = traj.v
    ratios = v[:, :, None] / v[:, None, :]
    return float(np.max(np.abs(ratios - ratios[0])))


@dataclass(frozen=True)
class AsymptoticLimit:
    """Tail behaviour of one component over the trailing window."""

    component: int
    converged: bool
    value: float | None
    oscillation: float
    derivatives_vanish: bool | None = None

    def to_dict(self) -> dict[str, Any]:
        if not self.converged:
            return {"component": self.component, "kind": "NotConvergent"}
        return {
            "component": self.component,
            "kind": "Limit",
            "value": self.value,
            "derivatives_vanish": self.derivatives_vanish,
        }


def asymptotic_limits(traj: Trajectory, window: float = 2.0) -> list[AsymptoticLimit]:
    """Limit(value) when v_i oscillates by less than 1e-6 over the last ``window``."""
    if len(traj) == 0:
        raise EmptyTrajectory("asymptotic limits need at least one state")
    tail = np.abs(traj.times - traj.times[-1]) <= window
    out: list[AsymptoticLimit] = []
    for i in range(traj.p):
        v = traj.v[tail, i]
        osc = float(v.max() - v.min())
        if osc >= LIMIT_TOLERANCE:
            out.append(AsymptoticLimit(i + 1, False, None, osc))
            continue
        derivs = np.stack([traj.d1[tail, i], traj.d2[tail, i], traj.d3[tail, i]])
        vanish = bool(np.max(np.abs(derivs)) < LIMIT_TOLERANCE)
        out.append(AsymptoticLimit(i + 1, True, float(v.mean()), osc, vanish))
    return out


def blowup_envelope(
    params: Params, grid: RadialGrid, c_min: float, c_max: float, rtol: float = 1e-9
) -> MonitorResult:
    """C₁ r^{-γ} <= |U(r)| <= C₂ r^{-γ} at every sampled radius."""
    scaled = grid.norms() * grid.points**params.gamma
    margins = np.minimum(scaled - c_min, c_max - scaled)
    k = int(np.argmin(margins))
    worst = float(margins[k])
    return MonitorResult(
        "blowup_envelope", worst >= -rtol * max(1.0, c_max), worst, float(grid.points[k])
    )


# ---- aggregate report --------------------------------------------------------------


@dataclass(frozen=True)
class InvariantReport:
    H0: float
    max_drift: float
    pohozaev_cyl: float
    pohozaev_sph: float
    monitors: dict[str, MonitorResult] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        return {
            "H0": self.H0,
            "max_drift": self.max_drift,
            "pohozaev_cyl": self.pohozaev_cyl,
            "pohozaev_sph": self.pohozaev_sph,
            "monitors": {name: result.to_dict() for name, result in self.monitors.items()},
        }


def invariant_report(params: Params, traj: Trajectory) -> InvariantReport:
    """Energy, drift, Pohozaev values and every applicable monitor."""
    if len(traj) == 0:
        raise EmptyTrajectory("invariant report needs at least one state")
    cyl, sph = pohozaev(params, traj.first)
    monitors: dict[str, MonitorResult] = {"bound": monitor_bound(params, traj)}
    try:
        monitors["gradient_bound"] = monitor_gradient_bound(params, traj)
    except NonPositiveComponent as exc:
        logger.warning("gradient bound monitor skipped: %s", exc)
    if traj.p > 1:
        try:
            spread = quotient_spread(traj)
            monitors["quotient_spread"] = MonitorResult(
                "quotient_spread", spread <= QUOTIENT_TOLERANCE, -spread, float(traj.times[-1])
            )
        except NonPositiveComponent as exc:
            logger.warning("quotient spread monitor skipped: %s", exc)
    return InvariantReport(
        H0=cyl,
        max_drift=drift(params, traj),
        pohozaev_cyl=cyl,
        pohozaev_sph=sph,
        monitors=monitors,
    )


# ---- Sobolev identity --------------------------------------------------------------


def sobolev_integrals(params: Params, mu: float = 1.0) -> tuple[float, float]:
    """(∫|Δu_μ|², c(n)∫u_μ^{2**}) over ℝⁿ by adaptive radial quadrature.

    Both equal ∫u Δ²u for the bubble, so they must agree.
    """
    if mu <= 0:
        raise NonPositiveScale(f"mu must be positive, got {mu}")
    n = params.n

    def lap_sq(r: float) -> float:
        return float(spherical_laplacian(params, mu, r)) ** 2 * r ** (n - 1)

    def power(r: float) -> float:
        return float(spherical_radial(params, mu, r)) ** params.sobolev_exp * r ** (n - 1)

    def radial_integral(fn: Any) -> float:
        split = 1.0 / mu
        opts = {"limit": 200, "epsabs": 0.0, "epsrel": 1e-10}
        inner, _ = quad(fn, 0.0, split, **opts)
        outer, _ = quad(fn, split, math.inf, **opts)
        return params.sphere_area * (inner + outer)

    return radial_integral(lap_sq), params.c * radial_integral(power)


def sobolev_quotient(params: Params, mu: float = 1.0) -> float:
    """‖u_μ‖_{2**} / ‖Δu_μ‖₂; the same for every μ."""
    lap, nonlinear = sobolev_integrals(params, mu)
    return (nonlinear / params.c) ** (1.0 / params.sobolev_exp) / math.sqrt(lap)
