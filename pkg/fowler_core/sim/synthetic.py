"""Synthetic radial samples and closed-form trajectories.

Generators for the two solution families plus counterexamples such as
semi-singular and non-proportional grids. The tests and the verification
suites draw their fixtures from here.
"""

from __future__ import annotations

from collections.abc import Sequence

import numpy as np

from fowler_core.model import Params, spherical_derivatives, spherical_radial, unit_vector
from fowler_core.ode.state import Trajectory
from fowler_core.shooting import ShootingConfig, delaunay_orbit
from fowler_core.transform import RadialGrid


def log_radii(r_min: float, r_max: float, m: int) -> np.ndarray:
    """m log-uniform radii; maps to a uniform grid on the cylinder."""
    return np.exp(np.linspace(np.log(r_min), np.log(r_max), m))


def _lift(values: np.ndarray, lam: Sequence[float] | np.ndarray | None, p: int) -> np.ndarray:
    return values[:, None] * unit_vector(lam, p)[None, :]


# ---- radial grids ------------------------------------------------------------------


def spherical_grid(
    params: Params,
    mu: float,
    radii: np.ndarray,
    lam: Sequence[float] | np.ndarray | None = None,
) -> RadialGrid:
    return RadialGrid(radii, _lift(spherical_radial(params, mu, radii), lam, params.p))


def constant_cylinder_grid(
    params: Params, radii: np.ndarray, lam: Sequence[float] | np.ndarray | None = None
) -> RadialGrid:
    """U = Λ a₀ r^{-γ}, the singular solution with constant cylinder trace."""
    return RadialGrid(radii, _lift(params.a0 * radii ** (-params.gamma), lam, params.p))


def delaunay_grid(
    params: Params,
    a: float,
    radii: np.ndarray,
    lam: Sequence[float] | np.ndarray | None = None,
    phase: float = 0.0,
    cfg: ShootingConfig | None = None,
) -> RadialGrid:
    return delaunay_orbit(params, a, lam=lam, phase=phase, cfg=cfg).radial_grid(radii)


def power_grid(coefficient: float, exponent: float, radii: np.ndarray) -> RadialGrid:
    """C r^{-exponent}."""
    return RadialGrid(radii, coefficient * radii ** (-exponent))


def semi_singular_grid(params: Params, radii: np.ndarray) -> RadialGrid:
    """Component 1 bounded (bubble), component 2 blowing up like a₀ r^{-γ}."""
    bounded = spherical_radial(params, 1.0, radii)
    singular = params.a0 * radii ** (-params.gamma)
    return RadialGrid(radii, np.column_stack([bounded, singular]))


def non_proportional_grid(
    params: Params, radii: np.ndarray, p: int = 2, seed: int | None = 0
) -> RadialGrid:
    """Bubble profile with independently jittered component weights."""
    rng = np.random.default_rng(seed)
    weights = rng.uniform(0.5, 1.5, size=(radii.size, p))
    return RadialGrid(radii, spherical_radial(params, 1.0, radii)[:, None] * weights)


# ---- trajectories -------------------------------------------------------------------


def spherical_trajectory(
    params: Params,
    mu: float,
    times: np.ndarray,
    lam: Sequence[float] | np.ndarray | None = None,
) -> Trajectory:
    """Exact sech orbit (and derivatives) sampled at ``times``."""
    scalar = spherical_derivatives(params, mu, times, order=3).T
    if params.p == 1 and lam is None:
        return Trajectory(times, scalar)
    return Trajectory(times, np.kron(scalar, unit_vector(lam, params.p)[None, :]))


def constant_trajectory(
    params: Params, times: np.ndarray, value: float | None = None
) -> Trajectory:
    """v ≡ value (default a₀) with vanishing derivatives, scalar."""
    level = params.a0 if value is None else value
    values = np.zeros((np.asarray(times).size, 4))
    values[:, 0] = level
    return Trajectory(times, values)


def exponential_trajectory(rate: float, times: np.ndarray) -> Trajectory:
    """v = e^{rate·t}; with rate = 2γ it violates the gradient bound."""
    t = np.asarray(times, dtype=float)
    v = np.exp(rate * t)
    return Trajectory(t, np.column_stack([v, rate * v, rate**2 * v, rate**3 * v]))
