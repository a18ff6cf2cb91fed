"""Emden-Fowler change of variables, Kelvin transform and radial operators.

Everything here acts on radial profiles. The finite-difference operators
are fourth order; their default step ``h = 1e-3`` puts the round-off
floor near 1e-3·|fn| for the fourth derivative, so callers that need
absolute accuracy on unit-size functions pass a larger ``h``.
"""

from __future__ import annotations

import logging
from collections.abc import Callable, Sequence
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import PchipInterpolator

from fowler_core.errors import (
    BadOrdering,
    InvalidGrid,
    NonPositiveRadius,
    NonPositiveScale,
    StencilOutOfDomain,
)
from fowler_core.model import Params

logger = logging.getLogger(__name__)

RadialFunction = Callable[[np.ndarray], np.ndarray]

DEFAULT_STEP = 1e-3
MIN_RADIAL_POINTS = 9
_UNIFORM_TOL = 1e-9


def _as_matrix(values: np.ndarray | Sequence[float], m: int) -> np.ndarray:
    arr = np.array(values, dtype=float)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    if arr.ndim != 2 or arr.shape[0] != m or arr.shape[1] < 1:
        raise InvalidGrid(f"values must be an ({m}, p) array, got shape {arr.shape}")
    return arr


# ---- grids ----------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class RadialGrid:
    """Samples u_i(r_k) on strictly increasing positive radii."""

    points: np.ndarray
    values: np.ndarray

    def __post_init__(self) -> None:
        points = np.array(self.points, dtype=float).reshape(-1)
        values = _as_matrix(self.values, points.size)
        if points.size < MIN_RADIAL_POINTS:
            raise InvalidGrid(f"need at least {MIN_RADIAL_POINTS} radii, got {points.size}")
        if np.any(points <= 0):
            raise NonPositiveRadius("all radii must be strictly positive")
        if np.any(np.diff(points) <= 0):
            raise InvalidGrid("radii must be strictly increasing")
        if not np.all(np.isfinite(points)) or not np.all(np.isfinite(values)):
            raise InvalidGrid("radial samples must be finite")
        if np.any(values < 0):
            raise InvalidGrid("radial samples must be nonnegative")
        points.flags.writeable = False
        values.flags.writeable = False
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "values", values)

    @property
    def p(self) -> int:
        return int(self.values.shape[1])

    def __len__(self) -> int:
        return int(self.points.size)

    def norms(self) -> np.ndarray:
        """|U(r_k)|, the Euclidean norm over components."""
        return np.linalg.norm(self.values, axis=1)


@dataclass(frozen=True, eq=False)
class CylinderGrid:
    """Samples v_i(t_k) on a uniform, strictly increasing t-grid."""

    times: np.ndarray
    values: np.ndarray

    def __post_init__(self) -> None:
        times = np.array(self.times, dtype=float).reshape(-1)
        values = _as_matrix(self.values, times.size)
        if times.size < 2:
            raise InvalidGrid("a cylinder grid needs at least two samples")
        steps = np.diff(times)
        if np.any(steps <= 0):
            raise InvalidGrid("cylinder times must be strictly increasing")
        if float(np.max(np.abs(steps - steps.mean()))) > 1e-12 * max(1.0, float(steps.mean())):
            raise InvalidGrid("cylinder times must be uniformly spaced")
        if not np.all(np.isfinite(times)) or not np.all(np.isfinite(values)):
            raise InvalidGrid("cylinder samples must be finite")
        times.flags.writeable = False
        values.flags.writeable = False
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)

    @property
    def p(self) -> int:
        return int(self.values.shape[1])

    @property
    def spacing(self) -> float:
        return float((self.times[-1] - self.times[0]) / (self.times.size - 1))

    def __len__(self) -> int:
        return int(self.times.size)


# ---- cylinder change of variables -------------------------------------------------


def to_cylinder(grid: RadialGrid, params: Params) -> CylinderGrid:
    """v_i(t) = r^γ u_i(r) with t = -ln r, on a uniform t-grid.

    Log-uniform radii map to a uniform grid directly; anything else is
    resampled onto ``len(grid)`` equispaced times by monotone cubic
    interpolation.
    """
    t = -np.log(grid.points[::-1])
    v = grid.values[::-1] * (grid.points[::-1] ** params.gamma)[:, None]
    m = t.size
    uniform = np.linspace(t[0], t[-1], m)
    h = (t[-1] - t[0]) / (m - 1)
    if float(np.max(np.abs(t - uniform))) <= _UNIFORM_TOL * h:
        return CylinderGrid(uniform, v)
    logger.debug("resampling %d non-log-uniform radii onto a uniform t-grid", m)
    return CylinderGrid(uniform, PchipInterpolator(t, v, axis=0)(uniform))


def from_cylinder(grid: CylinderGrid, params: Params) -> RadialGrid:
    """Inverse of :func:`to_cylinder`: r = e^{-t}, u = r^{-γ} v."""
    r = np.exp(-grid.times[::-1])
    u = grid.values[::-1] * (r ** (-params.gamma))[:, None]
    return RadialGrid(r, u)


def grid_function(grid: RadialGrid, component: int = 0) -> RadialFunction:
    """Monotone cubic interpolant of one component in log r."""
    if not 0 <= component < grid.p:
        raise InvalidGrid(f"component {component} out of range for p={grid.p}")
    interp = PchipInterpolator(np.log(grid.points), grid.values[:, component])

    def fn(r: np.ndarray) -> np.ndarray:
        return interp(np.log(np.asarray(r, dtype=float)))

    return fn


# ---- Kelvin transform ----------------------------------------------------------------


def kelvin(fn: RadialFunction, mu: float, r: float | np.ndarray, params: Params) -> np.ndarray:
    """(μ/r)^{n-4} fn(μ²/r)."""
    if mu <= 0:
        raise NonPositiveScale(f"mu must be positive, got {mu}")
    r_arr = np.asarray(r, dtype=float)
    if np.any(r_arr <= 0):
        raise NonPositiveRadius("Kelvin transform needs r > 0")
    return (mu / r_arr) ** (params.n - 4) * fn(mu * mu / r_arr)


def kelvin_function(fn: RadialFunction, mu: float, params: Params) -> RadialFunction:
    """``kelvin`` curried into a radial function, so it can be transformed again."""

    def transformed(r: np.ndarray) -> np.ndarray:
        return kelvin(fn, mu, r, params)

    return transformed


# ---- finite-difference radial operators --------------------------------------------

_OFFSETS = np.arange(-3, 4, dtype=float)
_D1 = np.array([0.0, 1.0, -8.0, 0.0, 8.0, -1.0, 0.0]) / 12.0
_D2 = np.array([0.0, -1.0, 16.0, -30.0, 16.0, -1.0, 0.0]) / 12.0
_D3 = np.array([1.0, -8.0, 13.0, 0.0, -13.0, 8.0, -1.0]) / 8.0
_D4 = np.array([-1.0, 12.0, -39.0, 56.0, -39.0, 12.0, -1.0]) / 6.0


def radial_derivatives(
    fn: RadialFunction, r: float | np.ndarray, h: float = DEFAULT_STEP
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Centered fourth-order approximations of fn', fn'', fn''', fn''''."""
    r_arr = np.asarray(r, dtype=float)
    if h <= 0:
        raise StencilOutOfDomain(f"step h must be positive, got {h}")
    if np.any(r_arr - 3.0 * h <= 0):
        raise StencilOutOfDomain(f"stencil r - 3h must stay positive (h={h})")
    samples = np.stack([np.asarray(fn(r_arr + k * h), dtype=float) for k in _OFFSETS])
    d1 = np.tensordot(_D1, samples, axes=1) / h
    d2 = np.tensordot(_D2, samples, axes=1) / h**2
    d3 = np.tensordot(_D3, samples, axes=1) / h**3
    d4 = np.tensordot(_D4, samples, axes=1) / h**4
    return d1, d2, d3, d4


def radial_laplacian(
    fn: RadialFunction, r: float | np.ndarray, params: Params, h: float = DEFAULT_STEP
) -> np.ndarray:
    r_arr = np.asarray(r, dtype=float)
    d1, d2, _, _ = radial_derivatives(fn, r_arr, h)
    return d2 + (params.n - 1) * d1 / r_arr


def radial_bilaplacian(
    fn: RadialFunction, r: float | np.ndarray, params: Params, h: float = DEFAULT_STEP
) -> np.ndarray:
    """Δ²fn for radial fn: ∂⁴ + 2(n-1)r⁻¹∂³ + (n-1)(n-3)r⁻²∂² - (n-1)(n-3)r⁻³∂."""
    r_arr = np.asarray(r, dtype=float)
    d1, d2, d3, d4 = radial_derivatives(fn, r_arr, h)
    n = params.n
    k = (n - 1) * (n - 3)
    return d4 + 2.0 * (n - 1) * d3 / r_arr + k * d2 / r_arr**2 - k * d1 / r_arr**3


def verify_kelvin_identity(
    fn: RadialFunction,
    mu: float,
    samples: Sequence[float] | np.ndarray,
    params: Params,
    h: float = DEFAULT_STEP,
) -> float:
    """Max relative residual of Δ²(K_μ fn)(r) = (μ/r)^{n+4} (Δ²fn)(μ²/r).

    The right side is differenced with the image step h·max(1, μ²/r²) so
    the (μ/r)^{n+4} factor does not amplify its round-off.
    """
    r = np.asarray(samples, dtype=float).reshape(-1)
    if np.any(r <= 0):
        raise NonPositiveRadius("Kelvin samples must be positive")
    lhs = radial_bilaplacian(kelvin_function(fn, mu, params), r, params, h)
    rho = mu * mu / r
    inner = np.array(
        [
            float(radial_bilaplacian(fn, rho_k, params, h * max(1.0, (mu / r_k) ** 2)))
            for rho_k, r_k in zip(rho, r, strict=True)
        ]
    )
    rhs = (mu / r) ** (params.n + 4) * inner
    residual = np.abs(lhs - rhs) / (1.0 + np.abs(inner))
    return float(np.max(residual))


# ---- three-spheres comparison -----------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ThreeSpheresReport:
    """Per-probe margins of the value against the r^{4-n} interpolant."""

    probes: np.ndarray
    margins: np.ndarray

    @property
    def min_margin(self) -> float:
        return float(np.min(self.margins))

    @property
    def worst_probe(self) -> float:
        return float(self.probes[int(np.argmin(self.margins))])

    def holds(self, tol: float = 1e-10) -> bool:
        return self.min_margin >= -tol


def three_spheres_check(
    fn: RadialFunction,
    r1: float,
    r2: float,
    probes: Sequence[float] | np.ndarray,
    params: Params,
) -> ThreeSpheresReport:
    """m(r) minus the interpolant of m(r₁), m(r₂) in the variable r^{4-n}.

    For a radial function the minimum over a sphere is its value there.
    """
    radii = np.asarray(probes, dtype=float).reshape(-1)
    if not (0 < r1 < r2) or radii.size == 0 or np.any(radii <= r1) or np.any(radii >= r2):
        raise BadOrdering("three-spheres check needs 0 < r1 < probes < r2")
    e = 4 - params.n
    s1, s2, s = r1**e, r2**e, radii**e
    m1 = float(np.asarray(fn(np.array([r1])))[0])
    m2 = float(np.asarray(fn(np.array([r2])))[0])
    interpolant = (m1 * (s2 - s) + m2 * (s - s1)) / (s2 - s1)
    return ThreeSpheresReport(radii, np.asarray(fn(radii), dtype=float) - interpolant)
