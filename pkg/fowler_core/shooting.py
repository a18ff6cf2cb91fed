"""Delaunay orbits by shooting on the second derivative.

For a necksize ``a`` the even Cauchy data (a, 0, b, 0) leaves every
neighbourhood of the periodic orbit unless b = b(a): on one side the
orbit diverges, on the other it crosses zero. ``find_b`` scans for that
dichotomy and bisects it to floating-point exhaustion. The periodic
orbit is then reconstructed from its first half-period using the
time-reversal symmetry of even data.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from concurrent.futures import Executor
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Any

import numpy as np
from scipy.interpolate import BPoly

from fowler_core.errors import (
    AmbiguousBracket,
    BracketNotFound,
    DegenerateOrbit,
    FowlerError,
    InvalidStepperConfig,
    NecksizeOutOfRange,
    NoReturnDetected,
    describe,
)
from fowler_core.invariants import hamiltonian
from fowler_core.model import (
    DelaunaySolution,
    Params,
    check_necksize,
    derive_params,
    unit_vector,
)
from fowler_core.ode.integrate import StepperConfig, integrate
from fowler_core.ode.state import CylState, EventKind, Terminal, Trajectory
from fowler_core.transform import RadialGrid

logger = logging.getLogger(__name__)


class ShootKind(str, Enum):
    BOUNDED = "Bounded"
    DIVERGED = "Diverged"
    HIT_ZERO = "HitZero"


@dataclass(frozen=True)
class ShootOutcome:
    kind: ShootKind
    exit_time: float | None = None


@dataclass(frozen=True)
class ShootingConfig:
    """Settings shared by the scan, the bisection and the period search."""

    t_max: float = 200.0
    scan_points: int = 41
    method: str = "dopri45"
    abs_tol: float = 1e-12
    rel_tol: float = 1e-12
    h_max: float = 0.5
    residual_tolerance: float = 1e-6

    def __post_init__(self) -> None:
        if self.t_max <= 0:
            raise InvalidStepperConfig("t_max must be positive")
        if self.scan_points < 3:
            raise InvalidStepperConfig("scan_points must be at least 3")

    def stepper(self, **overrides: Any) -> StepperConfig:
        settings: dict[str, Any] = {
            "method": self.method,
            "abs_tol": self.abs_tol,
            "rel_tol": self.rel_tol,
            "h_max": self.h_max,
            "t_end": self.t_max,
            "dt": 1e-3,
        }
        settings.update(overrides)
        return StepperConfig(**settings)


def _scalar(params: Params) -> Params:
    return params if params.p == 1 else derive_params(params.n, 1)


def _even_data(a: float, b: float) -> CylState:
    return CylState(0.0, np.array([a, 0.0, b, 0.0]))


# ---- shooting predicate ------------------------------------------------------------


def shoot(
    params: Params,
    a: float,
    b: float,
    t_max: float | None = None,
    cfg: ShootingConfig | None = None,
) -> ShootOutcome:
    """Integrate (a, 0, b, 0) and report how the orbit leaves, if it does."""
    cfg = cfg or ShootingConfig()
    if a < 0:
        raise NecksizeOutOfRange(f"shooting needs a >= 0, got {a}")
    horizon = cfg.t_max if t_max is None else t_max
    traj = integrate(
        _scalar(params), _even_data(a, b), cfg.stepper(t_end=horizon, detect_events=False)
    )
    if traj.terminal is Terminal.DIVERGED:
        return ShootOutcome(ShootKind.DIVERGED, float(traj.times[-1]))
    if traj.terminal is Terminal.HIT_ZERO:
        return ShootOutcome(ShootKind.HIT_ZERO, float(traj.times[-1]))
    return ShootOutcome(ShootKind.BOUNDED)


def scan_bound(params: Params, a: float) -> float:
    """Half-width B = max(K₀, (n/2)²)·a of the b-scan."""
    return max(params.K0, (params.n / 2.0) ** 2) * a


def scan_brackets(
    params: Params, a: float, cfg: ShootingConfig | None = None
) -> list[tuple[float, float]]:
    """Every adjacent pair of scan values whose outcomes are Diverged and HitZero.

    A scan value that is itself Bounded is returned as the degenerate
    bracket (b, b).
    """
    cfg = cfg or ShootingConfig()
    half = scan_bound(params, a)
    grid = np.linspace(-half, half, cfg.scan_points)
    logger.info("scanning b in [%.6g, %.6g] for a=%.12g", -half, half, a)
    outcomes = [shoot(params, a, float(b), cfg=cfg).kind for b in grid]
    brackets: list[tuple[float, float]] = []
    for k, kind in enumerate(outcomes):
        if kind is ShootKind.BOUNDED:
            brackets.append((float(grid[k]), float(grid[k])))
        elif k + 1 < len(outcomes) and {kind, outcomes[k + 1]} == {
            ShootKind.DIVERGED,
            ShootKind.HIT_ZERO,
        }:
            brackets.append((float(grid[k]), float(grid[k + 1])))
    return brackets


def find_b(params: Params, a: float, cfg: ShootingConfig | None = None) -> float:
    """Shooting value b(a) of the bounded orbit with necksize a."""
    scalar = _scalar(params)
    check_necksize(scalar, a)
    if a == scalar.a0:
        return 0.0
    return _shooting_value(scalar.n, a, cfg or ShootingConfig())


@lru_cache(maxsize=256)
def _shooting_value(n: int, a: float, cfg: ShootingConfig) -> float:
    scalar = derive_params(n, 1)
    brackets = scan_brackets(scalar, a, cfg)
    if not brackets:
        raise BracketNotFound(
            f"no Diverged/HitZero sign change for a={a:.12g} over "
            f"b in [-{scan_bound(scalar, a):.6g}, {scan_bound(scalar, a):.6g}]"
        )
    if len(brackets) > 1:
        logger.warning("a=%.12g: %d shooting brackets found: %s", a, len(brackets), brackets)
        raise AmbiguousBracket(f"{len(brackets)} shooting brackets for a={a:.12g}", brackets)

    lo, hi = brackets[0]
    if lo == hi:
        return lo
    lo_kind = shoot(scalar, a, lo, cfg=cfg).kind
    iterations = 0
    while True:
        mid = lo + 0.5 * (hi - lo)
        if mid <= lo or mid >= hi:
            break
        kind = shoot(scalar, a, mid, cfg=cfg).kind
        iterations += 1
        if kind is ShootKind.BOUNDED:
            lo = hi = mid
            break
        if kind is lo_kind:
            lo = mid
        else:
            hi = mid
        logger.debug("bisection %d: b in [%.17g, %.17g]", iterations, lo, hi)
    b = lo + 0.5 * (hi - lo)
    logger.info("a=%.12g: b=%.17g after %d bisections", a, b, iterations)
    return b


# ---- period --------------------------------------------------------------------------


def linearized_period(params: Params) -> float:
    """2π/ω where -ω² is the negative root of μ⁴ - K₂μ² - (2**-2)K₀ = 0."""
    k = params.nonlinear_exp * params.K0
    mu2 = (params.K2 - math.sqrt(params.K2**2 + 4.0 * k)) / 2.0
    return 2.0 * math.pi / math.sqrt(-mu2)


def _half_orbit(scalar: Params, a: float, b: float, cfg: ShootingConfig) -> Trajectory:
    """Integrate (a, 0, b, 0) up to and including the first maximum of v."""
    if b == 0.0 and abs(a - scalar.a0) <= 4.0 * np.finfo(float).eps * scalar.a0:
        raise DegenerateOrbit("the constant orbit a = a0 has no period")
    traj = integrate(scalar, _even_data(a, b), cfg.stepper(stop_at_extremum="max"))
    maxima = [e for e in traj.events_of(EventKind.DERIV_ZERO) if e.extremum == "max"]
    if maxima and traj.times[-1] == maxima[0].t:
        return traj
    if traj.terminal is Terminal.COMPLETED and float(np.ptp(traj.v)) == 0.0:
        raise DegenerateOrbit(f"orbit from a={a:.12g}, b={b:.12g} is constant")
    raise NoReturnDetected(
        f"no maximum of v before t={traj.times[-1]:.6g} (terminal {traj.terminal.value})"
    )


def _residual(traj: Trajectory) -> float:
    """Mismatch after one period measured from the maximum: 2·max(|v'|, |v'''|)."""
    final = traj.final
    return 2.0 * max(abs(float(final.d1[0])), abs(float(final.d3[0])))


def fundamental_period(
    params: Params, a: float, b: float, cfg: ShootingConfig | None = None
) -> float:
    """Least period of the even orbit (a, 0, b, 0); twice the time to its first maximum."""
    traj = _half_orbit(_scalar(params), a, b, cfg or ShootingConfig())
    return 2.0 * float(traj.times[-1])


def periodicity_residual(
    params: Params, a: float, b: float, cfg: ShootingConfig | None = None
) -> float:
    return _residual(_half_orbit(_scalar(params), a, b, cfg or ShootingConfig()))


# ---- reconstructed periodic orbit ---------------------------------------------------


@dataclass(frozen=True, eq=False)
class DelaunayOrbit:
    """One period of the cylinder profile with Hermite evaluation.

    Knots carry (v, v', v'', v'''), so each interval is a degree-7
    polynomial. Evaluation tiles the period; ``phase`` shifts the radial
    profile u(r) = Λ r^{-γ} v(-ln r + phase).
    """

    params: Params
    a: float
    b: float
    period: float
    residual: float
    knots: np.ndarray
    knot_values: np.ndarray
    lam: np.ndarray = field(default_factory=lambda: np.ones(1))
    phase: float = 0.0
    _poly: BPoly = field(init=False, repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "_poly", BPoly.from_derivatives(self.knots, self.knot_values))

    @property
    def p(self) -> int:
        return int(self.lam.size)

    @property
    def hamiltonian(self) -> float:
        return hamiltonian(self.params, _even_data(self.a, self.b))

    def profile(self, t: float | np.ndarray, nu: int = 0) -> np.ndarray:
        """nu-th derivative of the scalar profile v at times t."""
        tau = np.mod(np.asarray(t, dtype=float), self.period)
        return np.asarray(self._poly(tau, nu))

    def state(self, t: float) -> CylState:
        scalar = CylState(t, np.array([float(self.profile(t, k)) for k in range(4)]))
        return scalar if self.p == 1 else scalar.scaled(self.lam)

    def trajectory(self, times: Sequence[float] | np.ndarray) -> Trajectory:
        t = np.asarray(times, dtype=float)
        scalar = np.stack([self.profile(t, k) for k in range(4)], axis=1)
        values = scalar if self.p == 1 else np.kron(scalar, self.lam[None, :])
        return Trajectory(t, values)

    def radial_values(self, r: Sequence[float] | np.ndarray) -> np.ndarray:
        r_arr = np.asarray(r, dtype=float)
        v = self.profile(-np.log(r_arr) + self.phase)
        return (r_arr ** (-self.params.gamma) * v)[:, None] * self.lam[None, :]

    def radial_grid(self, r: Sequence[float] | np.ndarray) -> RadialGrid:
        return RadialGrid(np.asarray(r, dtype=float), self.radial_values(r))

    def envelope_constants(self) -> tuple[float, float]:
        """(min v, max v) over one period; C₁ and C₂ of the blow-up envelope."""
        v = self.knot_values[:, 0]
        return float(v.min()), float(v.max())

    def solution(self) -> DelaunaySolution:
        return DelaunaySolution(self.a, self.b, self.period, self.lam, self.phase)


_MIN_KNOT_GAP = 0.1


def _spaced_knots(half: Trajectory) -> tuple[np.ndarray, np.ndarray]:
    """Half-orbit knots with no step shorter than a tenth of the median step.

    The last step is cut at the refined maximum and can be tiny; a degree-7
    Hermite piece on such an interval loses its third derivative to round-off.
    """
    t = half.times
    min_gap = _MIN_KNOT_GAP * float(np.median(np.diff(t)))
    keep = [0]
    for k in range(1, t.size - 1):
        if t[k] - t[keep[-1]] >= min_gap and t[-1] - t[k] >= min_gap:
            keep.append(k)
    keep.append(t.size - 1)
    return t[keep], half.values[keep]


def delaunay_orbit(
    params: Params,
    a: float,
    lam: Sequence[float] | np.ndarray | None = None,
    phase: float = 0.0,
    cfg: ShootingConfig | None = None,
    b: float | None = None,
) -> DelaunayOrbit:
    """Shoot for b(a) (unless given), integrate half a period and reflect it."""
    cfg = cfg or ShootingConfig()
    scalar = _scalar(params)
    b_val = find_b(scalar, a, cfg) if b is None else b
    half = _half_orbit(scalar, a, b_val, cfg)
    times, half_values = _spaced_knots(half)
    t_star = float(times[-1])
    reflected = half_values[-2::-1].copy()
    reflected[:, 1] *= -1.0
    reflected[:, 3] *= -1.0
    knots = np.concatenate([times, 2.0 * t_star - times[-2::-1]])
    values = np.vstack([half_values, reflected])
    return DelaunayOrbit(
        params=scalar,
        a=a,
        b=b_val,
        period=2.0 * t_star,
        residual=_residual(half),
        knots=knots,
        knot_values=values,
        lam=unit_vector(lam, params.p),
        phase=phase,
    )


# ---- atlas ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AtlasRow:
    a: float
    b: float
    T_a: float
    H: float
    residual: float
    error: dict[str, Any] | None = None

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "a": self.a,
            "b": self.b,
            "T_a": self.T_a,
            "H": self.H,
            "residual": self.residual,
        }
        if self.error is not None:
            out["error"] = self.error
        return out


def atlas_row(n: int, a: float, cfg: ShootingConfig | None = None) -> AtlasRow:
    """One (a, b, T_a, H, residual) row; failures are recorded in the row."""
    scalar = derive_params(n, 1)
    cfg = cfg or ShootingConfig()
    try:
        b = find_b(scalar, a, cfg)
        half = _half_orbit(scalar, a, b, cfg)
    except FowlerError as exc:
        logger.warning("atlas row a=%.12g failed: %s", a, exc)
        return AtlasRow(a, math.nan, math.nan, math.nan, math.nan, describe(exc))
    residual = _residual(half)
    error = None
    if residual > cfg.residual_tolerance:
        logger.warning("atlas row a=%.12g: periodicity residual %.3g", a, residual)
        error = describe(
            NoReturnDetected(
                f"periodicity residual {residual:.3g} above {cfg.residual_tolerance:.3g}"
            )
        )
    return AtlasRow(
        a=a,
        b=b,
        T_a=2.0 * float(half.times[-1]),
        H=hamiltonian(scalar, _even_data(a, b)),
        residual=residual,
        error=error,
    )


def atlas(
    params: Params,
    a_values: Sequence[float],
    cfg: ShootingConfig | None = None,
    executor: Executor | None = None,
) -> list[AtlasRow]:
    """Rows sorted by a; independent rows may run on ``executor``."""
    ordered = sorted(float(a) for a in a_values)
    if not ordered:
        return []
    cfg = cfg or ShootingConfig()
    n = params.n
    if executor is None:
        return [atlas_row(n, a, cfg) for a in ordered]
    return list(executor.map(atlas_row, [n] * len(ordered), ordered, [cfg] * len(ordered)))
