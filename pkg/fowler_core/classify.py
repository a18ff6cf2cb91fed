"""Classify sampled radial solutions by the sign of the Pohozaev invariant.

The radial samples are moved to the cylinder, differentiated there by
finite differences, and the Hamiltonian is averaged over interior
times. A removable singularity has zero invariant, a Delaunay-type one
has a negative invariant, and positive values or mixed blow-up
behaviour cannot come from a solution.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Any

import numpy as np
from scipy.interpolate import PchipInterpolator
from scipy.signal import find_peaks

from fowler_core.errors import InsufficientSpan, InvalidStepperConfig, NoisyData
from fowler_core.invariants import Verdict, hamiltonian_values
from fowler_core.model import Params
from fowler_core.transform import CylinderGrid, RadialGrid, to_cylinder

logger = logging.getLogger(__name__)

_D1 = np.array([0.0, 1.0, -8.0, 0.0, 8.0, -1.0, 0.0]) / 12.0
_D2 = np.array([0.0, -1.0, 16.0, -30.0, 16.0, -1.0, 0.0]) / 12.0
_D3 = np.array([1.0, -8.0, 13.0, 0.0, -13.0, 8.0, -1.0]) / 8.0
_NECK_PROMINENCE = 1e-6


@dataclass(frozen=True)
class ClassifyConfig:
    margin: int = 5
    min_decades: float = 3.0
    eps_floor: float = 1e-6
    eps_std_factor: float = 3.0
    noise_factor: float = 10.0
    singular_fraction: float = 0.5
    bounded_fraction: float = 0.1
    proportion_tolerance: float = 1e-6
    oscillation_tolerance: float = 1e-6

    def __post_init__(self) -> None:
        if self.margin < 3:
            raise InvalidStepperConfig("margin must cover the 7-point stencil (>= 3)")
        if not 0 < self.bounded_fraction < self.singular_fraction:
            raise InvalidStepperConfig("need 0 < bounded_fraction < singular_fraction")


@dataclass(frozen=True)
class ClassificationReport:
    pohozaev_estimate: float
    uncertainty: float
    verdict: Verdict
    gamma_hat: float
    necksize_hat: float | None
    period_hat: float | None
    lambda_hat: np.ndarray
    semi_singular: bool
    proportion_deviation: float = 0.0

    def to_dict(self) -> dict[str, Any]:
        return {
            "pohozaev": self.pohozaev_estimate,
            "uncertainty": self.uncertainty,
            "verdict": self.verdict.value,
            "gamma_hat": self.gamma_hat,
            "necksize_hat": self.necksize_hat,
            "period_hat": self.period_hat,
            "lambda_hat": [float(x) for x in self.lambda_hat],
            "semi_singular": self.semi_singular,
        }


# ---- helpers ----------------------------------------------------------------------


def _decades(grid: RadialGrid) -> float:
    return math.log10(grid.points[-1] / grid.points[0])


def _stencil(values: np.ndarray, coeffs: np.ndarray, margin: int) -> np.ndarray:
    m = values.shape[0]
    out = np.zeros((m - 2 * margin,) + values.shape[1:])
    for j, c in zip(range(-3, 4), coeffs, strict=True):
        if c != 0.0:
            out += c * values[margin + j : m - margin + j]
    return out


def cylinder_states(cyl: CylinderGrid, margin: int = 5) -> tuple[np.ndarray, np.ndarray]:
    """Interior times and (m', 4p) states with finite-difference derivatives."""
    if len(cyl) - 2 * margin < 3:
        raise InsufficientSpan(f"need more than {2 * margin + 2} cylinder samples")
    h = cyl.spacing
    v = cyl.values
    inner = v[margin : len(cyl) - margin]
    d1 = _stencil(v, _D1, margin) / h
    d2 = _stencil(v, _D2, margin) / h**2
    d3 = _stencil(v, _D3, margin) / h**3
    return cyl.times[margin : len(cyl) - margin], np.hstack([inner, d1, d2, d3])


def estimate_period(times: np.ndarray, v: np.ndarray, rel_tol: float = 1e-6) -> float | None:
    """Mean spacing of local maxima of v, or ``None`` without a clear oscillation."""
    if v.size < 3 or float(v.max() - v.min()) <= rel_tol * max(abs(float(v.max())), 1e-300):
        return None
    k = np.flatnonzero((v[1:-1] > v[:-2]) & (v[1:-1] >= v[2:])) + 1
    if k.size < 2:
        return None
    h = times[1] - times[0]
    # parabola through the three samples around each maximum
    left, mid, right = v[k - 1], v[k], v[k + 1]
    denom = left - 2.0 * mid + right
    safe = np.where(denom != 0.0, denom, 1.0)
    shift = np.where(denom != 0.0, 0.5 * (left - right) / safe, 0.0)
    peaks = times[k] + shift * h
    return float(np.mean(np.diff(peaks)))


# ---- fits -----------------------------------------------------------------------------


def _neck_secant(t: np.ndarray, log_u: np.ndarray, gamma: float) -> float | None:
    """Secant of log|U| over the widest window centred on an interior neck.

    A Delaunay cylinder profile is even about each neck, so the secant
    cancels its modulation without knowing the period.
    """
    log_v = log_u - gamma * t
    necks, _ = find_peaks(-log_v, prominence=_NECK_PROMINENCE)
    best: tuple[float, float] | None = None
    for k in necks:
        x0, x1, x2 = t[k - 1 : k + 2]
        y0, y1, y2 = log_v[k - 1 : k + 2]
        denom = (x1 - x0) * (y1 - y2) - (x1 - x2) * (y1 - y0)
        centre = x1
        if denom != 0.0:
            centre -= 0.5 * ((x1 - x0) ** 2 * (y1 - y2) - (x1 - x2) ** 2 * (y1 - y0)) / denom
        half = min(centre - t[0], t[-1] - centre)
        if best is None or half > best[1]:
            best = (float(centre), float(half))
    if best is None or 2.0 * best[1] < math.log(10.0):
        return None
    centre, half = best
    interp = PchipInterpolator(t, log_u)
    return float((interp(centre + half) - interp(centre - half)) / (2.0 * half))


def fit_blowup_rate(grid: RadialGrid, params: Params, period: float | None = None) -> float:
    """Exponent γ̂ with |U| ~ r^{-γ̂} at small r.

    With a known cylinder period T the slope is the secant of log|U| across
    the smallest whole number of periods covering a decade, which cancels a
    periodic modulation exactly. Without one, a profile with an interior neck
    whose centred window covers a decade uses the secant across that window;
    anything else gets the least-squares slope over the smallest decade.
    """
    if _decades(grid) < 1.0:
        raise InsufficientSpan("blow-up rate needs at least one decade of radii")
    norms = grid.norms()
    r = grid.points
    positive = norms > 0
    t = -np.log(r[positive])[::-1]
    log_u = np.log(norms[positive])[::-1]
    if period is None:
        if t.size >= 3:
            rate = _neck_secant(t, log_u, params.gamma)
            if rate is not None:
                return rate
        window = (r <= 10.0 * r[0]) & positive
        if int(window.sum()) < 2:
            raise InsufficientSpan("not enough positive samples in the smallest decade")
        slope = np.polyfit(np.log(r[window]), np.log(norms[window]), 1)[0]
        return float(-slope)

    periods = max(1, math.ceil(math.log(10.0) / period))
    span = periods * period
    if t[-1] - span < t[0]:
        raise InsufficientSpan(f"need {span:.6g} units of -ln r for {periods} periods")
    back = float(PchipInterpolator(t, log_u)(t[-1] - span))
    return float((log_u[-1] - back) / span)


def fit_proportions(grid: RadialGrid) -> tuple[np.ndarray, float]:
    """Averaged unit direction of U and the max deviation of any sample from it."""
    norms = grid.norms()
    rows = grid.values[norms > 0] / norms[norms > 0, None]
    if rows.size == 0:
        return np.full(grid.p, 1.0 / math.sqrt(grid.p)), 0.0
    mean = rows.mean(axis=0)
    lam = mean / np.linalg.norm(mean)
    deviation = float(np.max(np.linalg.norm(rows - lam, axis=1)))
    return lam, deviation


# ---- classification ---------------------------------------------------------------------


def classify(
    grid: RadialGrid, params: Params, cfg: ClassifyConfig | None = None
) -> ClassificationReport:
    cfg = cfg or ClassifyConfig()
    if _decades(grid) < cfg.min_decades:
        raise InsufficientSpan(
            f"classification needs {cfg.min_decades:g} decades of r, got {_decades(grid):.3g}"
        )

    cyl = to_cylinder(grid, params)
    times, states = cylinder_states(cyl, cfg.margin)
    norms_cyl = np.linalg.norm(states[:, : grid.p], axis=1)
    period = estimate_period(times, norms_cyl, cfg.oscillation_tolerance)

    # per-component blow-up behaviour
    singular: list[int] = []
    bounded: list[int] = []
    intermediate: list[tuple[int, float]] = []
    for i in range(grid.p):
        column = grid.values[:, i]
        if not np.any(column > 0):
            continue
        rate = fit_blowup_rate(RadialGrid(grid.points, column), params, period)
        if rate >= cfg.singular_fraction * params.gamma:
            singular.append(i)
        elif rate <= cfg.bounded_fraction * params.gamma:
            bounded.append(i)
        else:
            intermediate.append((i + 1, rate))
    semi_singular = bool(singular) and bool(bounded)

    energies = hamiltonian_values(params, states) * params.sphere_area
    estimate = float(energies.mean())
    eps = max(cfg.eps_floor, cfg.eps_std_factor * float(energies.std()))
    spread = float(energies.max() - energies.min())

    lam, deviation = fit_proportions(grid)
    gamma_hat = fit_blowup_rate(grid, params, period)
    necksize = float(norms_cyl.min()) if singular and not bounded else None

    def report(verdict: Verdict) -> ClassificationReport:
        logger.info(
            "classified %d samples: P=%.6g ± %.3g -> %s", len(grid), estimate, eps, verdict.value
        )
        return ClassificationReport(
            pohozaev_estimate=estimate,
            uncertainty=eps,
            verdict=verdict,
            gamma_hat=gamma_hat,
            necksize_hat=necksize,
            period_hat=period,
            lambda_hat=lam,
            semi_singular=semi_singular,
            proportion_deviation=deviation,
        )

    if semi_singular:
        return report(Verdict.INCONSISTENT)
    if intermediate:
        raise NoisyData(f"blow-up rates between bounded and singular: {intermediate}")
    if spread > cfg.noise_factor * eps:
        raise NoisyData(
            f"Pohozaev estimates vary by {spread:.3g} across t "
            f"(tolerance {cfg.noise_factor * eps:.3g})"
        )
    if deviation > cfg.proportion_tolerance:
        return report(Verdict.INCONSISTENT)
    if abs(estimate) <= eps and not singular:
        return report(Verdict.NON_SINGULAR_SPHERICAL)
    if estimate < -eps and not bounded:
        return report(Verdict.SINGULAR_DELAUNAY)
    return report(Verdict.INCONSISTENT)
