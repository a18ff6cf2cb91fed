"""Right-hand side of the cylinder system and the time-stepping driver."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from fowler_core.errors import (
    InvalidComponentCount,
    InvalidStepperConfig,
    NonFiniteState,
    StepSizeUnderflow,
)
from fowler_core.model import Params
from fowler_core.ode.state import CylState, Event, EventKind, Terminal, Trajectory
from fowler_core.ode.steppers.base import BaseStepper, VectorField
from fowler_core.ode.steppers.factory import StepperFactory

logger = logging.getLogger(__name__)

MIN_STEP = 1e-14
_EPS = float(np.finfo(float).eps)


# ---- vector field ---------------------------------------------------------------


def vector_field(params: Params) -> VectorField:
    """Closure evaluating the first-order form of the system on flat 4p vectors.

    The coupling factor c(n)|V|^{2**-2} - K₀ is set to exactly zero within
    64 ulp of K₀, so the constant fixed point is stationary in floating point.
    """
    p = params.p
    K0, K2, c, expo = params.K0, params.K2, params.c, params.nonlinear_exp
    snap = 64.0 * _EPS * K0

    def f(y: np.ndarray) -> np.ndarray:
        v = y[:p]
        out = np.empty_like(y)
        out[: 3 * p] = y[p:]
        norm = math.sqrt(float(np.dot(v, v)))
        coef = c * norm**expo - K0
        if abs(coef) <= snap:
            coef = 0.0
        out[3 * p :] = K2 * y[2 * p : 3 * p] + coef * v
        return out

    return f


def rhs(params: Params, state: CylState) -> np.ndarray:
    """(d1, d2, d3, K₂d2 - K₀v + c(n)|V|^{2**-2}v) for every component."""
    if not state.is_finite():
        raise NonFiniteState(f"state at t={state.t} contains non-finite entries")
    if state.p != params.p:
        raise InvalidComponentCount(f"state has {state.p} components, params expect {params.p}")
    return vector_field(params)(state.y)


# ---- configuration ------------------------------------------------------------


@dataclass(frozen=True)
class StepperConfig:
    """Integration settings.

    ``dt`` is the step of the fixed method and the first trial step of the
    adaptive one. ``divergence_bound=None`` selects
    :func:`default_divergence_bound`. When ``stop_at_extremum`` is ``"max"``
    or ``"min"`` the run ends at the first refined extremum of that type.
    """

    method: str = "rk4"
    dt: float = 1e-3
    abs_tol: float = 1e-10
    rel_tol: float = 1e-10
    t_end: float = 10.0
    divergence_bound: float | None = None
    zero_tolerance: float = 1e-12
    h_max: float = 0.5
    event_tolerance: float = 1e-12
    detect_events: bool = True
    stop_at_extremum: str | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "method", StepperFactory.validate_method_name(self.method))
        for name in ("dt", "abs_tol", "rel_tol", "h_max", "event_tolerance"):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise InvalidStepperConfig(f"{name} must be positive and finite, got {value}")
        if self.zero_tolerance < 0:
            raise InvalidStepperConfig("zero_tolerance must be nonnegative")
        if self.divergence_bound is not None and self.divergence_bound <= 0:
            raise InvalidStepperConfig("divergence_bound must be positive")
        if not math.isfinite(self.t_end):
            raise InvalidStepperConfig("t_end must be finite")
        if self.stop_at_extremum not in (None, "max", "min"):
            raise InvalidStepperConfig("stop_at_extremum must be 'max', 'min' or None")


def default_divergence_bound(params: Params) -> float:
    return 10.0 * max(1.0, params.bound_constant)


# ---- integration ----------------------------------------------------------------


def _refine_crossing(
    stepper: BaseStepper,
    f: VectorField,
    y: np.ndarray,
    h: float,
    index: int,
    tol: float,
) -> tuple[float, np.ndarray]:
    """Fraction θ of the step where d1 vanishes, and the state there."""

    def d1_at(theta: float) -> float:
        return float(stepper.step(f, y, theta * h)[0][index])

    theta = float(brentq(d1_at, 0.0, 1.0, xtol=tol / abs(h)))
    return theta, stepper.step(f, y, theta * h)[0]


def _extremum(y: np.ndarray, p: int, i: int) -> str:
    return "max" if y[2 * p + i] < 0 else "min"


def integrate(params: Params, init: CylState, cfg: StepperConfig | None = None) -> Trajectory:
    """Integrate from ``init.t`` to ``cfg.t_end`` (backward when ``t_end < init.t``).

    Returns
    -------
    Trajectory
        Accepted step states plus events. ``DerivZero`` events are refined
        by root-finding on the single-step map; a run that crosses the
        divergence bound or goes below ``-zero_tolerance`` stops there with
        the matching terminal.
    """
    cfg = cfg or StepperConfig()
    if init.p != params.p:
        raise InvalidComponentCount(f"state has {init.p} components, params expect {params.p}")
    if not init.is_finite():
        raise NonFiniteState(f"initial state at t={init.t} contains non-finite entries")

    p = params.p
    stepper = StepperFactory.build(cfg)
    f = vector_field(params)
    bound = cfg.divergence_bound or default_divergence_bound(params)

    t0 = init.t
    span = cfg.t_end - t0
    times = [t0]
    values = [init.y.copy()]
    events: list[Event] = []
    terminal = Terminal.COMPLETED
    if span == 0.0:
        return Trajectory(np.array(times), np.vstack(values), (), terminal)

    direction = 1.0 if span > 0 else -1.0
    if stepper.adaptive:
        n_fixed = 0
        h = direction * min(cfg.dt, cfg.h_max)
    else:
        n_fixed = max(1, math.ceil(abs(span) / cfg.dt - 1e-9))
        h = span / n_fixed

    t = t0
    y = init.y.copy()
    err_prev = 1e-4
    k = 0
    finished = False
    while not finished:
        if stepper.adaptive:
            remaining = cfg.t_end - t
            last = abs(h) >= abs(remaining) or abs(remaining - h) <= 1e-12 * max(
                1.0, abs(cfg.t_end)
            )
            if last:
                h = remaining
            y_new, err = stepper.step(f, y, h)
            if not (err <= 1.0):
                h = stepper.retry_step(h, err)
                logger.debug("rejected step at t=%.6g (err=%.3g), retrying with h=%.3g", t, err, h)
                if abs(h) < MIN_STEP:
                    raise StepSizeUnderflow(f"adaptive step fell below {MIN_STEP:g} at t={t:.12g}")
                continue
            t_new = cfg.t_end if last else t + h
            h_used = h
            h = stepper.next_step(h, err, err_prev)
            err_prev = max(err, 1e-4)
            finished = last
        else:
            k += 1
            y_new, _ = stepper.step(f, y, h)
            h_used = h
            t_new = cfg.t_end if k == n_fixed else t0 + k * h
            finished = k == n_fixed

        if not np.all(np.isfinite(y_new)):
            raise NonFiniteState(f"integration produced non-finite values near t={t_new:.12g}")

        stop_state: tuple[float, np.ndarray] | None = None
        if cfg.detect_events:
            old_d1 = y[p : 2 * p]
            new_d1 = y_new[p : 2 * p]
            crossings: list[tuple[float, int, np.ndarray]] = []
            for i in range(p):
                if old_d1[i] * new_d1[i] < 0:
                    theta, y_ev = _refine_crossing(
                        stepper, f, y, h_used, p + i, cfg.event_tolerance
                    )
                    crossings.append((theta, i, y_ev))
                elif new_d1[i] == 0.0 and old_d1[i] != 0.0:
                    crossings.append((1.0, i, y_new))
            for theta, i, y_ev in sorted(crossings, key=lambda item: item[0]):
                kind = _extremum(y_ev, p, i)
                t_ev = t_new if theta == 1.0 else t + theta * h_used
                events.append(Event(t_ev, EventKind.DERIV_ZERO, i + 1, kind))
                if cfg.stop_at_extremum == kind:
                    stop_state = (t_ev, y_ev)
                    break

        if stop_state is not None:
            t_ev, y_ev = stop_state
            if t_ev != t:
                times.append(t_ev)
                values.append(y_ev)
            break

        times.append(t_new)
        values.append(y_new)
        t, y = t_new, y_new

        v_new = y_new[:p]
        if np.any(np.abs(v_new) > bound):
            events.append(Event(t_new, EventKind.DIVERGENCE))
            terminal = Terminal.DIVERGED
            break
        negative = np.flatnonzero(v_new < -cfg.zero_tolerance)
        if negative.size:
            events.append(Event(t_new, EventKind.ZERO_HIT, int(negative[0]) + 1))
            terminal = Terminal.HIT_ZERO
            break

    logger.debug(
        "integrated %s over [%.6g, %.6g]: %d states, %d events, terminal=%s",
        cfg.method,
        t0,
        times[-1],
        len(times),
        len(events),
        terminal.value,
    )
    return Trajectory(np.array(times), np.vstack(values), tuple(events), terminal)


# ---- convergence study ------------------------------------------------------------


def measure_convergence_order(
    params: Params,
    init: CylState,
    dt: float = 0.05,
    t_end: float | None = None,
    method: str = "rk4",
) -> float | None:
    """Observed order from runs at dt and dt/2 against a dt/4 reference.

    With e(h) ≈ Ch^q the ratio e(dt)/e(dt/2) equals 2^q + 1, so
    q = log₂(e₁/e₂ - 1). Returns ``None`` (no signal) when the errors vanish.
    """
    end = init.t + 5.0 if t_end is None else t_end
    finals = []
    for step in (dt, dt / 2.0, dt / 4.0):
        cfg = StepperConfig(method=method, dt=step, t_end=end, detect_events=False)
        finals.append(integrate(params, init, cfg).values[-1])
    e1 = float(np.max(np.abs(finals[0] - finals[2])))
    e2 = float(np.max(np.abs(finals[1] - finals[2])))
    if e1 == 0.0 or e2 == 0.0 or e1 / e2 <= 1.0:
        return None
    return math.log2(e1 / e2 - 1.0)
