"""Value types for one time slice of the cylinder ODE and for whole orbits."""

from __future__ import annotations

from collections.abc import Iterator, Sequence
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from fowler_core.errors import InvalidGrid


@dataclass(frozen=True, eq=False)
class CylState:
    """Time ``t`` plus ``(v_i, v_i', v_i'', v_i''')`` for every component.

    The flat vector ``y`` is laid out block-wise as
    ``[v_1..v_p, d1_1..d1_p, d2_1..d2_p, d3_1..d3_p]``, which is also the
    column order of the trajectory CSV.
    """

    t: float
    y: np.ndarray

    def __post_init__(self) -> None:
        y = np.array(self.y, dtype=float).reshape(-1)
        if y.size == 0 or y.size % 4:
            raise InvalidGrid(f"state vector must have length 4p, got {y.size}")
        y.flags.writeable = False
        object.__setattr__(self, "t", float(self.t))
        object.__setattr__(self, "y", y)

    # ---- constructors -------------------------------------------------------

    @classmethod
    def from_components(
        cls,
        t: float,
        v: Sequence[float] | np.ndarray,
        d1: Sequence[float] | np.ndarray,
        d2: Sequence[float] | np.ndarray,
        d3: Sequence[float] | np.ndarray,
    ) -> CylState:
        blocks = [np.atleast_1d(np.asarray(b, dtype=float)) for b in (v, d1, d2, d3)]
        if len({b.size for b in blocks}) != 1:
            raise InvalidGrid("v, d1, d2, d3 must have the same number of components")
        return cls(t, np.concatenate(blocks))

    @classmethod
    def zero(cls, p: int, t: float = 0.0) -> CylState:
        return cls(t, np.zeros(4 * p))

    # ---- views --------------------------------------------------------------

    @property
    def p(self) -> int:
        return self.y.size // 4

    @property
    def v(self) -> np.ndarray:
        return self.y[: self.p]

    @property
    def d1(self) -> np.ndarray:
        return self.y[self.p : 2 * self.p]

    @property
    def d2(self) -> np.ndarray:
        return self.y[2 * self.p : 3 * self.p]

    @property
    def d3(self) -> np.ndarray:
        return self.y[3 * self.p :]

    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.y)))

    # ---- transformations ----------------------------------------------------

    def scaled(self, lam: Sequence[float] | np.ndarray) -> CylState:
        """Lift a scalar (p = 1) state to the vector state ``lam * state``."""
        if self.p != 1:
            raise InvalidGrid("only scalar states can be scaled by a proportion vector")
        lam_arr = np.asarray(lam, dtype=float).reshape(-1)
        return CylState(self.t, np.kron(self.y, lam_arr))

    def reflected(self) -> CylState:
        """Image under the time reversal t -> -t (odd derivatives flip sign)."""
        p = self.p
        y = self.y.copy()
        y[p : 2 * p] *= -1.0
        y[3 * p :] *= -1.0
        return CylState(-self.t, y)


class EventKind(str, Enum):
    DERIV_ZERO = "DerivZero"
    DIVERGENCE = "Divergence"
    ZERO_HIT = "ZeroHit"


class Terminal(str, Enum):
    COMPLETED = "Completed"
    DIVERGED = "Diverged"
    HIT_ZERO = "HitZero"


@dataclass(frozen=True)
class Event:
    """An annotated instant of a trajectory.

    ``component`` is 1-based. ``extremum`` is ``"max"`` or ``"min"`` for
    derivative zeros (decided by the sign of v'' at the refined time).
    """

    t: float
    kind: EventKind
    component: int | None = None
    extremum: str | None = None


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Ordered states of one integration, stored as arrays.

    ``times`` is strictly monotone in the direction of integration
    (decreasing for backward-in-time runs).
    """

    times: np.ndarray
    values: np.ndarray
    events: tuple[Event, ...] = field(default_factory=tuple)
    terminal: Terminal = Terminal.COMPLETED

    def __post_init__(self) -> None:
        times = np.array(self.times, dtype=float).reshape(-1)
        values = np.array(self.values, dtype=float)
        if values.ndim != 2 or values.shape[0] != times.size or values.shape[1] % 4:
            raise InvalidGrid("values must be an (m, 4p) array matching times")
        if times.size > 1:
            steps = np.diff(times)
            if not (np.all(steps > 0) or np.all(steps < 0)):
                raise InvalidGrid("trajectory times must be strictly monotone")
        times.flags.writeable = False
        values.flags.writeable = False
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "events", tuple(self.events))

    @classmethod
    def from_states(
        cls,
        states: Sequence[CylState],
        events: Sequence[Event] = (),
        terminal: Terminal = Terminal.COMPLETED,
    ) -> Trajectory:
        if not states:
            return cls(np.empty(0), np.empty((0, 4)), tuple(events), terminal)
        return cls(
            np.array([s.t for s in states]),
            np.vstack([s.y for s in states]),
            tuple(events),
            terminal,
        )

    def __len__(self) -> int:
        return int(self.times.size)

    def __iter__(self) -> Iterator[CylState]:
        for k in range(len(self)):
            yield self.state(k)

    def state(self, k: int) -> CylState:
        return CylState(self.times[k], self.values[k])

    @property
    def p(self) -> int:
        return self.values.shape[1] // 4

    @property
    def v(self) -> np.ndarray:
        return self.values[:, : self.p]

    @property
    def d1(self) -> np.ndarray:
        return self.values[:, self.p : 2 * self.p]

    @property
    def d2(self) -> np.ndarray:
        return self.values[:, 2 * self.p : 3 * self.p]

    @property
    def d3(self) -> np.ndarray:
        return self.values[:, 3 * self.p :]

    @property
    def first(self) -> CylState:
        return self.state(0)

    @property
    def final(self) -> CylState:
        return self.state(len(self) - 1)

    def events_of(self, kind: EventKind) -> list[Event]:
        return [e for e in self.events if e.kind is kind]
