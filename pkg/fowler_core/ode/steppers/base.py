"""Abstract base class shared by every one-step integrator."""

from __future__ import annotations

from abc import ABC, abstractmethod
from collections.abc import Callable

import numpy as np

VectorField = Callable[[np.ndarray], np.ndarray]


class BaseStepper(ABC):
    """Common interface for the one-step methods used by ``integrate``.

    The cylinder ODE is autonomous, so the vector field takes the state
    only. A negative ``h`` integrates backward in time.
    """

    name: str = "base"  # human-friendly label, overridden by subclasses
    order: int = 0
    adaptive: bool = False

    # ---- abstract API -------------------------------------------------------

    @abstractmethod
    def step(self, f: VectorField, y: np.ndarray, h: float) -> tuple[np.ndarray, float]:
        """Advance ``y`` by ``h``.

        Returns
        -------
        tuple
            The new state and a scaled error norm (``<= 1`` means the step
            meets the tolerances; fixed-step methods always return ``0.0``).
        """

    # ---- step-size control ----------------------------------------------------

    def next_step(self, h: float, err: float, err_prev: float) -> float:
        """Step size to try after an accepted step."""
        return h

    def retry_step(self, h: float, err: float) -> float:
        """Step size to try after a rejected step."""
        return h
