"""Classical fixed-step fourth-order Runge-Kutta."""

from __future__ import annotations

import numpy as np

from fowler_core.ode.steppers.base import BaseStepper, VectorField


class FixedRK4Stepper(BaseStepper):
    name = "rk4"
    order = 4

    def step(self, f: VectorField, y: np.ndarray, h: float) -> tuple[np.ndarray, float]:
        k1 = f(y)
        k2 = f(y + 0.5 * h * k1)
        k3 = f(y + 0.5 * h * k2)
        k4 = f(y + h * k3)
        return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4), 0.0
