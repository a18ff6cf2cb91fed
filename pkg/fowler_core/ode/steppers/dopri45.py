"""Embedded Dormand-Prince 5(4) pair with PI step-size control."""

from __future__ import annotations

import numpy as np

from fowler_core.ode.steppers.base import BaseStepper, VectorField

# Butcher tableau
A21 = 1 / 5
A31, A32 = 3 / 40, 9 / 40
A41, A42, A43 = 44 / 45, -56 / 15, 32 / 9
A51, A52, A53, A54 = 19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729
A61, A62, A63, A64, A65 = 9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656
B1, B3, B4, B5, B6 = 35 / 384, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84
# fifth-order weights minus embedded fourth-order weights
E1 = B1 - 5179 / 57600
E3 = B3 - 7571 / 16695
E4 = B4 - 393 / 640
E5 = B5 + 92097 / 339200
E6 = B6 - 187 / 2100
E7 = -1 / 40


class DormandPrinceStepper(BaseStepper):
    """Local extrapolation (the 5th-order solution is propagated).

    Step control follows the PI controller of Hairer-Wanner with
    exponents 0.17 / 0.04.
    """

    name = "dopri45"
    order = 5
    adaptive = True

    SAFETY = 0.9
    MIN_FACTOR = 0.2
    MAX_FACTOR = 10.0
    ALPHA = 0.17
    BETA = 0.04

    def __init__(self, abs_tol: float = 1e-10, rel_tol: float = 1e-10, h_max: float = 0.5):
        self.abs_tol = abs_tol
        self.rel_tol = rel_tol
        self.h_max = h_max

    def step(self, f: VectorField, y: np.ndarray, h: float) -> tuple[np.ndarray, float]:
        k1 = f(y)
        k2 = f(y + h * (A21 * k1))
        k3 = f(y + h * (A31 * k1 + A32 * k2))
        k4 = f(y + h * (A41 * k1 + A42 * k2 + A43 * k3))
        k5 = f(y + h * (A51 * k1 + A52 * k2 + A53 * k3 + A54 * k4))
        k6 = f(y + h * (A61 * k1 + A62 * k2 + A63 * k3 + A64 * k4 + A65 * k5))
        y_new = y + h * (B1 * k1 + B3 * k3 + B4 * k4 + B5 * k5 + B6 * k6)
        k7 = f(y_new)

        err = h * (E1 * k1 + E3 * k3 + E4 * k4 + E5 * k5 + E6 * k6 + E7 * k7)
        scale = self.abs_tol + self.rel_tol * np.maximum(np.abs(y), np.abs(y_new))
        with np.errstate(invalid="ignore", over="ignore"):
            ratio = float(np.max(np.abs(err) / scale))
        return y_new, ratio

    def next_step(self, h: float, err: float, err_prev: float) -> float:
        if err == 0.0:
            factor = self.MAX_FACTOR
        else:
            factor = self.SAFETY * err**-self.ALPHA * err_prev**self.BETA
            factor = min(self.MAX_FACTOR, max(self.MIN_FACTOR, factor))
        h_new = h * factor
        return float(np.sign(h) * min(abs(h_new), self.h_max))

    def retry_step(self, h: float, err: float) -> float:
        if not np.isfinite(err):
            return h * self.MIN_FACTOR
        return h * max(self.MIN_FACTOR, self.SAFETY * err ** (-1.0 / 5.0))
