"""One-step integrators for the cylinder ODE."""

from fowler_core.ode.steppers.base import BaseStepper
from fowler_core.ode.steppers.dopri45 import DormandPrinceStepper
from fowler_core.ode.steppers.factory import StepperFactory
from fowler_core.ode.steppers.rk4 import FixedRK4Stepper

__all__ = [
    "BaseStepper",
    "DormandPrinceStepper",
    "FixedRK4Stepper",
    "StepperFactory",
]
