"""Resolve stepper names and build matching stepper objects."""

from __future__ import annotations

from typing import TYPE_CHECKING

from fowler_core.errors import UnknownMethod
from fowler_core.ode.steppers.base import BaseStepper
from fowler_core.ode.steppers.dopri45 import DormandPrinceStepper
from fowler_core.ode.steppers.rk4 import FixedRK4Stepper

if TYPE_CHECKING:
    from fowler_core.ode.integrate import StepperConfig


class StepperFactory:
    """Name normalisation with aliases, then construction from a config."""

    SUPPORTED_METHODS = {"rk4", "dopri45"}

    @staticmethod
    def normalize_method_name(name: str) -> str:
        val = name.strip().lower().replace("-", "_")
        aliases = {
            "fixed_rk4": "rk4",
            "rk": "rk4",
            "dp45": "dopri45",
            "rk45": "dopri45",
            "adaptive": "dopri45",
            "embedded_adaptive_45": "dopri45",
            "dormand_prince": "dopri45",
        }
        return aliases.get(val, val)

    @classmethod
    def validate_method_name(cls, name: str) -> str:
        normalized = cls.normalize_method_name(name)
        if normalized not in cls.SUPPORTED_METHODS:
            raise UnknownMethod(f"Unsupported method '{name}'. Valid values: rk4, dopri45.")
        return normalized

    @classmethod
    def build(cls, cfg: StepperConfig) -> BaseStepper:
        normalized = cls.validate_method_name(cfg.method)
        if normalized == "rk4":
            return FixedRK4Stepper()
        return DormandPrinceStepper(abs_tol=cfg.abs_tol, rel_tol=cfg.rel_tol, h_max=cfg.h_max)
