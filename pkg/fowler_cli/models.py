"""Pydantic models for run configurations and command reports."""

from __future__ import annotations

import math
from typing import Any

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from fowler_core.model import Params, spherical_state, unit_vector
from fowler_core.ode.integrate import StepperConfig
from fowler_core.ode.state import CylState
from fowler_core.ode.steppers import StepperFactory
from fowler_core.shooting import find_b, linearized_period


class RunConfig(BaseModel):
    """JSON configuration read by ``fowler integrate``.

    Exactly one initial-data selector is given: ``init`` (an explicit
    block-ordered 4p vector), ``mu`` (the bubble of that scale) or ``a``
    (even Delaunay data, with ``b`` found by shooting when omitted).
    """

    model_config = ConfigDict(populate_by_name=True, extra="forbid")

    n: int
    p: int = Field(default=1, ge=1)
    init: list[float] | None = None
    mu: float | None = Field(default=None, gt=0.0)
    a: float | None = Field(default=None, gt=0.0)
    b: float | None = None
    lam: list[float] | None = Field(default=None, alias="lambda")
    t_start: float = 0.0
    t_end: float = 10.0
    method: str = "rk4"
    dt: float = Field(default=1e-3, gt=0.0)
    abs_tol: float = Field(default=1e-10, gt=0.0)
    rel_tol: float = Field(default=1e-10, gt=0.0)
    out_trajectory: str = "trajectory.csv"
    out_invariants: str = "invariants.json"

    @field_validator("method")
    @classmethod
    def validate_method(cls, value: str) -> str:
        return StepperFactory.validate_method_name(value)

    @field_validator("init", "lam")
    @classmethod
    def validate_finite(cls, value: list[float] | None) -> list[float] | None:
        if value is not None and not all(math.isfinite(x) for x in value):
            raise ValueError("entries must be finite")
        return value

    @field_validator("lam")
    @classmethod
    def validate_lambda(cls, value: list[float] | None) -> list[float] | None:
        if value is not None and (any(x < 0 for x in value) or not any(x > 0 for x in value)):
            raise ValueError("lambda must be nonnegative and nonzero")
        return value

    @model_validator(mode="after")
    def validate_selector(self) -> RunConfig:
        chosen = [name for name in ("init", "mu", "a") if getattr(self, name) is not None]
        if len(chosen) != 1:
            raise ValueError(f"give exactly one of init, mu, a (got {chosen or 'none'})")
        if self.b is not None and self.a is None:
            raise ValueError("b is only meaningful together with a")
        if self.init is not None and len(self.init) != 4 * self.p:
            raise ValueError(f"init must have 4p = {4 * self.p} entries, got {len(self.init)}")
        if self.lam is not None and len(self.lam) != self.p:
            raise ValueError(f"lambda must have p = {self.p} entries, got {len(self.lam)}")
        if self.t_end == self.t_start:
            raise ValueError("t_end must differ from t_start")
        return self

    def initial_state(self, params: Params) -> CylState:
        if self.init is not None:
            return CylState(self.t_start, self.init)
        lam = unit_vector(self.lam, params.p) if params.p > 1 or self.lam else None
        if self.mu is not None:
            return spherical_state(params, self.mu, self.t_start, lam)
        assert self.a is not None
        b = find_b(params, self.a) if self.b is None else self.b
        state = CylState(self.t_start, [self.a, 0.0, b, 0.0])
        return state if lam is None else state.scaled(lam)

    def stepper_config(self) -> StepperConfig:
        return StepperConfig(
            method=self.method,
            dt=self.dt,
            abs_tol=self.abs_tol,
            rel_tol=self.rel_tol,
            t_end=self.t_end,
        )


class ConstantsReport(BaseModel):
    n: int
    p: int
    c: float
    chat: float
    gamma: float
    K0: float
    K2: float
    J0: float
    sobolev_exp: float
    a0: float
    bound_constant: float
    linearized_period: float
    sphere_area: float
    char_roots: list[float] = Field(default_factory=list)

    @classmethod
    def from_params(cls, params: Params) -> ConstantsReport:
        return cls(
            n=params.n,
            p=params.p,
            c=params.c,
            chat=params.chat,
            gamma=params.gamma,
            K0=params.K0,
            K2=params.K2,
            J0=params.J0,
            sobolev_exp=params.sobolev_exp,
            a0=params.a0,
            bound_constant=params.bound_constant,
            linearized_period=linearized_period(params),
            sphere_area=params.sphere_area,
            char_roots=list(params.char_roots),
        )

    def csv_row(self) -> dict[str, Any]:
        row = self.model_dump(exclude={"char_roots"})
        for k, root in enumerate(self.char_roots, start=1):
            row[f"char_root_{k}"] = root
        return row
