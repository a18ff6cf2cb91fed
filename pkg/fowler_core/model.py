"""Dimension constants and the two closed-form solution families.

All constants are derived from the dimension ``n`` (and component count
``p``) of the system Δ²u_i = c(n)|U|^{2**-2}u_i. On the cylinder
v(t) = r^γ u(r), t = -ln r, the system becomes the constant-coefficient
ODE v'''' - K₂v'' + K₀v = c(n)|V|^{2**-2}v.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from numpy.polynomial import Polynomial
from scipy.optimize import brentq

from fowler_core.errors import (
    DimensionTooSmall,
    InvalidComponentCount,
    NecksizeOutOfRange,
    NonPositiveScale,
)
from fowler_core.ode.state import CylState

logger = logging.getLogger(__name__)


def _gamma_half(k: int) -> float:
    """Γ(k/2) for a positive integer k, by the recurrence Γ(x + 1) = xΓ(x)."""
    value = 1.0 if k % 2 == 0 else math.sqrt(math.pi)
    x = 1.0 if k % 2 == 0 else 0.5
    while x < k / 2:
        value *= x
        x += 1.0
    return value


@dataclass(frozen=True)
class Params:
    """Every dimension-derived constant used by the other modules."""

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
    char_roots: tuple[float, float, float, float]
    sphere_area: float

    @property
    def nonlinear_exp(self) -> float:
        """2** - 2 = 8/(n - 4), the power of |V| in the coupling."""
        return self.sobolev_exp - 2.0

    @property
    def bound_constant(self) -> float:
        """K₀^{(n-4)/8}, the scalar bound on positive orbits."""
        return self.K0 ** ((self.n - 4) / 8)

    def invariant_residuals(self) -> dict[str, float]:
        """Relative residuals of the defining identities (all ~1e-16)."""
        quartic = [
            abs(r**4 - self.K2 * r**2 + self.K0) / max(r**4, self.K0) for r in self.char_roots
        ]
        return {
            "discriminant": self.K2**2 - 4.0 * self.K0,
            "fixed_point": abs(self.c * self.a0**self.nonlinear_exp - self.K0) / self.K0,
            "char_roots": max(quartic),
        }


@lru_cache(maxsize=64)
def derive_params(n: int, p: int = 1) -> Params:
    if n < 5:
        raise DimensionTooSmall(f"dimension n must be >= 5, got {n}")
    if p < 1:
        raise InvalidComponentCount(f"component count p must be >= 1, got {p}")

    c = n * (n - 4) * (n * n - 4) / 16.0
    sobolev_exp = 2.0 * n / (n - 4)
    gamma = (n - 4) / 2.0
    half_n = n / 2.0
    return Params(
        n=n,
        p=p,
        c=c,
        chat=c / sobolev_exp,
        gamma=gamma,
        K0=n * n * (n - 4) ** 2 / 16.0,
        K2=(n * n - 4 * n + 8) / 2.0,
        J0=n * (n - 4) / 4.0,
        sobolev_exp=sobolev_exp,
        a0=(n * (n - 4) / (n * n - 4)) ** ((n - 4) / 8.0),
        char_roots=(-half_n, -gamma, gamma, half_n),
        sphere_area=2.0 * math.pi**half_n / _gamma_half(n),
    )


def decay_rate(params: Params) -> float:
    """Smallest positive characteristic root; equals γ."""
    return math.sqrt(params.K2 / 2.0 - math.sqrt(params.K2**2 / 4.0 - params.K0))


# ---- solution descriptors ----------------------------------------------------


def unit_vector(lam: Sequence[float] | np.ndarray | None, p: int) -> np.ndarray:
    if lam is None:
        return np.full(p, 1.0 / math.sqrt(p))
    arr = np.asarray(lam, dtype=float).reshape(-1)
    norm = float(np.linalg.norm(arr))
    if norm == 0.0:
        raise InvalidComponentCount("proportion vector must be nonzero")
    return arr / norm


@dataclass(frozen=True, eq=False)
class SphericalSolution:
    """U = Λ u_μ with u_μ(r) = (2μ/(1 + μ²r²))^γ and Λ ∈ S^{p-1}_+."""

    mu: float
    lam: np.ndarray = field(default_factory=lambda: np.ones(1))

    def __post_init__(self) -> None:
        if self.mu <= 0:
            raise NonPositiveScale(f"mu must be positive, got {self.mu}")
        lam = unit_vector(self.lam, 1)
        if np.any(lam < 0):
            raise InvalidComponentCount("spherical proportions must be nonnegative")
        object.__setattr__(self, "lam", lam)


@dataclass(frozen=True, eq=False)
class DelaunaySolution:
    """U = Λ* r^{-γ} v_a(-ln r + phase) with Λ* strictly positive.

    ``period`` is the fundamental period T_a, or ``None`` for the
    constant orbit a = a₀ (which has no period).
    """

    a: float
    b: float
    period: float | None
    lam: np.ndarray = field(default_factory=lambda: np.ones(1))
    phase: float = 0.0

    def __post_init__(self) -> None:
        lam = unit_vector(self.lam, 1)
        if np.any(lam <= 0):
            raise InvalidComponentCount("Delaunay proportions must be strictly positive")
        object.__setattr__(self, "lam", lam)

    @property
    def is_constant(self) -> bool:
        return self.period is None


# ---- spherical family ----------------------------------------------------------


@lru_cache(maxsize=32)
def _sech_polynomials(gamma: float, order: int) -> tuple[Polynomial, ...]:
    """P_k with d^k/dτ^k sech(τ)^γ = sech(τ)^γ · P_k(tanh τ).

    From v' = -γ tanh·v and tanh' = 1 - tanh²:
    P_{k+1} = -γ x P_k + (1 - x²) P_k'.
    """
    x = Polynomial([0.0, 1.0])
    one_minus_x2 = Polynomial([1.0, 0.0, -1.0])
    polys = [Polynomial([1.0])]
    for _ in range(order):
        prev = polys[-1]
        polys.append(-gamma * x * prev + one_minus_x2 * prev.deriv())
    return tuple(polys)


def spherical_derivatives(
    params: Params, mu: float, t: float | np.ndarray, order: int = 3
) -> np.ndarray:
    """Exact t-derivatives 0..order of v(t) = sech(t - ln μ)^γ.

    Returns an array of shape ``(order + 1,) + shape(t)``.
    """
    if mu <= 0:
        raise NonPositiveScale(f"mu must be positive, got {mu}")
    tau = np.asarray(t, dtype=float) - math.log(mu)
    with np.errstate(over="ignore"):
        v = 1.0 / np.cosh(tau) ** params.gamma
    x = np.tanh(tau)
    polys = _sech_polynomials(params.gamma, order)
    return np.stack([v * poly(x) for poly in polys])


def spherical_state(
    params: Params,
    mu: float,
    t: float,
    lam: Sequence[float] | np.ndarray | None = None,
) -> CylState:
    """Cylinder state of the bubble at time t; scaled by Λ when given."""
    derivs = spherical_derivatives(params, mu, t, order=3)
    state = CylState(t, derivs.reshape(4))
    if lam is None:
        return state
    return state.scaled(unit_vector(lam, params.p))


def spherical_radial(params: Params, mu: float, r: float | np.ndarray) -> np.ndarray:
    if mu <= 0:
        raise NonPositiveScale(f"mu must be positive, got {mu}")
    r = np.asarray(r, dtype=float)
    return (2.0 * mu / (1.0 + (mu * r) ** 2)) ** params.gamma


def spherical_laplacian(params: Params, mu: float, r: float | np.ndarray) -> np.ndarray:
    """Closed-form Δu_μ; strictly negative, so u_μ is superharmonic."""
    r = np.asarray(r, dtype=float)
    g = params.gamma
    s = (mu * r) ** 2
    return -(2.0 ** (g + 1)) * g * mu ** (g + 2) * (1.0 + s) ** (-g - 2) * (2.0 * s + params.n)


# ---- constant orbit and vector equilibrium -------------------------------------


def constant_solution(
    params: Params, lam: Sequence[float] | np.ndarray | None = None
) -> DelaunaySolution:
    return DelaunaySolution(
        a=params.a0,
        b=0.0,
        period=None,
        lam=unit_vector(lam, params.p),
    )


def printed_equilibrium(params: Params) -> float:
    """The closed form p^{-1}K₀^{(n-4)/8}, kept only for comparison."""
    return params.bound_constant / params.p


def equilibrium_component(params: Params) -> float:
    """Per-component value ℓ of the constant fixed point (ℓ, ..., ℓ).

    Root of c(n)(√p ℓ)^{2**-2} = K₀, found numerically.
    """
    root_p = math.sqrt(params.p)

    def excess(ell: float) -> float:
        return params.c * (root_p * ell) ** params.nonlinear_exp - params.K0

    hi = 1.0
    while excess(hi) <= 0.0:
        hi *= 2.0
    ell = float(brentq(excess, 0.0, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps))
    printed = printed_equilibrium(params)
    level = logging.INFO if math.isclose(ell, printed, rel_tol=1e-12) else logging.WARNING
    logger.log(
        level,
        "equilibrium component n=%d p=%d: computed %.15g, printed closed form %.15g",
        params.n,
        params.p,
        ell,
        printed,
    )
    return ell


def check_necksize(params: Params, a: float) -> None:
    if not 0.0 < a <= params.a0:
        raise NecksizeOutOfRange(f"necksize must lie in (0, a0={params.a0:.12g}], got {a}")
