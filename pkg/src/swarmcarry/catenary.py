"""Catenary model of a flexible payload shared by several carriers.

Each carrier holds one half-catenary of length ``L`` whose vertex sits directly
below the swarm centroid. For a carrier at horizontal distance ``x0`` from the
centroid the catenary parameter ``a`` satisfies ``a * sinh(x0 / a) = L``; the
tensions on the carrier follow from ``a``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError, TautCableError

GRAVITY = 9.81

# sinh overflows a double just above 710
_SINH_ARG_MAX = 700.0


@dataclass(frozen=True)
class PayloadModel:
    """Shared payload parameters.

    Attributes:
        mass_kg: Total payload mass.
        cable_length_m: Curve length from one carrier to the connecting point.
        agent_count: Number of carriers sharing the load.
        gravity: Gravitational acceleration.
    """

    mass_kg: float
    cable_length_m: float
    agent_count: int
    gravity: float = GRAVITY

    def __post_init__(self):
        if not self.mass_kg > 0:
            raise DomainError(f"mass_kg must be positive, got {self.mass_kg}")
        if not self.cable_length_m > 0:
            raise DomainError(f"cable_length_m must be positive, got {self.cable_length_m}")
        if int(self.agent_count) != self.agent_count or self.agent_count < 1:
            raise DomainError(f"agent_count must be a positive integer, got {self.agent_count}")
        if not self.gravity > 0:
            raise DomainError(f"gravity must be positive, got {self.gravity}")

    @property
    def tension_scale(self) -> float:
        """``m g / (n L)``, the factor turning ``a`` into horizontal tension."""
        return self.mass_kg * self.gravity / (self.agent_count * self.cable_length_m)


@dataclass(frozen=True)
class CatenarySolution:
    a: float
    x0: float
    residual: float


def vertical_tension(p: PayloadModel) -> float:
    """Vertical load carried by each carrier, ``m g / n``."""
    return p.mass_kg * p.gravity / p.agent_count


def _check_span(p: PayloadModel, x0: float) -> None:
    if not x0 > 0:
        raise DomainError(f"horizontal distance must be positive, got {x0}")
    if x0 >= p.cable_length_m:
        raise TautCableError(
            f"horizontal distance {x0} m is not shorter than cable length {p.cable_length_m} m"
        )


def _curve_length(a: float, x0: float) -> float:
    u = x0 / a
    if u > _SINH_ARG_MAX:
        return math.inf
    return a * math.sinh(u)


def solve_catenary(p: PayloadModel, x0: float, rtol: float = 1e-9, max_iter: int = 400) -> CatenarySolution:
    """Find the catenary parameter for a carrier at distance ``x0``.

    ``a * sinh(x0 / a)`` falls monotonically from infinity (``a -> 0``) to
    ``x0`` (``a -> inf``), so a bracket always exists when ``x0 < L``. The
    bracket is grown geometrically from ``a = x0`` and then bisected until the
    length residual drops below ``rtol * L``.

    Raises:
        DomainError: ``x0 <= 0``.
        TautCableError: ``x0 >= L``.
    """
    _check_span(p, x0)
    length = p.cable_length_m
    tol = rtol * length

    lo = hi = x0
    # f(a) = curve_length(a) - L is decreasing in a
    while _curve_length(lo, x0) < length:
        lo *= 0.5
    while _curve_length(hi, x0) > length:
        hi *= 2.0

    a = 0.5 * (lo + hi)
    residual = abs(_curve_length(a, x0) - length)
    for _ in range(max_iter):
        if residual <= tol:
            break
        if _curve_length(a, x0) > length:
            lo = a
        else:
            hi = a
        mid = 0.5 * (lo + hi)
        if mid == a:
            break
        a = mid
        residual = abs(_curve_length(a, x0) - length)

    # Newton polish inside the bracket so T_x(x0) is smooth enough to differentiate numerically
    for _ in range(3):
        u = x0 / a
        slope = math.sinh(u) - u * math.cosh(u)
        if slope == 0.0:
            break
        cand = a - (_curve_length(a, x0) - length) / slope
        if not lo <= cand <= hi:
            break
        cand_res = abs(_curve_length(cand, x0) - length)
        if cand_res >= residual:
            break
        a, residual = cand, cand_res
    return CatenarySolution(a=a, x0=x0, residual=residual)


def horizontal_tension(p: PayloadModel, x0: float) -> float:
    """Horizontal pull toward the connecting point, ``(m g / (n L)) * a``."""
    return p.tension_scale * solve_catenary(p, x0).a


def parameter_slope(a: float, x0: float) -> float:
    """``da/dx0`` along the constraint ``a sinh(x0/a) = L`` (implicit differentiation)."""
    u = x0 / a
    c = math.cosh(u)
    if u < 0.1:
        # u cosh u - sinh u cancels badly for small u; use its series
        u2 = u * u
        denom = u * u2 * (1.0 / 3.0 + u2 * (1.0 / 30.0 + u2 * (1.0 / 840.0 + u2 / 45360.0)))
    else:
        denom = u * c - math.sinh(u)
    return c / denom


def payload_stiffness(p: PayloadModel, x0_eq: float) -> float:
    """Linearized payload spring constant ``dT_x/dx0`` at ``x0_eq`` (N/m)."""
    sol = solve_catenary(p, x0_eq)
    return p.tension_scale * parameter_slope(sol.a, x0_eq)
