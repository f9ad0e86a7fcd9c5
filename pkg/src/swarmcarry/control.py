"""Pairwise formation force laws and gain synthesis.

Both laws return a signed scalar along the line joining two agents, positive
meaning repulsive. The agent layer turns the scalar into a vector.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import ClassVar, Sequence, Union

import numpy as np

from .errors import DomainError

CRAZYFLIE_MASS_KG = 0.027


@dataclass(frozen=True)
class SpringDamperConfig:
    """Virtual spring of stiffness ``k`` and rest length ``l0`` with damper ``B``.

    ``tau`` is the time constant of the per-neighbor distance-rate filter.
    ``f_max`` and ``d_min_ratio`` set the saturation policy used by
    :func:`pair_force`.
    """

    kind: ClassVar[str] = "spring_damper"

    k: float
    l0: float
    B: float = 0.0
    tau: float = 0.2
    f_max: float = 0.1
    d_min_ratio: float = 0.2

    def __post_init__(self):
        if not self.k > 0:
            raise DomainError(f"k must be positive, got {self.k}")
        if not self.l0 > 0:
            raise DomainError(f"l0 must be positive, got {self.l0}")
        if not self.B >= 0:
            raise DomainError(f"B must be non-negative, got {self.B}")
        if not self.tau > 0:
            raise DomainError(f"tau must be positive, got {self.tau}")

    @property
    def spacing(self):
        return self.l0

    @property
    def stiffness(self):
        return self.k


@dataclass(frozen=True)
class LennardJonesConfig:
    """Lennard-Jones style potential with strength ``epsilon`` and minimum at ``sigma``."""

    kind: ClassVar[str] = "lennard_jones"

    epsilon: float
    sigma: float
    f_max: float = 0.1
    d_min_ratio: float = 0.2

    def __post_init__(self):
        if not self.epsilon > 0:
            raise DomainError(f"epsilon must be positive, got {self.epsilon}")
        if not self.sigma > 0:
            raise DomainError(f"sigma must be positive, got {self.sigma}")

    @property
    def spacing(self):
        return self.sigma

    @property
    def stiffness(self):
        return self.epsilon


ControllerConfig = Union[SpringDamperConfig, LennardJonesConfig]


@dataclass(frozen=True)
class AxisGains:
    k_x: float
    k_y: float
    B_x: float
    B_y: float
    degenerate: bool = False


def _check_distance(d):
    if not d > 0:
        raise DomainError(f"inter-agent distance must be positive, got {d}")


def spring_damper_force(cfg: SpringDamperConfig, d: float, d_dot: float = 0.0) -> float:
    _check_distance(d)
    return -cfg.k * (d - cfg.l0) - cfg.B * d_dot


def lennard_jones_potential(cfg: LennardJonesConfig, d: float) -> float:
    _check_distance(d)
    r2 = (cfg.sigma / d) ** 2
    return cfg.epsilon * cfg.sigma**2 / 8.0 * (r2 * r2 - 2.0 * r2)


def lennard_jones_force(cfg: LennardJonesConfig, d: float) -> float:
    """Negative distance-gradient of :func:`lennard_jones_potential` (unsaturated)."""
    _check_distance(d)
    r = cfg.sigma / d
    r3 = r * r * r
    return cfg.epsilon * cfg.sigma / 2.0 * (r3 * r * r - r3)


def lennard_jones_force_curvature(cfg: LennardJonesConfig, d: float) -> float:
    """Second distance-derivative of :func:`lennard_jones_force`."""
    x = d / cfg.sigma
    return cfg.epsilon / (2.0 * cfg.sigma) * (30.0 * x**-7 - 12.0 * x**-5)


def taylor_remainder_constant(cfg: LennardJonesConfig, band: float = 0.2, samples: int = 2001) -> float:
    """Bound ``C`` with ``|F_LJ(d) + eps (d - sigma)| <= C (d - sigma)^2`` for ``|d - sigma| <= band*sigma``.

    Lagrange form of the remainder: ``C = max |F''| / 2`` over the band.
    """
    d = np.linspace((1.0 - band) * cfg.sigma, (1.0 + band) * cfg.sigma, samples)
    x = d / cfg.sigma
    curv = cfg.epsilon / (2.0 * cfg.sigma) * (30.0 * x**-7 - 12.0 * x**-5)
    return float(np.max(np.abs(curv))) / 2.0


def pair_force(cfg: ControllerConfig, d: float, d_dot: float = 0.0) -> float:
    """Saturated scalar force used inside the control loop.

    Distances below ``d_min_ratio * spacing`` are treated as that floor, and the
    result is clipped to ``[-f_max, f_max]``. This keeps the divergent
    short-range repulsion integrable.
    """
    d = max(d, cfg.d_min_ratio * cfg.spacing)
    if isinstance(cfg, SpringDamperConfig):
        f = spring_damper_force(cfg, d, d_dot)
    else:
        f = lennard_jones_force(cfg, d)
    return min(max(f, -cfg.f_max), cfg.f_max)


def axis_gains(k: float, B: float, k_p: float, neighbor_bearings: Sequence[float]) -> AxisGains:
    """Reduce the springs and dampers around one agent to one pair per axis.

    Bearings are measured at the agent, from the direction of the swarm
    centroid (local x-axis) to each neighbor.
    """
    theta = np.asarray(neighbor_bearings, dtype=float)
    if theta.size == 0:
        warnings.warn("no neighbors: only the payload spring acts", RuntimeWarning, stacklevel=2)
        return AxisGains(k_x=k_p, k_y=0.0, B_x=0.0, B_y=0.0, degenerate=True)
    cos2 = float(np.sum(np.cos(theta) ** 2))
    sin2 = float(np.sum(np.sin(theta) ** 2))
    return AxisGains(k_x=k_p + k * cos2, k_y=k * sin2, B_x=B * cos2, B_y=B * sin2)


def damping_ratios(m_robot: float, gains: AxisGains) -> tuple[float, float]:
    """``B / (2 sqrt(m k))`` per axis; ``nan`` for an axis without stiffness."""

    def ratio(stiff, damp):
        if stiff <= 0:
            return math.nan
        return damp / (2.0 * math.sqrt(m_robot * stiff))

    return ratio(gains.k_x, gains.B_x), ratio(gains.k_y, gains.B_y)


def tune_gains(
    m_robot: float,
    k_p: float,
    neighbor_bearings: Sequence[float],
    damping_ratio: float = 1.0,
    k: float | None = None,
) -> tuple[float, float]:
    """Choose spring and damper constants so both axes are near the target damping ratio.

    With ``k`` omitted, the stiffness that makes both axes hit
    ``damping_ratio`` exactly is used; it exists when the payload is stiff
    (``k_p > 0``) and the neighbors lie closer to the centroid direction than
    across it. With ``k`` given, ``B`` minimizes the worse of the two axis
    deviations, which is exact when only one axis has stiffness.

    Returns:
        ``(k, B)``.

    Raises:
        DomainError: bad inputs, or ``k`` omitted when no exact stiffness exists.
    """
    if not m_robot > 0:
        raise DomainError(f"m_robot must be positive, got {m_robot}")
    if not 0 < damping_ratio <= 2:
        raise DomainError(f"damping_ratio must lie in (0, 2], got {damping_ratio}")
    if k_p < 0:
        raise DomainError(f"k_p must be non-negative, got {k_p}")
    theta = np.asarray(neighbor_bearings, dtype=float)
    if theta.size == 0:
        raise DomainError("cannot tune formation gains without neighbors")
    cos2 = float(np.sum(np.cos(theta) ** 2))
    sin2 = float(np.sum(np.sin(theta) ** 2))
    collinear = sin2 <= 1e-12 * theta.size

    if k is None:
        if collinear or k_p <= 0 or cos2 <= sin2:
            raise DomainError(
                "no stiffness makes both axes hit the target ratio for this geometry; pass k explicitly"
            )
        # equal ratios on both axes: k cos2^2 / sin2 = k_p + k cos2
        k = k_p * sin2 / (cos2 * (cos2 - sin2))
    elif not k > 0:
        raise DomainError(f"k must be positive, got {k}")

    # each axis ratio is linear in B: zeta_axis = B * r_axis
    r_x = cos2 / (2.0 * math.sqrt(m_robot * (k_p + k * cos2))) if cos2 > 0 else 0.0
    if collinear:
        warnings.warn("collinear formation: y-axis has no stiffness, tuning x only", RuntimeWarning, stacklevel=2)
        B = damping_ratio / r_x
    else:
        r_y = sin2 / (2.0 * math.sqrt(m_robot * k * sin2))
        if r_x == 0.0:
            B = damping_ratio / r_y
        else:
            B = 2.0 * damping_ratio / (r_x + r_y)
    return k, B


def bearings_to_neighbors(positions, index: int, neighbors: Sequence[int] | None = None, centre=None) -> list[float]:
    """Angles at agent ``index`` from the centroid direction to each neighbor.

    Args:
        positions: ``(n, 2)`` array of agent positions.
        index: Row of the agent in question.
        neighbors: Rows to include; defaults to every other agent.
        centre: Reference point; defaults to the centroid of ``positions``.
    """
    pts = np.asarray(positions, dtype=float)
    here = pts[index]
    c = pts.mean(axis=0) if centre is None else np.asarray(centre, dtype=float)
    ref = c - here
    ref_angle = math.atan2(ref[1], ref[0])
    if neighbors is None:
        neighbors = [j for j in range(len(pts)) if j != index]
    out = []
    for j in neighbors:
        v = pts[j] - here
        ang = math.atan2(v[1], v[0]) - ref_angle
        out.append(math.atan2(math.sin(ang), math.cos(ang)))
    return out


def formation_spacing_compensation(
    cfg: ControllerConfig, tension: float, bearings: Sequence[float], spacing: float
) -> ControllerConfig:
    """Shift the preferred spacing so that a constant inward pull is balanced at ``spacing``.

    In pure force mode the payload drags every carrier toward the centroid with
    ``tension``; without compensation the formation settles compressed. The
    returned config has its rest length (or ``sigma``) moved so the net radial
    force vanishes when all neighbors sit at ``spacing`` with the given
    bearings. Only meaningful for symmetric formations.
    """
    cos_sum = float(np.sum(np.cos(np.asarray(bearings, dtype=float))))
    if cos_sum <= 0:
        raise DomainError("neighbors do not push the agent away from the centroid")
    # pair force along -e_i must supply `tension` outward: f * cos_sum = tension
    f_needed = tension / cos_sum
    if isinstance(cfg, SpringDamperConfig):
        return SpringDamperConfig(
            k=cfg.k, l0=spacing + f_needed / cfg.k, B=cfg.B, tau=cfg.tau,
            f_max=cfg.f_max, d_min_ratio=cfg.d_min_ratio,
        )
    # F_LJ(spacing; sigma) is increasing in sigma near equilibrium; bisect
    lo, hi = spacing, 2.0 * spacing
    probe = LennardJonesConfig(cfg.epsilon, hi)
    while lennard_jones_force(probe, spacing) < f_needed:
        hi *= 1.5
        probe = LennardJonesConfig(cfg.epsilon, hi)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if lennard_jones_force(LennardJonesConfig(cfg.epsilon, mid), spacing) < f_needed:
            lo = mid
        else:
            hi = mid
    return LennardJonesConfig(cfg.epsilon, 0.5 * (lo + hi), f_max=cfg.f_max, d_min_ratio=cfg.d_min_ratio)
