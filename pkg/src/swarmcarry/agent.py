"""Per-agent decision loop.

An agent sees only its own state and the observations the hub delivered to
it this round. From those it blends a goal attraction with the formation
force and emits either a velocity command (default) or a force command.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .control import ControllerConfig, SpringDamperConfig, pair_force
from .errors import DomainError
from .estimation import EmaDerivativeFilter
from .swarmnet import NeighborObservation

VELOCITY = "velocity"
FORCE = "force"


@dataclass
class AgentState:
    id: int
    position: np.ndarray
    velocity: np.ndarray = field(default_factory=lambda: np.zeros(2))
    altitude_setpoint: float = 0.8
    clock: float = 0.0
    filters: dict[int, EmaDerivativeFilter] = field(default_factory=dict)

    def __post_init__(self):
        self.position = np.asarray(self.position, dtype=float).copy()
        self.velocity = np.asarray(self.velocity, dtype=float).copy()


@dataclass(frozen=True)
class FleetCommand:
    goal: tuple[float, float]
    cruise_speed: float = 0.2
    attractor_weight: float = 1.0

    def __post_init__(self):
        if not self.cruise_speed > 0:
            raise DomainError(f"cruise_speed must be positive, got {self.cruise_speed}")
        if self.attractor_weight < 0:
            raise DomainError(f"attractor_weight must be non-negative, got {self.attractor_weight}")


@dataclass(frozen=True)
class AgentConfig:
    """Tuning of the command blend.

    ``formation_gain`` converts formation force (N) to speed (m/s); when
    ``None`` it is set so that a spacing error of 10 % produces 0.1 m/s.
    In force mode the attraction is realised as ``attractor_gain * (v_goal - v)``.
    """

    command_mode: str = VELOCITY
    formation_gain: float | None = None
    v_max: float = 0.5
    capture_radius: float = 0.05
    attractor_gain: float = 0.27
    f_cmd_max: float = 0.2

    def __post_init__(self):
        if self.command_mode not in (VELOCITY, FORCE):
            raise DomainError(f"unknown command_mode {self.command_mode!r}")


def default_formation_gain(controller: ControllerConfig) -> float:
    # 0.1 m/s for a 0.1 * spacing error: 0.1 / (stiffness * 0.1 * spacing)
    return 1.0 / (controller.stiffness * controller.spacing)


def attraction(position, fleet: FleetCommand, capture_radius: float = 0.05) -> np.ndarray:
    """Cruise-speed velocity toward the goal, tapering linearly inside the capture radius."""
    delta = np.asarray(fleet.goal, dtype=float) - np.asarray(position, dtype=float)
    dist = math.hypot(delta[0], delta[1])
    if dist == 0.0:
        return np.zeros(2)
    speed = fleet.cruise_speed * min(1.0, dist / capture_radius) if capture_radius > 0 else fleet.cruise_speed
    return delta / dist * speed


def formation_force(
    state: AgentState,
    observations: Iterable[NeighborObservation],
    controller: ControllerConfig | None,
    now: float,
) -> np.ndarray:
    """Sum of pairwise formation forces from the observed neighbors.

    A positive (repulsive) scalar pushes the agent away from that neighbor.
    Spring-damper rates come from one distance filter per neighbor, created on
    first contact and updated here.
    """
    total = np.zeros(2)
    if controller is None:
        return total
    for obs in observations:
        rel = np.asarray(obs.relative_position[:2], dtype=float)
        d = math.hypot(rel[0], rel[1])
        if d == 0.0:
            continue
        d_dot = 0.0
        if isinstance(controller, SpringDamperConfig):
            filt = state.filters.get(obs.sender)
            if filt is None:
                filt = state.filters[obs.sender] = EmaDerivativeFilter(controller.tau)
            if not filt.initialized or now > filt.last_time:
                _, d_dot = filt.update(now, d)
        f = pair_force(controller, d, d_dot)
        total -= f * rel / d
    return total


def _limit(vec: np.ndarray, cap: float) -> np.ndarray:
    norm = math.hypot(vec[0], vec[1])
    if norm > cap:
        return vec * (cap / norm)
    return vec


def step_agent(
    state: AgentState,
    observations: Iterable[NeighborObservation],
    fleet: FleetCommand,
    controller: ControllerConfig | None,
    dt: float,
    config: AgentConfig = AgentConfig(),
) -> np.ndarray:
    """Advance the agent clock by ``dt`` and return its command.

    Velocity mode returns a speed-limited velocity; force mode returns a force.
    Missing neighbors just contribute nothing.
    """
    if not dt > 0:
        raise DomainError(f"dt must be positive, got {dt}")
    state.clock += dt
    f_form = formation_force(state, observations, controller, state.clock)
    pull = attraction(state.position, fleet, config.capture_radius)
    if config.command_mode == VELOCITY:
        gain = 0.0
        if controller is not None:
            gain = config.formation_gain if config.formation_gain is not None else default_formation_gain(controller)
        cmd = fleet.attractor_weight * pull + gain * f_form
        return _limit(cmd, config.v_max)
    cmd = fleet.attractor_weight * config.attractor_gain * (pull - state.velocity) + f_form
    return _limit(cmd, config.f_cmd_max)
