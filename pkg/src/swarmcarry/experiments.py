"""Default scenarios and the eleven-run comparison suite.

The suite mirrors a flight campaign of three carriers: one run without
payload or formation control, then five spring-damper runs and five
Lennard-Jones runs carrying a payload, each with its own disturbance seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .agent import FORCE, AgentConfig, FleetCommand
from .catenary import horizontal_tension, payload_stiffness
from .control import (
    CRAZYFLIE_MASS_KG,
    LennardJonesConfig,
    SpringDamperConfig,
    bearings_to_neighbors,
    formation_spacing_compensation,
    tune_gains,
)
from .sim import DisturbanceConfig, PayloadSpec, Scenario, regular_polygon

SPACING_M = 0.6
GOAL = (8.0, 0.0)
DURATION_S = 10.0
WINDOW_S = (2.5, 9.5)

NO_PAYLOAD = "no_payload"
SPRING_DAMPER = "spring_damper"
LENNARD_JONES = "lennard_jones"


@dataclass(frozen=True)
class TunedGains:
    k_p: float
    k: float
    B: float
    bearings: tuple[float, ...]
    x0: float


def equilateral_tuning(
    payload: PayloadSpec = PayloadSpec(),
    spacing: float = SPACING_M,
    m_robot: float = CRAZYFLIE_MASS_KG,
    damping_ratio: float = 1.0,
    n: int = 3,
) -> TunedGains:
    """Tune spring-damper gains for a regular ``n``-gon carrying ``payload``."""
    pts = regular_polygon(n, spacing)
    model = payload.model(n)
    x0 = math.dist(pts[0], pts.mean(axis=0))
    k_p = payload_stiffness(model, x0)
    bearings = tuple(bearings_to_neighbors(pts, 0))
    k, B = tune_gains(m_robot, k_p, bearings, damping_ratio)
    return TunedGains(k_p=k_p, k=k, B=B, bearings=bearings, x0=x0)


def default_scenario(kind: str = SPRING_DAMPER, seed: int = 0, payload: PayloadSpec | None = PayloadSpec()) -> Scenario:
    """Three carriers cruising east in an equilateral formation."""
    pts = regular_polygon(3, SPACING_M, rotation=math.pi)
    positions = tuple(map(tuple, pts))
    fleet = FleetCommand(goal=GOAL, cruise_speed=0.2, attractor_weight=1.0)
    if kind == NO_PAYLOAD:
        return Scenario(
            positions=positions, controller=None, fleet=fleet, payload=None,
            duration=DURATION_S, seed=seed, name=f"{kind}-{seed}",
        )
    spec = payload if payload is not None else PayloadSpec()
    gains = equilateral_tuning(spec)
    if kind == SPRING_DAMPER:
        controller = SpringDamperConfig(k=gains.k, l0=SPACING_M, B=gains.B)
    elif kind == LENNARD_JONES:
        controller = LennardJonesConfig(epsilon=gains.k, sigma=SPACING_M)
    else:
        raise ValueError(f"unknown scenario kind {kind!r}")
    return Scenario(
        positions=positions, controller=controller, fleet=fleet, payload=payload,
        duration=DURATION_S, seed=seed, name=f"{kind}-{seed}",
    )


def default_suite(base_seed: int = 0, repetitions: int = 5) -> list[tuple[str, Scenario]]:
    """``(group, scenario)`` pairs: one baseline, then spring-damper and Lennard-Jones runs."""
    runs = [(NO_PAYLOAD, default_scenario(NO_PAYLOAD, base_seed))]
    for kind in (SPRING_DAMPER, LENNARD_JONES):
        for r in range(repetitions):
            seed = base_seed + 1 + r + (0 if kind == SPRING_DAMPER else repetitions)
            runs.append((kind, default_scenario(kind, seed)))
    return runs


def step_response_scenario(compression: float = 0.05, duration: float = 6.0, payload: PayloadSpec = PayloadSpec()) -> tuple[Scenario, TunedGains]:
    """Force-mode spring-damper formation released from a uniform compression.

    The rest length is pretensioned so the payload pull is balanced at the
    nominal spacing, which is where the gains are tuned.
    """
    gains = equilateral_tuning(payload)
    base = SpringDamperConfig(k=gains.k, l0=SPACING_M, B=gains.B)
    model = payload.model(3)
    controller = formation_spacing_compensation(base, horizontal_tension(model, gains.x0), gains.bearings, SPACING_M)
    pts = regular_polygon(3, SPACING_M * (1.0 - compression))
    sc = Scenario(
        positions=tuple(map(tuple, pts)),
        controller=controller,
        fleet=FleetCommand(goal=(0.0, 0.0), cruise_speed=0.2, attractor_weight=0.0),
        payload=payload,
        disturbance=DisturbanceConfig(kind="none"),
        agent=AgentConfig(command_mode=FORCE),
        duration=duration,
        hold_s=1.0,
        name="step-response",
    )
    return sc, gains


def with_outsider(scenario: Scenario, position=(-40.0, 30.0)) -> Scenario:
    """Copy of ``scenario`` plus one extra agent far outside radio range."""
    ids = scenario.ids
    new_id = max(ids) + 1
    vel = scenario.initial_velocities
    return replace(
        scenario,
        positions=scenario.positions + (tuple(position),),
        agent_ids=ids + (new_id,),
        carriers=scenario.carrier_ids,
        initial_velocities=None if vel is None else vel + ((0.0, 0.0),),
    )
