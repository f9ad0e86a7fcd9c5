"""Deterministic lock-step world: point-mass plants, payload coupling, disturbances.

Each step runs hub exchange, then every agent's decision, then plant
integration with semi-implicit Euler. All randomness comes from generators
keyed on ``(scenario.seed, agent id)`` so that adding or removing an agent
never perturbs another agent's noise stream.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .agent import FORCE, AgentConfig, AgentState, FleetCommand, step_agent
from .catenary import PayloadModel, horizontal_tension, payload_stiffness, vertical_tension
from .control import ControllerConfig
from .errors import DomainError, SimulationDivergedError
from .swarmnet import CommHub, HubConfig

NONE = "none"
WHITE = "white"
ORNSTEIN_UHLENBECK = "ornstein_uhlenbeck"

CARRIER_GROUP = "carriers"


@dataclass(frozen=True)
class PlantConfig:
    """Closed-loop UAV model that tracks velocity commands.

    ``velocity_tracking_tc`` is the first-order lag of the velocity loop.
    With ``position_hold_tc`` set, the plant also integrates the commanded
    velocity into a reference position and pulls toward it (PI velocity
    loop), which is how the on-board controller rejects steady pulls. Set it
    to ``None`` for a pure first-order lag.
    """

    mass_kg: float = 0.027
    velocity_tracking_tc: float = 0.1
    position_hold_tc: float | None = 0.4
    v_max: float = 0.5

    def __post_init__(self):
        if not self.mass_kg > 0:
            raise DomainError("mass_kg must be positive")
        if not self.velocity_tracking_tc > 0:
            raise DomainError("velocity_tracking_tc must be positive")
        if self.position_hold_tc is not None and not self.position_hold_tc > 0:
            raise DomainError("position_hold_tc must be positive or None")


@dataclass(frozen=True)
class DisturbanceConfig:
    kind: str = ORNSTEIN_UHLENBECK
    sigma_force_N: float = 0.005
    correlation_time_s: float = 0.5
    seed: int = 0

    def __post_init__(self):
        if self.kind not in (NONE, WHITE, ORNSTEIN_UHLENBECK):
            raise DomainError(f"unknown disturbance kind {self.kind!r}")
        if self.sigma_force_N < 0:
            raise DomainError("sigma_force_N must be non-negative")
        if self.kind == ORNSTEIN_UHLENBECK and not self.correlation_time_s > 0:
            raise DomainError("correlation_time_s must be positive")


@dataclass(frozen=True)
class PayloadSpec:
    """Payload parameters without the carrier count, which the scenario supplies."""

    mass_kg: float = 0.03
    cable_length_m: float = 0.6
    gravity: float = 9.81

    def model(self, agent_count: int) -> PayloadModel:
        return PayloadModel(self.mass_kg, self.cable_length_m, agent_count, self.gravity)


@dataclass(frozen=True)
class Scenario:
    positions: tuple[tuple[float, float], ...]
    controller: ControllerConfig | None
    fleet: FleetCommand
    payload: PayloadSpec | None = None
    hub: HubConfig = field(default_factory=HubConfig)
    plant: PlantConfig = field(default_factory=PlantConfig)
    disturbance: DisturbanceConfig = field(default_factory=DisturbanceConfig)
    agent: AgentConfig = field(default_factory=AgentConfig)
    dt: float = 0.01
    duration: float = 10.0
    seed: int = 0
    agent_ids: tuple[int, ...] | None = None
    carriers: tuple[int, ...] | None = None
    initial_velocities: tuple[tuple[float, float], ...] | None = None
    taut_fraction: float = 0.98
    hold_s: float = 0.0
    name: str = "scenario"

    def __post_init__(self):
        object.__setattr__(self, "positions", tuple(tuple(map(float, p[:2])) for p in self.positions))
        if self.agent_ids is not None:
            object.__setattr__(self, "agent_ids", tuple(int(i) for i in self.agent_ids))
            if len(self.agent_ids) != len(self.positions):
                raise DomainError("agent_ids and positions differ in length")
            if len(set(self.agent_ids)) != len(self.agent_ids):
                raise DomainError("agent ids must be unique")
        if self.carriers is not None:
            object.__setattr__(self, "carriers", tuple(int(i) for i in self.carriers))
            unknown = set(self.carriers) - set(self.ids)
            if unknown:
                raise DomainError(f"carriers {sorted(unknown)} are not agents")
        if not self.dt > 0:
            raise DomainError("dt must be positive")
        if not self.duration > 0:
            raise DomainError("duration must be positive")
        if self.hold_s < 0:
            raise DomainError("hold_s must be non-negative")
        if not self.positions:
            raise DomainError("scenario needs at least one agent")
        if self.payload is not None and len(self.carrier_ids) < 2:
            raise DomainError("a payload needs at least two carriers")

    @property
    def ids(self) -> tuple[int, ...]:
        return self.agent_ids if self.agent_ids is not None else tuple(range(len(self.positions)))

    @property
    def carrier_ids(self) -> tuple[int, ...]:
        return self.carriers if self.carriers is not None else self.ids

    @property
    def n_steps(self) -> int:
        return int(round(self.duration / self.dt))


@dataclass
class TrajectoryLog:
    """Uniformly sampled record of a run.

    Arrays are indexed ``[step, agent]``; ``ids[j]`` names column ``j``.
    """

    t: np.ndarray
    ids: np.ndarray
    position: np.ndarray
    velocity: np.ndarray
    command: np.ndarray
    metadata: dict = field(default_factory=dict)

    @property
    def dt(self) -> float:
        return float(self.t[1] - self.t[0]) if len(self.t) > 1 else 0.0

    def column(self, agent: int) -> int:
        hits = np.flatnonzero(self.ids == agent)
        if hits.size == 0:
            raise KeyError(f"agent {agent} not in log")
        return int(hits[0])

    def window_mask(self, window) -> np.ndarray:
        lo, hi = window
        eps = 1e-9 * max(1.0, abs(hi))
        return (self.t >= lo - eps) & (self.t <= hi + eps)


def payload_force(positions, p: PayloadModel, agent_index: int, taut_fraction: float = 0.98) -> np.ndarray:
    """Horizontal payload pull on one carrier, directed at the carriers' centroid.

    Up to ``taut_fraction * L`` the catenary tension is used. Beyond that the
    tension diverges, so it is continued linearly with the local catenary
    stiffness, acting as a stiff penalty spring.
    """
    pts = np.asarray(positions, dtype=float)[:, :2]
    if len(pts) < 2:
        raise DomainError("payload coupling needs at least two carriers")
    toward = pts.mean(axis=0) - pts[agent_index]
    x0 = math.hypot(toward[0], toward[1])
    if x0 < 1e-9 * p.cable_length_m:
        return np.zeros(2)
    x_sw = taut_fraction * p.cable_length_m
    if x0 < x_sw:
        tension = horizontal_tension(p, x0)
    else:
        tension = horizontal_tension(p, x_sw) + payload_stiffness(p, x_sw) * (x0 - x_sw)
    return toward / x0 * tension


class _Disturbance:
    def __init__(self, cfg: DisturbanceConfig, seed: int, stream: int, dt: float, sigma: float | None = None):
        self.cfg = cfg
        self.sigma = cfg.sigma_force_N if sigma is None else sigma
        self.rng = np.random.default_rng([seed, cfg.seed, stream])
        self.force = np.zeros(2)
        if cfg.kind == ORNSTEIN_UHLENBECK:
            self.decay = math.exp(-dt / cfg.correlation_time_s)
            self.kick = self.sigma * math.sqrt(1.0 - self.decay**2)
            self.force = self.rng.normal(0.0, self.sigma, 2)

    def sample(self) -> np.ndarray:
        kind = self.cfg.kind
        if kind == NONE or self.sigma == 0.0:
            return np.zeros(2)
        if kind == WHITE:
            return self.rng.normal(0.0, self.sigma, 2)
        current = self.force
        self.force = self.decay * self.force + self.kick * self.rng.normal(0.0, 1.0, 2)
        return current


def run(scenario: Scenario, check_every: int = 1) -> TrajectoryLog:
    """Simulate ``scenario`` and return its trajectory log.

    Raises:
        SimulationDivergedError: a state becomes non-finite or leaves any
            plausible range.
    """
    sc = scenario
    ids = sc.ids
    n = len(ids)
    dt = sc.dt
    steps = sc.n_steps
    plant = sc.plant
    mass = plant.mass_kg

    hub = CommHub(sc.hub, seed=sc.seed)
    carriers = sc.carrier_ids
    for i in carriers:
        hub.join_group(i, CARRIER_GROUP)
    carrier_cols = [ids.index(i) for i in carriers]
    model = sc.payload.model(len(carriers)) if sc.payload is not None else None

    x = np.array(sc.positions, dtype=float)
    v = np.zeros((n, 2)) if sc.initial_velocities is None else np.array(sc.initial_velocities, dtype=float)
    ref = x.copy()
    agents = [AgentState(id=i, position=x[j], velocity=v[j]) for j, i in enumerate(ids)]
    noise = [_Disturbance(sc.disturbance, sc.seed, i, dt) for i in ids]
    force_mode = sc.agent.command_mode == FORCE

    # agents run against the frozen initial state so their filters warm up
    for _ in range(int(round(sc.hold_s / dt))):
        inboxes = hub.exchange({i: x[j] for j, i in enumerate(ids)}, {i: (b"",) for i in ids})
        for j, agent in enumerate(agents):
            step_agent(agent, inboxes[agent.id], sc.fleet, sc.controller, dt, sc.agent)

    records = steps + 1
    t_log = np.arange(records) * dt
    pos_log = np.empty((records, n, 2))
    vel_log = np.empty((records, n, 2))
    cmd_log = np.empty((records, n, 2))
    taut_events = 0
    cmd = np.zeros((n, 2))
    ext = np.zeros((n, 2))

    for step in range(records):
        positions = {i: x[j] for j, i in enumerate(ids)}
        inboxes = hub.exchange(positions, {i: (b"",) for i in ids})
        for j, agent in enumerate(agents):
            agent.position = x[j].copy()
            agent.velocity = v[j].copy()
            cmd[j] = step_agent(agent, inboxes[agent.id], sc.fleet, sc.controller, dt, sc.agent)
        pos_log[step] = x
        vel_log[step] = v
        cmd_log[step] = cmd
        if step == steps:
            break

        ext[:] = 0.0
        if model is not None:
            pts = x[carrier_cols]
            centre = pts.mean(axis=0)
            for k, col in enumerate(carrier_cols):
                if math.dist(centre, pts[k]) >= model.cable_length_m:
                    taut_events += 1
                ext[col] += payload_force(pts, model, k, sc.taut_fraction)
        for j in range(n):
            ext[j] += noise[j].sample()

        if force_mode:
            acc = (cmd + ext) / mass
        else:
            v_cmd = cmd.copy()
            speed = np.hypot(v_cmd[:, 0], v_cmd[:, 1])
            over = speed > plant.v_max
            v_cmd[over] *= (plant.v_max / speed[over])[:, None]
            acc = (v_cmd - v) / plant.velocity_tracking_tc + ext / mass
            if plant.position_hold_tc is not None:
                acc += (ref - x) / (plant.velocity_tracking_tc * plant.position_hold_tc)
            ref = ref + v_cmd * dt
        v = v + acc * dt
        x = x + v * dt

        if step % check_every == 0 and not (np.all(np.isfinite(x)) and np.all(np.isfinite(v))):
            bad = int(np.flatnonzero(~(np.isfinite(x).all(axis=1) & np.isfinite(v).all(axis=1)))[0])
            raise SimulationDivergedError(step, ids[bad], f"|a|={np.linalg.norm(acc[bad]):.3g} m/s^2")
        runaway = np.hypot(v[:, 0], v[:, 1]) > 100.0
        if runaway.any():
            bad = int(np.flatnonzero(runaway)[0])
            raise SimulationDivergedError(step, ids[bad], f"|v|={np.linalg.norm(v[bad]):.3g} m/s")

    meta = {
        "name": sc.name,
        "seed": sc.seed,
        "dt": dt,
        "duration": sc.duration,
        "agents": list(ids),
        "carriers": list(carriers),
        "taut_events": taut_events,
        "vertical_tension_N": vertical_tension(model) if model is not None else 0.0,
    }
    return TrajectoryLog(t=t_log, ids=np.array(ids), position=pos_log, velocity=vel_log, command=cmd_log, metadata=meta)


def regular_polygon(n: int, side: float, centre: Sequence[float] = (0.0, 0.0), rotation: float = 0.0) -> np.ndarray:
    """Vertices of a regular ``n``-gon with the given side length."""
    radius = side / (2.0 * math.sin(math.pi / n))
    angles = rotation + 2.0 * math.pi * np.arange(n) / n
    c = np.asarray(centre, dtype=float)
    return np.column_stack([c[0] + radius * np.cos(angles), c[1] + radius * np.sin(angles)])


def kinetic_energy(log: TrajectoryLog, mass: float) -> np.ndarray:
    return 0.5 * mass * np.sum(log.velocity**2, axis=(1, 2))
