"""Scenario files and trajectory logs on disk.

Scenarios are JSON objects with flat dotted keys (``"plant.mass_kg": 0.027``);
see ``docs/scenario.md`` for the schema. Logs are CSV files with one row per
``(t, agent)`` plus a JSON metadata sidecar next to them.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from .agent import AgentConfig, FleetCommand
from .control import LennardJonesConfig, SpringDamperConfig
from .errors import DomainError
from .sim import DisturbanceConfig, PayloadSpec, PlantConfig, Scenario, TrajectoryLog
from .swarmnet import HubConfig

LOG_HEADER = ("t", "agent", "x", "y", "vx", "vy", "cmd_vx", "cmd_vy")
SCHEMA = "swarmcarry.scenario/1"

_SECTIONS = {
    "fleet": (FleetCommand, ("cruise_speed", "attractor_weight")),
    "hub": (HubConfig, ("comm_range_m", "delivery_delay_steps", "position_noise_std_m")),
    "plant": (PlantConfig, ("mass_kg", "velocity_tracking_tc", "position_hold_tc", "v_max")),
    "disturbance": (DisturbanceConfig, ("kind", "sigma_force_N", "correlation_time_s", "seed")),
    "agent": (AgentConfig, ("command_mode", "formation_gain", "v_max", "capture_radius", "attractor_gain", "f_cmd_max")),
    "payload": (PayloadSpec, ("mass_kg", "cable_length_m", "gravity")),
}
_CONTROLLER_FIELDS = {
    "spring_damper": (SpringDamperConfig, ("k", "l0", "B", "tau", "f_max", "d_min_ratio")),
    "lennard_jones": (LennardJonesConfig, ("epsilon", "sigma", "f_max", "d_min_ratio")),
}
_TOP = ("dt", "duration", "seed", "taut_fraction", "hold_s", "name")


def scenario_to_flat(sc: Scenario) -> dict:
    flat = {"schema": SCHEMA, "agents.positions": [list(p) for p in sc.positions]}
    if sc.agent_ids is not None:
        flat["agents.ids"] = list(sc.agent_ids)
    if sc.carriers is not None:
        flat["agents.carriers"] = list(sc.carriers)
    if sc.initial_velocities is not None:
        flat["agents.velocities"] = [list(v) for v in sc.initial_velocities]
    for key in _TOP:
        flat[key] = getattr(sc, key)
    flat["fleet.goal"] = list(sc.fleet.goal)
    for section, (_, fields) in _SECTIONS.items():
        obj = getattr(sc, section)
        if obj is None:
            continue
        for name in fields:
            flat[f"{section}.{name}"] = getattr(obj, name)
    flat["payload.enabled"] = sc.payload is not None
    if sc.controller is None:
        flat["controller.kind"] = "none"
    else:
        kind = sc.controller.kind
        flat["controller.kind"] = kind
        for name in _CONTROLLER_FIELDS[kind][1]:
            flat[f"controller.{name}"] = getattr(sc.controller, name)
    return flat


def scenario_from_flat(flat: dict) -> Scenario:
    """Build a :class:`Scenario` from a flat mapping; unknown keys are an error."""
    flat = dict(flat)
    flat.pop("schema", None)
    consumed = set()

    def take(key, default=None):
        consumed.add(key)
        return flat.get(key, default)

    def section(name, cls, fields, extra=None):
        kwargs = dict(extra or {})
        for f in fields:
            key = f"{name}.{f}"
            if key in flat:
                kwargs[f] = take(key)
        return cls(**kwargs)

    positions = take("agents.positions")
    if not positions:
        raise DomainError("scenario needs 'agents.positions'")
    ids = take("agents.ids")
    carriers = take("agents.carriers")
    velocities = take("agents.velocities")
    goal = take("fleet.goal")
    if goal is None:
        raise DomainError("scenario needs 'fleet.goal'")

    kind = take("controller.kind", "none")
    if kind == "none":
        controller = None
    elif kind in _CONTROLLER_FIELDS:
        cls, fields = _CONTROLLER_FIELDS[kind]
        controller = section("controller", cls, fields)
    else:
        raise DomainError(f"unknown controller.kind {kind!r}")

    parts = {}
    for name, (cls, fields) in _SECTIONS.items():
        if name == "fleet":
            parts[name] = section(name, cls, fields, {"goal": tuple(goal)})
        else:
            parts[name] = section(name, cls, fields)
    if not take("payload.enabled", any(k.startswith("payload.") for k in flat)):
        parts["payload"] = None

    top = {k: take(k) for k in _TOP if k in flat}
    unknown = sorted(set(flat) - consumed)
    if unknown:
        raise DomainError(f"unknown scenario keys: {unknown}")
    return Scenario(
        positions=tuple(tuple(p) for p in positions),
        controller=controller,
        agent_ids=None if ids is None else tuple(ids),
        carriers=None if carriers is None else tuple(carriers),
        initial_velocities=None if velocities is None else tuple(tuple(v) for v in velocities),
        **parts,
        **top,
    )


def save_scenario(sc: Scenario, path) -> None:
    Path(path).write_text(json.dumps(scenario_to_flat(sc), indent=2) + "\n")


def load_scenario(path) -> Scenario:
    try:
        flat = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise DomainError(f"{path}: not valid JSON ({exc})") from exc
    if not isinstance(flat, dict):
        raise DomainError(f"{path}: expected a JSON object")
    return scenario_from_flat(flat)


def metadata_path(csv_path) -> Path:
    p = Path(csv_path)
    return p.with_name(p.stem + ".meta.json")


def write_log(log: TrajectoryLog, path, scenario: Scenario | None = None) -> Path:
    """Write ``log`` as CSV plus a ``.meta.json`` sidecar; returns the CSV path."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(LOG_HEADER)
        for k, t in enumerate(log.t):
            for j, agent in enumerate(log.ids):
                x, y = log.position[k, j]
                vx, vy = log.velocity[k, j]
                cx, cy = log.command[k, j]
                w.writerow((repr(float(t)), int(agent), repr(float(x)), repr(float(y)),
                            repr(float(vx)), repr(float(vy)), repr(float(cx)), repr(float(cy))))
    meta = dict(log.metadata)
    if scenario is not None:
        meta["scenario"] = scenario_to_flat(scenario)
    metadata_path(path).write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    return path


def read_log(path) -> TrajectoryLog:
    """Read a CSV log (and its sidecar, when present)."""
    path = Path(path)
    try:
        with path.open(newline="") as fh:
            reader = csv.reader(fh)
            header = tuple(next(reader))
            if header != LOG_HEADER:
                raise DomainError(f"{path}: unexpected header {header}")
            rows = np.array([[float(v) for v in row] for row in reader if row], dtype=float)
    except (OSError, StopIteration, ValueError) as exc:
        if isinstance(exc, DomainError):
            raise
        raise DomainError(f"{path}: unreadable log ({exc})") from exc
    if rows.size == 0:
        raise DomainError(f"{path}: log has no rows")
    ids = np.unique(rows[:, 1]).astype(int)
    t = np.unique(rows[:, 0])
    if rows.shape[0] != t.size * ids.size:
        raise DomainError(f"{path}: rows do not form a complete (t, agent) grid")
    order = np.lexsort((rows[:, 1], rows[:, 0]))
    grid = rows[order].reshape(t.size, ids.size, 8)
    if t.size > 1:
        steps = np.diff(t)
        if not np.allclose(steps, steps[0], rtol=1e-6, atol=1e-12) or steps[0] <= 0:
            raise DomainError(f"{path}: timestamps are not uniformly spaced")
    meta = {}
    mp = metadata_path(path)
    if mp.exists():
        meta = json.loads(mp.read_text())
    return TrajectoryLog(
        t=t, ids=ids, position=grid[:, :, 2:4].copy(), velocity=grid[:, :, 4:6].copy(),
        command=grid[:, :, 6:8].copy(), metadata=meta,
    )


def finite_or_none(x):
    return None if x is None or (isinstance(x, float) and math.isnan(x)) else x
