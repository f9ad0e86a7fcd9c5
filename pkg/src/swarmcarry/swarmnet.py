"""Range-limited situated communication between agents.

The hub is the only place that sees every agent's position. It turns each
round of outgoing messages into per-agent inboxes, stamping every delivered
message with the sender's position relative to the receiver, and drops
anything sent from beyond the radio range.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .errors import DomainError


@dataclass(frozen=True)
class NeighborObservation:
    sender: int
    relative_position: np.ndarray
    messages: tuple[bytes, ...] = ()

    @property
    def distance(self) -> float:
        return float(np.hypot(*self.relative_position[:2]))


@dataclass(frozen=True)
class HubConfig:
    comm_range_m: float = 1.0
    delivery_delay_steps: int = 0
    position_noise_std_m: float = 0.0

    def __post_init__(self):
        if not self.comm_range_m > 0:
            raise DomainError(f"comm_range_m must be positive, got {self.comm_range_m}")
        if self.delivery_delay_steps < 0 or int(self.delivery_delay_steps) != self.delivery_delay_steps:
            raise DomainError("delivery_delay_steps must be a non-negative integer")
        if self.position_noise_std_m < 0:
            raise DomainError("position_noise_std_m must be non-negative")


def step_exchange(
    world_positions: Mapping[int, Sequence[float]],
    outboxes: Mapping[int, Sequence[bytes]],
    cfg: HubConfig,
    rng_seed: int = 0,
) -> dict[int, list[NeighborObservation]]:
    """Deliver one synchronous round of messages.

    Every agent receives one observation per in-range sender, ordered by
    sender id. Noise on the relative position is drawn from a generator keyed
    on ``(rng_seed, receiver, sender)`` so a pair's noise does not depend on
    which other agents exist.
    """
    ids = sorted(world_positions)
    pos = {i: np.asarray(world_positions[i], dtype=float) for i in ids}
    r2 = cfg.comm_range_m**2
    inbox: dict[int, list[NeighborObservation]] = {i: [] for i in ids}
    for receiver in ids:
        here = pos[receiver]
        for sender in ids:
            if sender == receiver:
                continue
            rel = pos[sender] - here
            if float(np.dot(rel, rel)) > r2:
                continue
            if cfg.position_noise_std_m > 0:
                rng = np.random.default_rng([rng_seed, receiver, sender])
                rel = rel + rng.normal(0.0, cfg.position_noise_std_m, size=rel.shape)
            rel.setflags(write=False)
            inbox[receiver].append(
                NeighborObservation(sender=sender, relative_position=rel, messages=tuple(outboxes.get(sender, ())))
            )
    return inbox


@dataclass
class CommHub:
    """Stateful wrapper around :func:`step_exchange` adding delay and group labels."""

    config: HubConfig = field(default_factory=HubConfig)
    seed: int = 0
    _groups: dict[str, set[int]] = field(default_factory=dict, init=False, repr=False)
    _pending: deque = field(default_factory=deque, init=False, repr=False)
    _round: int = field(default=0, init=False, repr=False)

    def join_group(self, agent: int, label: str) -> None:
        self._groups.setdefault(label, set()).add(agent)

    def leave_group(self, agent: int, label: str) -> None:
        self._groups.get(label, set()).discard(agent)

    def group_members(self, label: str) -> frozenset[int]:
        return frozenset(self._groups.get(label, ()))

    def groups_of(self, agent: int) -> frozenset[str]:
        return frozenset(label for label, members in self._groups.items() if agent in members)

    def round_seed(self, round_index: int) -> int:
        return int(np.random.SeedSequence([self.seed, round_index]).generate_state(1)[0])

    def exchange(self, world_positions, outboxes) -> dict[int, list[NeighborObservation]]:
        """Run one round; returns the inboxes due this round.

        With a delay of ``D`` steps, messages sent in round ``t`` arrive in
        round ``t + D``; earlier rounds deliver empty inboxes.
        """
        sent = step_exchange(world_positions, outboxes, self.config, self.round_seed(self._round))
        self._round += 1
        self._pending.append(sent)
        if len(self._pending) > self.config.delivery_delay_steps:
            due = self._pending.popleft()
        else:
            due = {}
        return {i: list(due.get(i, ())) for i in sorted(world_positions)}
