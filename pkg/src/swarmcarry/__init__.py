"""Decentralized cooperative transport of a cable-suspended payload by a robot swarm."""

from .analysis import CorrelationReport, detrend, pearson, summarize, synchronicity
from .catenary import PayloadModel, horizontal_tension, payload_stiffness, solve_catenary, vertical_tension
from .control import (
    LennardJonesConfig,
    SpringDamperConfig,
    axis_gains,
    damping_ratios,
    lennard_jones_force,
    pair_force,
    spring_damper_force,
    tune_gains,
)
from .errors import DomainError, NonMonotonicTimeError, SimulationDivergedError, SwarmCarryError, TautCableError
from .estimation import EmaDerivativeFilter
from .sim import Scenario, TrajectoryLog, run

__version__ = "0.1.0"
