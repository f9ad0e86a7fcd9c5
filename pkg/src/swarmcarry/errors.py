"""Exception types shared across the package."""


class SwarmCarryError(Exception):
    """Base class for all errors raised by swarmcarry."""


class DomainError(SwarmCarryError, ValueError):
    """An argument lies outside the domain where the model is defined."""


class TautCableError(DomainError):
    """Horizontal span is at least the cable length, so no catenary exists."""


class NonMonotonicTimeError(SwarmCarryError, ValueError):
    """A sample arrived with a timestamp not after the previous one."""


class SimulationDivergedError(SwarmCarryError, RuntimeError):
    """The integrator produced a non-finite or runaway state."""

    def __init__(self, step, agent, detail):
        self.step = step
        self.agent = agent
        self.detail = detail
        super().__init__(f"diverged at step {step}, agent {agent}: {detail}")
