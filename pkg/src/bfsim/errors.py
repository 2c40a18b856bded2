"""Exception types raised by the simulator.

Every error the library raises deliberately derives from
:class:`SimulationError`, so callers can catch one base class at the
boundary (the CLI does exactly that).
"""
from __future__ import annotations


class SimulationError(Exception):
    """Base class for all simulator errors."""

    #: control tick at which the error surfaced, set by the engine
    tick: int | None = None
    #: offending agent id, set by the engine
    agent: int | None = None


class CoincidentAgents(SimulationError):
    """Two agents are closer than the bearing-definedness threshold."""


class DegenerateYaw(SimulationError):
    """Desired thrust axis is parallel to the yaw reference direction."""


class DegenerateRadius(SimulationError):
    """Circle trajectory radius fell below its configured minimum."""


class UnknownAgent(SimulationError):
    """Trajectory evaluated for an agent id it does not define."""


class InvalidGain(SimulationError):
    """A controller gain violates a hard requirement (e.g. kd <= 1)."""


class NeighborMismatch(SimulationError):
    """Measurement and reference neighbor sets disagree or are empty."""


class NonFiniteState(SimulationError):
    """Integration produced NaN/inf; the simulation has blown up."""


class ThrustSingularity(SimulationError):
    """Commanded acceleration too close to free fall; thrust direction undefined."""


class NonPositiveDistance(SimulationError):
    """Barrier function evaluated at a non-positive distance."""


class SafetyViolated(SimulationError):
    """An inter-agent range dropped to or below the safety margin."""


class ParseError(SimulationError):
    """Scenario file is malformed; message names the exact field path."""

    def __init__(self, message: str, path: str | None = None):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path


def add_context(err: SimulationError, tick: int, agent: int | None) -> SimulationError:
    """Attach tick/agent diagnostics to an in-flight error (idempotent)."""
    if err.tick is None:
        err.tick = tick
        err.agent = agent
        where = f"tick {tick}" + (f", agent {agent}" if agent is not None else "")
        err.args = (f"[{where}] {err.args[0] if err.args else ''}",)
    return err
