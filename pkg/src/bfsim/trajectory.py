"""Desired-formation signal generation and excitation checks.

A trajectory provider is any callable ``(agent_id, t) -> DesiredState``
giving the desired position and its first three derivatives. Built-in
providers cover the two bundled 4-agent scenarios, a parametric circling
formation, and cubic interpolation of time-sampled tables. The module
also evaluates the persistently-exciting (PE) window condition that the
desired formation must satisfy for bearing-only tracking to converge.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import CoincidentAgents, DegenerateRadius, UnknownAgent
from .geometry import bearing, projector
from .graph import SensingGraph
from .reporting import ValidationReport


@dataclass(frozen=True)
class DesiredState:
    """Desired position p*, velocity v*, acceleration u*, jerk at one instant."""

    p: np.ndarray
    v: np.ndarray
    u: np.ndarray
    jerk: np.ndarray


TrajectoryProvider = Callable[[int, float], DesiredState]


# ---------------------------------------------------------------------------
# built-in providers
# ---------------------------------------------------------------------------

def scenario1(agent: int, t: float) -> DesiredState:
    """Four-agent formation with a time-varying shape translating along +y.

    Agent 2 oscillates diagonally in the x-z plane while the whole
    formation drifts at 0.2 m/s along y; agents 1, 3, 4 keep fixed shape
    offsets. Derivatives are analytic.
    """
    drift_p, drift_v = 0.2 * t, 0.2
    s, c = math.sin(t), math.cos(t)
    zero = np.zeros(3)
    if agent == 1:
        return DesiredState(np.array([1.0, drift_p, 1.0]),
                            np.array([0.0, drift_v, 0.0]), zero, zero.copy())
    if agent == 2:
        return DesiredState(
            np.array([-1.0 - 0.75 * s, drift_p, 1.0 + 0.75 * s]),
            np.array([-0.75 * c, drift_v, 0.75 * c]),
            np.array([0.75 * s, 0.0, -0.75 * s]),
            np.array([0.75 * c, 0.0, -0.75 * c]))
    if agent == 3:
        return DesiredState(np.array([-1.0, drift_p, -1.0]),
                            np.array([0.0, drift_v, 0.0]), zero, zero.copy())
    if agent == 4:
        return DesiredState(np.array([1.0, drift_p, -1.0]),
                            np.array([0.0, drift_v, 0.0]), zero, zero.copy())
    raise UnknownAgent(f"scenario1 defines agents 1..4, got {agent}")


def scenario2(agent: int, t: float) -> DesiredState:
    """Rigid triangle rotating about and translating along the y-axis.

    The shape scale shrinks linearly to its minimum at t = 40 s and grows
    back afterwards, so the scale factor has a kink there; the derivative
    convention at exactly t = 40 is one-sided from the right. Jerk remains
    bounded, which is all the tracking analysis needs.
    """
    if agent == 1:
        zero = np.zeros(3)
        return DesiredState(np.array([0.0, 0.4 * t, 0.0]),
                            np.array([0.0, 0.4, 0.0]), zero, zero.copy())
    if agent not in (2, 3, 4):
        raise UnknownAgent(f"scenario2 defines agents 1..4, got {agent}")

    phase = -(agent - 2) * (2.0 * math.pi / 3.0)
    scale = 1.0 + abs(t - 40.0) / 20.0
    dscale = (1.0 if t >= 40.0 else -1.0) / 20.0

    ang = 0.5 * t + phase
    s, c = math.sin(ang), math.cos(ang)
    w = np.array([s, 0.0, c])            # R_y(t/2 + phase) e3
    dw = np.array([0.5 * c, 0.0, -0.5 * s])

    p1 = np.array([0.0, 0.4 * t, 0.0])
    v1 = np.array([0.0, 0.4, 0.0])

    p = p1 + scale * w
    v = v1 + dscale * w + scale * dw
    u = 2.0 * dscale * dw - 0.25 * scale * w
    jerk = -0.75 * dscale * w - 0.25 * scale * dw
    return DesiredState(p, v, u, jerk)


@dataclass(frozen=True)
class CircleParams:
    """Circling-formation parameters: radius a0 + a1*sin(omega_a*t), climb h0 + h_rate*t."""

    a0: float = 1.0
    a1: float = 0.3
    omega: float = 0.5
    omega_a: float = 0.25
    phases: tuple[float, ...] = (0.0, 2.0 * math.pi / 3.0, 4.0 * math.pi / 3.0)
    h0: float = -1.0
    h_rate: float = -0.01
    a_min: float = 0.05

    def __post_init__(self):
        if self.a_min <= 0.0:
            raise ValueError("a_min must be positive")


def circle_experiment(agent: int, t: float, params: CircleParams) -> DesiredState:
    """Agents evenly phased on a breathing circle that climbs at a fixed rate.

    Raises
    ------
    DegenerateRadius
        If the instantaneous radius drops below ``params.a_min``.
    """
    if not 1 <= agent <= len(params.phases):
        raise UnknownAgent(
            f"circle trajectory has {len(params.phases)} phases, got agent {agent}")
    phi = params.phases[agent - 1]
    wa, w = params.omega_a, params.omega

    radius = params.a0 + params.a1 * math.sin(wa * t)
    if radius < params.a_min:
        raise DegenerateRadius(f"radius {radius:.4f} m below minimum {params.a_min} m")
    r1 = params.a1 * wa * math.cos(wa * t)
    r2 = -params.a1 * wa * wa * math.sin(wa * t)
    r3 = -params.a1 * wa ** 3 * math.cos(wa * t)

    ang = w * t - phi
    c, s = math.cos(ang), math.sin(ang)

    p = np.array([radius * c, radius * s, params.h0 + params.h_rate * t])
    v = np.array([r1 * c - radius * w * s,
                  r1 * s + radius * w * c,
                  params.h_rate])
    u = np.array([r2 * c - 2.0 * r1 * w * s - radius * w * w * c,
                  r2 * s + 2.0 * r1 * w * c - radius * w * w * s,
                  0.0])
    jerk = np.array([r3 * c - 3.0 * r2 * w * s - 3.0 * r1 * w * w * c + radius * w ** 3 * s,
                     r3 * s + 3.0 * r2 * w * c - 3.0 * r1 * w * w * s - radius * w ** 3 * c,
                     0.0])
    return DesiredState(p, v, u, jerk)


def make_circle_provider(params: CircleParams) -> TrajectoryProvider:
    return lambda agent, t: circle_experiment(agent, t, params)


@dataclass(frozen=True)
class TableTrajectory:
    """Cubic interpolation of a time-sampled trajectory table.

    Positions are interpolated with a natural cubic spline per agent and
    axis; velocity, acceleration, and jerk come from central finite
    differences of the interpolant, so arbitrary user tables need no
    analytic derivatives.
    """

    times: np.ndarray
    splines: tuple  # one CubicSpline per agent, vector-valued
    fd_step: float = 1e-4

    @classmethod
    def from_samples(cls, times: Sequence[float],
                     positions: Mapping[int, Sequence[Sequence[float]]],
                     fd_step: float = 1e-4) -> "TableTrajectory":
        """Build from sample times and per-agent position rows.

        ``positions[agent]`` is an (m, 3) array-like aligned with ``times``.
        """
        ts = np.asarray(times, dtype=float)
        if ts.ndim != 1 or ts.size < 2:
            raise ValueError("need at least two sample times")
        if np.any(np.diff(ts) <= 0):
            raise ValueError("sample times must be strictly increasing")
        n = len(positions)
        splines = []
        for agent in range(1, n + 1):
            if agent not in positions:
                raise ValueError(f"missing positions for agent {agent}")
            rows = np.asarray(positions[agent], dtype=float)
            if rows.shape != (ts.size, 3):
                raise ValueError(
                    f"agent {agent}: positions shape {rows.shape}, "
                    f"expected {(ts.size, 3)}")
            splines.append(CubicSpline(ts, rows, axis=0, bc_type="natural"))
        return cls(times=ts, splines=tuple(splines), fd_step=fd_step)

    @property
    def n_agents(self) -> int:
        return len(self.splines)

    def __call__(self, agent: int, t: float) -> DesiredState:
        if not 1 <= agent <= self.n_agents:
            raise UnknownAgent(f"table defines agents 1..{self.n_agents}, got {agent}")
        spline = self.splines[agent - 1]
        return finite_diff_derivatives(
            lambda _a, tau: DesiredState(spline(tau), None, None, None),
            agent, t, self.fd_step)


def finite_diff_derivatives(provider, agent: int, t: float,
                            h: float = 1e-4) -> DesiredState:
    """Replace a provider's derivatives with central differences of p*.

    Second-order accurate; exact for polynomial positions up to the
    stencil order. The provider only needs to supply valid positions.
    """
    if h <= 0.0:
        raise ValueError(f"step must be positive, got {h}")
    p_m2 = provider(agent, t - 2.0 * h).p
    p_m1 = provider(agent, t - h).p
    p_0 = provider(agent, t).p
    p_p1 = provider(agent, t + h).p
    p_p2 = provider(agent, t + 2.0 * h).p
    v = (p_p1 - p_m1) / (2.0 * h)
    u = (p_p1 - 2.0 * p_0 + p_m1) / (h * h)
    jerk = (p_p2 - 2.0 * p_p1 + 2.0 * p_m1 - p_m2) / (2.0 * h ** 3)
    return DesiredState(np.asarray(p_0, dtype=float), v, u, jerk)


def with_offset(provider: TrajectoryProvider, offset) -> TrajectoryProvider:
    """Rigidly translate every desired position by a constant vector."""
    shift = np.asarray(offset, dtype=float)

    def shifted(agent: int, t: float) -> DesiredState:
        d = provider(agent, t)
        return DesiredState(d.p + shift, d.v, d.u, d.jerk)

    return shifted


# ---------------------------------------------------------------------------
# persistent-excitation checks
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PEParams:
    """Sliding-window excitation test parameters.

    ``mu_min`` must sit in (0, 1): projector eigenvalues never exceed 1,
    so a normalized window average cannot either.
    """

    window: float = 10.0
    mu_min: float = 0.05
    quadrature_dt: float = 0.01

    def __post_init__(self):
        if self.window <= 0.0:
            raise ValueError("window must be positive")
        if not 0.0 < self.mu_min < 1.0:
            raise ValueError(f"mu_min must be in (0, 1), got {self.mu_min}")
        if self.quadrature_dt > self.window / 100.0:
            raise ValueError("quadrature_dt must be at most window/100")


def pe_window_matrix(bearing_fn: Callable[[float], Sequence[np.ndarray]],
                     t0: float, params: PEParams) -> np.ndarray:
    """Window average ``(1/T) \\int sum_j (I - g_j g_j^T) dtau`` over [t0, t0+T].

    ``bearing_fn(t)`` returns the instantaneous unit bearings of one agent
    to each of its neighbors. Trapezoidal quadrature at ``quadrature_dt``
    resolution; the result is symmetric positive semi-definite with
    eigenvalues in [0, number of neighbors].
    """
    m = max(2, int(round(params.window / params.quadrature_dt)))
    taus = t0 + np.linspace(0.0, params.window, m + 1)
    acc = np.zeros((3, 3))
    for idx, tau in enumerate(taus):
        bearings = bearing_fn(float(tau))
        sigma = np.zeros((3, 3))
        for g in bearings:
            sigma += projector(g)
        weight = 0.5 if idx in (0, m) else 1.0
        acc += weight * sigma
    dt = params.window / m
    avg = acc * (dt / params.window)
    return 0.5 * (avg + avg.T)


def smallest_eigenvalue(m: np.ndarray) -> float:
    """Smallest eigenvalue of a symmetric 3x3 matrix."""
    return float(np.linalg.eigvalsh(m)[0])


@dataclass(frozen=True)
class BpeAgentResult:
    """Worst-window excitation level of one follower."""

    agent: int
    min_eigenvalue: float
    mu_min: float
    windows: int

    @property
    def is_pe(self) -> bool:
        return self.min_eigenvalue >= self.mu_min


def is_bpe(provider: TrajectoryProvider, graph: SensingGraph, horizon: float,
           params: PEParams | None = None) -> dict[int, BpeAgentResult]:
    """Numerically test the bearing-PE condition of a desired formation.

    For each follower the smallest eigenvalue of the window matrix is
    minimized over windows sliding by a quarter window across
    ``[0, horizon]``; the follower passes when that minimum reaches
    ``mu_min``. Desired positions closer than the bearing threshold
    raise :class:`CoincidentAgents`.
    """
    params = params or PEParams()
    if horizon < params.window:
        raise ValueError(
            f"horizon {horizon} s shorter than PE window {params.window} s")

    stride = params.window / 4.0
    starts = [0.0]
    while starts[-1] + stride + params.window <= horizon + 1e-9:
        starts.append(starts[-1] + stride)

    results: dict[int, BpeAgentResult] = {}
    for agent in graph.followers:
        nbrs = graph.neighbors_of(agent)

        def bearings_at(t: float, _agent=agent, _nbrs=nbrs):
            own = provider(_agent, t).p
            return [bearing(own, provider(j, t).p) for j in _nbrs]

        worst = math.inf
        for t0 in starts:
            lam = smallest_eigenvalue(pe_window_matrix(bearings_at, t0, params))
            worst = min(worst, lam)
        results[agent] = BpeAgentResult(agent=agent, min_eigenvalue=worst,
                                        mu_min=params.mu_min, windows=len(starts))
    return results


def check_boundedness(provider: TrajectoryProvider, n_agents: int, horizon: float,
                      bound: float = 50.0, sample_dt: float = 0.1) -> ValidationReport:
    """Sample desired velocity/acceleration/jerk magnitudes against a bound.

    A coarse sanity check of the boundedness assumption on the reference
    signals; it cannot prove boundedness, only catch runaway trajectories.
    """
    report = ValidationReport()
    times = np.arange(0.0, horizon + sample_dt / 2.0, sample_dt)
    for agent in range(1, n_agents + 1):
        peak_v = peak_u = peak_j = 0.0
        for t in times:
            d = provider(agent, float(t))
            if not (np.isfinite(d.p).all() and np.isfinite(d.v).all()
                    and np.isfinite(d.u).all() and np.isfinite(d.jerk).all()):
                report.add_fail(f"bounded_agent_{agent}", f"non-finite at t={t:.2f}")
                break
            peak_v = max(peak_v, float(np.linalg.norm(d.v)))
            peak_u = max(peak_u, float(np.linalg.norm(d.u)))
            peak_j = max(peak_j, float(np.linalg.norm(d.jerk)))
        else:
            detail = (f"max |v*| = {peak_v:.3f}, |u*| = {peak_u:.3f}, "
                      f"|jerk*| = {peak_j:.3f} (bound {bound})")
            if max(peak_v, peak_u, peak_j) <= bound:
                report.add_pass(f"bounded_agent_{agent}", detail)
            else:
                report.add_fail(f"bounded_agent_{agent}", detail)
    return report
