"""Closed-loop simulation: measurements -> controllers -> physics, recorded.

The engine runs a fixed-step loop. At each control tick it extracts
measurements from ground truth per the sensing graph (optionally noisy
and delayed), invokes the leader and follower controllers, converts the
virtual accelerations to thrust/angular-velocity commands, and then holds
those commands while the physics advances at the (faster) physics rate.
Everything a later analysis could want is recorded per tick.

Runs are deterministic: the same config and seed produce bit-identical
records. The random source is the counter-based Philox generator, and the
loop is strictly sequential, so there is no ordering ambiguity to hide.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .control import (CollisionParams, ControlGains, FollowerMeasurements,
                      FollowerReference, LeaderGains, VirtualAcceleration,
                      follower_control, inner_loop, leader_control,
                      thrust_direction)
from .dynamics import (MAX_STEP, QuadrotorParams, QuadrotorState, step_arrays)
from .errors import CoincidentAgents, NonFiniteState, SimulationError, add_context
from .geometry import DEFAULT_MIN_SEPARATION, E3
from .graph import SensingGraph
from .trajectory import DesiredState, TrajectoryProvider

RNG_NAME = "numpy-philox4x64"

PLANT_QUADROTOR = "quadrotor"
PLANT_DOUBLE_INTEGRATOR = "double_integrator"


@dataclass(frozen=True)
class NoiseModel:
    """Measurement-layer noise: bearing tilt [rad], velocity [m/s], delay [ticks]."""

    bearing_sigma: float = 0.0
    relvel_sigma: float = 0.0
    delay_ticks: int = 0

    def __post_init__(self):
        if self.bearing_sigma < 0.0 or self.relvel_sigma < 0.0:
            raise ValueError("noise sigmas must be non-negative")
        if self.delay_ticks < 0:
            raise ValueError("delay_ticks must be non-negative")


@dataclass(frozen=True)
class SimConfig:
    """Everything a run needs; validated on construction."""

    graph: SensingGraph
    initial_states: tuple[QuadrotorState, ...]
    quad_params: tuple[QuadrotorParams, ...]
    gains: tuple[ControlGains, ...]
    provider: TrajectoryProvider
    duration: float
    leader_gains: LeaderGains = LeaderGains()
    collision: CollisionParams = CollisionParams()
    noise: NoiseModel = NoiseModel()
    physics_dt: float = 0.001
    control_rate: float = 100.0
    seed: int = 0
    udot_mode: str = "backward_diff"
    plant: str = PLANT_QUADROTOR
    trajectory_kind: str = ""

    def __post_init__(self):
        n = self.graph.n
        for name, seq in (("initial_states", self.initial_states),
                          ("quad_params", self.quad_params),
                          ("gains", self.gains)):
            if len(seq) != n:
                raise ValueError(f"{name} has {len(seq)} entries for n={n}")
        if self.duration <= 0.0:
            raise ValueError(f"duration must be positive, got {self.duration}")
        if not 0.0 < self.physics_dt <= MAX_STEP:
            raise ValueError(
                f"physics_dt must be in (0, {MAX_STEP}], got {self.physics_dt}")
        ratio = self.control_period / self.physics_dt
        if abs(ratio - round(ratio)) > 1e-9 * max(1.0, ratio) or round(ratio) < 1:
            raise ValueError(
                f"physics_dt {self.physics_dt} does not divide the control "
                f"period {self.control_period} (ratio {ratio})")
        if self.plant not in (PLANT_QUADROTOR, PLANT_DOUBLE_INTEGRATOR):
            raise ValueError(f"unknown plant {self.plant!r}")
        if self.udot_mode not in ("backward_diff", "jerk_feedforward"):
            raise ValueError(f"unknown udot_mode {self.udot_mode!r}")
        gravities = {p.gravity for p in self.quad_params}
        if len(gravities) != 1:
            raise ValueError("all agents must share one gravity value")

    @property
    def control_period(self) -> float:
        return 1.0 / self.control_rate

    @property
    def substeps_per_tick(self) -> int:
        return int(round(self.control_period / self.physics_dt))

    @property
    def ticks(self) -> int:
        return int(round(self.duration * self.control_rate))


@dataclass
class SimRecord:
    """Per-tick time series of one run; shapes (K,), (K,n,...), (K,E,...)."""

    t: np.ndarray
    p: np.ndarray
    v: np.ndarray
    R: np.ndarray
    thrust: np.ndarray
    omega: np.ndarray
    u: np.ndarray
    u_b: np.ndarray
    u_c: np.ndarray
    p_star: np.ndarray
    v_star: np.ndarray
    r3_star: np.ndarray
    edges: tuple[tuple[int, int], ...]
    g_edge: np.ndarray
    d_edge: np.ndarray
    p_tilde: np.ndarray
    v_tilde: np.ndarray
    minus_uc_dot_g: np.ndarray
    graph: SensingGraph
    seed: int
    safety_margin: float
    control_period: float
    rng_name: str = RNG_NAME

    @property
    def n_agents(self) -> int:
        return self.p.shape[1]


def _perturb_bearing(g: np.ndarray, sigma: float, rng: np.random.Generator
                     ) -> np.ndarray:
    """Tilt a unit bearing by an isotropic tangent-plane Gaussian angle."""
    anchor = np.array([1.0, 0.0, 0.0]) if abs(g[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    t1 = np.cross(g, anchor)
    t1 /= np.linalg.norm(t1)
    t2 = np.cross(g, t1)
    n1, n2 = rng.normal(0.0, sigma, size=2)
    angle = float(np.hypot(n1, n2))
    if angle < 1e-15:
        return g
    direction = (n1 * t1 + n2 * t2) / angle
    out = np.cos(angle) * g + np.sin(angle) * direction
    return out / np.linalg.norm(out)


def extract_measurements(states: Sequence[QuadrotorState], graph: SensingGraph,
                         desired: Sequence[DesiredState],
                         noise: NoiseModel | None = None,
                         rng: np.random.Generator | None = None,
                         safety_margin: float = 0.0,
                         ) -> tuple[dict[int, FollowerMeasurements],
                                    dict[int, FollowerReference]]:
    """Build per-follower measurements and references from ground truth.

    Bearings and relative velocities come from the true states, corrupted
    by the noise model when one is supplied; ranges are reported as
    distance minus the safety margin. References are assembled from the
    desired states, relative per edge so that any common translation of
    the desired formation cancels.
    """
    noise = noise or NoiseModel()
    if (noise.bearing_sigma > 0.0 or noise.relvel_sigma > 0.0) and rng is None:
        raise ValueError("noise requested but no rng supplied")

    measurements: dict[int, FollowerMeasurements] = {}
    references: dict[int, FollowerReference] = {}
    for i in graph.followers:
        si, di = states[i - 1], desired[i - 1]
        bearings: dict[int, np.ndarray] = {}
        rel_vel: dict[int, np.ndarray] = {}
        ranges: dict[int, float] = {}
        ref_p: dict[int, np.ndarray] = {}
        ref_v: dict[int, np.ndarray] = {}
        for j in graph.neighbors_of(i):
            sj, dj = states[j - 1], desired[j - 1]
            rel = sj.p - si.p
            dist = float(np.linalg.norm(rel))
            if dist < DEFAULT_MIN_SEPARATION:
                raise CoincidentAgents(
                    f"agents {i} and {j} separated by {dist:.3e} m")
            g = rel / dist
            v_ij = sj.v - si.v
            if noise.bearing_sigma > 0.0:
                g = _perturb_bearing(g, noise.bearing_sigma, rng)
            if noise.relvel_sigma > 0.0:
                v_ij = v_ij + rng.normal(0.0, noise.relvel_sigma, size=3)
            bearings[j] = g
            rel_vel[j] = v_ij
            ranges[j] = dist - safety_margin
            ref_p[j] = dj.p - di.p
            ref_v[j] = dj.v - di.v
        measurements[i] = FollowerMeasurements(R=si.R, bearings=bearings,
                                               rel_velocities=rel_vel, ranges=ranges)
        references[i] = FollowerReference(rel_positions=ref_p, rel_velocities=ref_v,
                                          accel=di.u, jerk=di.jerk)
    return measurements, references


def run(config: SimConfig) -> SimRecord:
    """Execute one closed-loop simulation.

    Aborts by raising the originating error (NonFiniteState,
    SafetyViolated, ThrustSingularity, ...) annotated with the control
    tick and offending agent.
    """
    graph = config.graph
    n = graph.n
    edges = graph.edges
    n_edges = len(edges)
    gravity = config.quad_params[0].gravity
    masses = np.array([qp.mass for qp in config.quad_params])
    period = config.control_period
    spt = config.substeps_per_tick
    ticks = config.ticks
    rng = np.random.Generator(np.random.Philox(config.seed))

    p = np.stack([s.p for s in config.initial_states]).astype(float)
    v = np.stack([s.v for s in config.initial_states]).astype(float)
    R = np.stack([s.R for s in config.initial_states]).astype(float)

    rec = SimRecord(
        t=np.empty(ticks),
        p=np.empty((ticks, n, 3)), v=np.empty((ticks, n, 3)),
        R=np.empty((ticks, n, 3, 3)),
        thrust=np.zeros((ticks, n)), omega=np.zeros((ticks, n, 3)),
        u=np.empty((ticks, n, 3)), u_b=np.empty((ticks, n, 3)),
        u_c=np.zeros((ticks, n, 3)),
        p_star=np.empty((ticks, n, 3)), v_star=np.empty((ticks, n, 3)),
        r3_star=np.empty((ticks, n, 3)),
        edges=edges,
        g_edge=np.empty((ticks, n_edges, 3)), d_edge=np.empty((ticks, n_edges)),
        p_tilde=np.empty((ticks, n_edges, 3)), v_tilde=np.empty((ticks, n_edges, 3)),
        minus_uc_dot_g=np.zeros((ticks, n_edges)),
        graph=graph, seed=config.seed, safety_margin=config.collision.r,
        control_period=period)

    prev_u: list[np.ndarray | None] = [None] * n
    meas_buffer: deque = deque(maxlen=config.noise.delay_ticks + 1)

    for k in range(ticks):
        t = k * period

        try:
            desired = [config.provider(i, t) for i in range(1, n + 1)]
        except SimulationError as err:
            raise add_context(err, k, None)

        states = []
        for i in range(n):
            try:
                states.append(QuadrotorState(p=p[i], v=v[i], R=R[i]))
            except SimulationError as err:
                raise add_context(err, k, i + 1)

        try:
            meas_now, refs = extract_measurements(
                states, graph, desired, config.noise, rng, config.collision.r)
        except SimulationError as err:
            raise add_context(err, k, None)
        meas_buffer.append(meas_now)
        meas = meas_buffer[0]

        u_all = np.empty((n, 3))
        for i in range(1, n + 1):
            try:
                if i == 1:
                    va = leader_control(states[0], desired[0], config.leader_gains)
                    u_b, u_c = va.u, np.zeros(3)
                else:
                    va, u_b, u_c = follower_control(
                        meas[i], refs[i], config.collision, config.gains[i - 1],
                        prev_u[i - 1], period, config.udot_mode)
                    prev_u[i - 1] = va.u
                u_all[i - 1] = va.u
                rec.u_b[k, i - 1] = u_b
                rec.u_c[k, i - 1] = u_c
                rec.r3_star[k, i - 1] = thrust_direction(va.u, gravity)
                if config.plant == PLANT_QUADROTOR:
                    cmd = inner_loop(va, R[i - 1], config.quad_params[i - 1],
                                     config.gains[i - 1])
                    rec.thrust[k, i - 1] = cmd.thrust
                    rec.omega[k, i - 1] = cmd.omega
            except SimulationError as err:
                raise add_context(err, k, i)

        rec.t[k] = t
        rec.p[k] = p
        rec.v[k] = v
        rec.R[k] = R
        rec.u[k] = u_all
        for e, (i, j) in enumerate(edges):
            rel = p[j - 1] - p[i - 1]
            dist = float(np.linalg.norm(rel))
            g = rel / dist if dist > 0.0 else E3
            rec.g_edge[k, e] = g
            rec.d_edge[k, e] = dist - config.collision.r
            rec.p_tilde[k, e] = rel - (desired[j - 1].p - desired[i - 1].p)
            rec.v_tilde[k, e] = (v[j - 1] - v[i - 1]) - (desired[j - 1].v - desired[i - 1].v)
            rec.minus_uc_dot_g[k, e] = -float(np.dot(rec.u_c[k, i - 1], g))
        for i in range(n):
            rec.p_star[k, i] = desired[i].p
            rec.v_star[k, i] = desired[i].v

        if config.plant == PLANT_QUADROTOR:
            for _ in range(spt):
                p, v, R = step_arrays(p, v, R, rec.thrust[k], rec.omega[k],
                                      masses, gravity, config.physics_dt)
        else:
            h = config.physics_dt
            for _ in range(spt):
                p = p + h * v + (0.5 * h * h) * u_all
                v = v + h * u_all

        if not (np.isfinite(p).all() and np.isfinite(v).all()):
            bad = [i + 1 for i in range(n)
                   if not (np.isfinite(p[i]).all() and np.isfinite(v[i]).all())]
            raise add_context(
                NonFiniteState("state diverged during physics substeps"),
                k, bad[0] if bad else None)

    return rec


@dataclass(frozen=True)
class FollowerMetrics:
    """Tracking statistics of one follower over a run."""

    agent: int
    final_position_error: float
    max_position_error: float
    final_velocity_error: float
    max_velocity_error: float
    final_rotation_error: float
    max_rotation_error: float
    time_to_threshold: float | None


@dataclass(frozen=True)
class MetricsSummary:
    """Run-level convergence and safety summary."""

    threshold: float
    followers: tuple[FollowerMetrics, ...]
    min_edge_range: dict[tuple[int, int], float]
    min_edge_separation: dict[tuple[int, int], float]
    min_pair_separation: float


def position_errors(record: SimRecord, agent: int) -> np.ndarray:
    """Time series ||p_i - p_i*|| for one agent."""
    return np.linalg.norm(record.p[:, agent - 1] - record.p_star[:, agent - 1], axis=1)


def velocity_errors(record: SimRecord, agent: int) -> np.ndarray:
    return np.linalg.norm(record.v[:, agent - 1] - record.v_star[:, agent - 1], axis=1)


def rotation_errors(record: SimRecord, agent: int) -> np.ndarray:
    """Angle between the body z-axis and the desired thrust direction [rad]."""
    r3 = record.R[:, agent - 1, :, 2]
    dots = np.einsum("ki,ki->k", r3, record.r3_star[:, agent - 1])
    return np.arccos(np.clip(dots, -1.0, 1.0))


def time_to_threshold(times: np.ndarray, errors: np.ndarray,
                      threshold: float) -> float | None:
    """Earliest time after which the error stays below the threshold."""
    above = np.flatnonzero(errors >= threshold)
    if above.size == 0:
        return float(times[0])
    last = int(above[-1])
    if last == errors.size - 1:
        return None
    return float(times[last + 1])


def compute_metrics(record: SimRecord, threshold: float = 0.05) -> MetricsSummary:
    """Summarize convergence and safety of a finished run."""
    followers = []
    for agent in record.graph.followers:
        ep = position_errors(record, agent)
        ev = velocity_errors(record, agent)
        er = rotation_errors(record, agent)
        followers.append(FollowerMetrics(
            agent=agent,
            final_position_error=float(ep[-1]),
            max_position_error=float(ep.max()),
            final_velocity_error=float(ev[-1]),
            max_velocity_error=float(ev.max()),
            final_rotation_error=float(er[-1]),
            max_rotation_error=float(er.max()),
            time_to_threshold=time_to_threshold(record.t, ep, threshold)))

    min_range = {edge: float(record.d_edge[:, e].min())
                 for e, edge in enumerate(record.edges)}
    min_sep = {edge: float(record.d_edge[:, e].min() + record.safety_margin)
               for e, edge in enumerate(record.edges)}

    diffs = record.p[:, :, None, :] - record.p[:, None, :, :]
    dists = np.linalg.norm(diffs, axis=-1)
    n = record.n_agents
    iu = np.triu_indices(n, k=1)
    min_pair = float(dists[:, iu[0], iu[1]].min()) if n > 1 else float("inf")

    return MetricsSummary(threshold=threshold, followers=tuple(followers),
                          min_edge_range=min_range, min_edge_separation=min_sep,
                          min_pair_separation=min_pair)
