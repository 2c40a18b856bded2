"""Hierarchical flight control: bearing-based outer loop, barrier term, inner loop.

The follower outer loop commands a virtual acceleration from purely
relative information: per-neighbor bearings, relative velocities, and the
known reference signals. A reactive collision-avoidance term damps the
velocity component toward any neighbor that enters an influence zone. The
inner loop converts the virtual acceleration into a thrust magnitude plus
a body angular-velocity command whose high gain makes the vehicle behave
like a double integrator on the outer-loop time scale.

Sign conventions follow the NED/FRD frames: gravity is ``+g e3`` and the
thrust force is ``-T R e3``. The desired thrust axis is therefore
``(g e3 - u) / ||g e3 - u||``, the unique direction for which the
commanded acceleration is reproduced exactly once attitude has converged.

The velocity feedback in the outer loop enters with a ``+`` sign on the
per-edge error ``(v_j - v_i) - (v_j* - v_i*)``: a follower that falls
behind its neighbor (positive error) must accelerate toward it. The
opposite sign makes the tracking error dynamics ``dv~/dt = +kd v~``,
which diverges.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import ControlInput, QuadrotorParams, QuadrotorState
from .errors import (NeighborMismatch, NonPositiveDistance, SafetyViolated,
                     ThrustSingularity)
from .geometry import E3, PI_E3, skew
from .trajectory import DesiredState

#: commanded accelerations closer than this to free fall are rejected [m/s^2]
DEFAULT_THRUST_MARGIN = 0.5


@dataclass(frozen=True)
class ControlGains:
    """Per-agent gains: outer-loop kp/kd, barrier ko, inner-loop n_gain, yaw setpoint.

    ``kd`` values at or below 1 void the sufficient convergence condition;
    they are admitted here (the validators flag them) so that deliberately
    out-of-envelope runs remain possible.
    """

    kp: float
    kd: float
    n_gain: float
    ko: float = 0.0
    yaw: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.kp) and self.kp > 0.0):
            raise ValueError(f"kp must be positive, got {self.kp}")
        if not (math.isfinite(self.kd) and self.kd > 0.0):
            raise ValueError(f"kd must be positive, got {self.kd}")
        if not (math.isfinite(self.n_gain) and self.n_gain > 0.0):
            raise ValueError(f"n_gain must be positive, got {self.n_gain}")
        if not (math.isfinite(self.ko) and self.ko >= 0.0):
            raise ValueError(f"ko must be non-negative, got {self.ko}")


@dataclass(frozen=True)
class LeaderGains:
    """PD gains of the leader's absolute-position tracking loop."""

    kp: float = 4.0
    kd: float = 4.0


@dataclass(frozen=True)
class CollisionParams:
    """Barrier geometry: safety margin r plus inner/outer blend distances [m]."""

    r: float = 0.10
    eps_inner: float = 0.3
    eps_outer: float = 0.8

    def __post_init__(self):
        if self.r < 0.0:
            raise ValueError(f"safety margin must be non-negative, got {self.r}")
        if not 0.0 < self.eps_inner < self.eps_outer:
            raise ValueError(
                f"need 0 < eps_inner < eps_outer, got {self.eps_inner}, {self.eps_outer}")


@dataclass(frozen=True)
class FollowerMeasurements:
    """Everything a follower controller is allowed to read.

    Own attitude plus, per neighbor: inertial-frame bearing, relative
    velocity ``v_j - v_i``, and range-minus-safety-margin. There is
    deliberately no absolute position or absolute velocity field, so the
    information constraint holds by construction.
    """

    R: np.ndarray
    bearings: dict[int, np.ndarray]
    rel_velocities: dict[int, np.ndarray]
    ranges: dict[int, float]


@dataclass(frozen=True)
class FollowerReference:
    """Known reference signals for one follower: per-neighbor relative
    desired position/velocity, own desired acceleration and jerk."""

    rel_positions: dict[int, np.ndarray]
    rel_velocities: dict[int, np.ndarray]
    accel: np.ndarray
    jerk: np.ndarray


@dataclass(frozen=True)
class VirtualAcceleration:
    """Outer-loop output: commanded acceleration and its time derivative."""

    u: np.ndarray
    u_dot: np.ndarray


def _check_neighbors(meas: FollowerMeasurements, ref: FollowerReference) -> None:
    keys = set(meas.bearings)
    if not keys:
        raise NeighborMismatch("follower has no neighbor measurements")
    for label, other in (("relative velocities", set(meas.rel_velocities)),
                         ("ranges", set(meas.ranges)),
                         ("reference positions", set(ref.rel_positions)),
                         ("reference velocities", set(ref.rel_velocities))):
        if other != keys:
            raise NeighborMismatch(
                f"{label} keys {sorted(other)} != bearing keys {sorted(keys)}")


def outer_loop_follower(meas: FollowerMeasurements, ref: FollowerReference,
                        gains: ControlGains) -> np.ndarray:
    """Bearing-based formation tracking acceleration.

    Sums ``-kp * pi_g_ij p_ij* + kd * ((v_ij - v_ij*))`` over the
    neighbors and adds the desired acceleration. The projector term needs
    no range: the component of ``p_ij*`` along the measured bearing is
    unobservable and is exactly what the projector removes.
    """
    _check_neighbors(meas, ref)
    u = np.array(ref.accel, dtype=float)
    for j, g in meas.bearings.items():
        p_star = ref.rel_positions[j]
        u -= gains.kp * (p_star - g * float(np.dot(g, p_star)))
        u += gains.kd * (meas.rel_velocities[j] - ref.rel_velocities[j])
    return u


def gamma(z: float, cp: CollisionParams) -> float:
    """Barrier intensity as a function of range-beyond-safety-margin.

    Zero outside ``eps_outer``, ``1/z`` inside ``eps_inner``, cosine-blended
    in between; continuously differentiable at both junctions.

    Raises
    ------
    NonPositiveDistance
        For ``z <= 0``: the vehicles are at or inside the safety margin.
    """
    if z <= 0.0:
        raise NonPositiveDistance(f"barrier evaluated at distance {z:.4f} m")
    if z >= cp.eps_outer:
        return 0.0
    if z <= cp.eps_inner:
        return 1.0 / z
    blend = 0.5 - 0.5 * math.cos(
        math.pi * (z - cp.eps_outer) / (cp.eps_inner - cp.eps_outer))
    return blend / z


def collision_term(meas: FollowerMeasurements, cp: CollisionParams,
                   gains: ControlGains) -> np.ndarray:
    """Constructive barrier acceleration ``sum_j ko * gamma(d_ij) g g^T v_ij``.

    Each summand is parallel to the corresponding bearing, so the term
    only damps the closing/opening speed and never disturbs tangential
    motion.

    Raises
    ------
    SafetyViolated
        If any neighbor range has reached the safety margin.
    """
    u_c = np.zeros(3)
    for j, g in meas.bearings.items():
        d = meas.ranges[j]
        if d <= 0.0:
            raise SafetyViolated(
                f"range to neighbor {j} is {d:.4f} m beyond the safety margin")
        if d >= cp.eps_outer or gains.ko == 0.0:
            continue
        u_c += (gains.ko * gamma(d, cp) * float(np.dot(g, meas.rel_velocities[j]))) * g
    return u_c


def estimate_udot(u_now: np.ndarray, u_prev: np.ndarray | None,
                  dt_ctrl: float, fallback: np.ndarray) -> np.ndarray:
    """Backward-difference estimate of du/dt; reference jerk on the first tick."""
    if dt_ctrl <= 0.0:
        raise ValueError(f"control period must be positive, got {dt_ctrl}")
    if u_prev is None:
        return np.array(fallback, dtype=float)
    return (u_now - u_prev) / dt_ctrl


def inner_loop(va: VirtualAcceleration, R: np.ndarray, params: QuadrotorParams,
               gains: ControlGains,
               thrust_margin: float = DEFAULT_THRUST_MARGIN) -> ControlInput:
    """Thrust magnitude and angular-velocity command realizing ``va.u``.

    The angular velocity steers the body z-axis toward the desired thrust
    direction at rate ``n_gain`` and adds a feedforward term tracking the
    direction's motion implied by ``va.u_dot``. Both terms are orthogonal
    to body z, so the yaw rate is structurally zero.

    Raises
    ------
    ThrustSingularity
        If the command is within ``thrust_margin`` of free fall, where the
        thrust direction is undefined; this signals a mis-configured
        scenario rather than something to clamp silently.
    """
    f = params.gravity * E3 - va.u
    norm_f = float(np.linalg.norm(f))
    if norm_f < thrust_margin:
        raise ThrustSingularity(
            f"|g e3 - u| = {norm_f:.3f} m/s^2 below margin {thrust_margin}")
    thrust = params.mass * norm_f
    r3_star = f / norm_f

    omega = gains.n_gain * (skew(E3) @ (R.T @ r3_star))
    omega += (params.mass / thrust) * (PI_E3 @ (R.T @ (skew(r3_star) @ va.u_dot)))
    return ControlInput(thrust=thrust, omega=omega)


def thrust_direction(u: np.ndarray, gravity: float) -> np.ndarray:
    """Desired body z-axis for a virtual acceleration (unit vector)."""
    f = gravity * E3 - np.asarray(u, dtype=float)
    n = float(np.linalg.norm(f))
    if n < 1e-9:
        return E3.copy()
    return f / n


def leader_control(state: QuadrotorState, des: DesiredState,
                   gains: LeaderGains) -> VirtualAcceleration:
    """Absolute-position PD tracking law for the leader.

    The leader is the one agent entitled to its global position. The
    commanded derivative assumes the double-integrator abstraction
    (dv/dt = u) when differentiating the feedback terms.
    """
    ep = state.p - des.p
    ev = state.v - des.v
    u = des.u - gains.kp * ep - gains.kd * ev
    u_dot = des.jerk - gains.kp * ev - gains.kd * (u - des.u)
    return VirtualAcceleration(u=u, u_dot=u_dot)


def follower_control(meas: FollowerMeasurements, ref: FollowerReference,
                     cp: CollisionParams, gains: ControlGains,
                     prev_u: np.ndarray | None, dt_ctrl: float,
                     udot_mode: str = "backward_diff"
                     ) -> tuple[VirtualAcceleration, np.ndarray, np.ndarray]:
    """Complete follower outer loop: formation term plus barrier term.

    This is the only controller entry point for followers; its signature
    admits no absolute position or velocity. Returns the virtual
    acceleration along with the nominal and avoidance components for
    recording. ``udot_mode`` selects the u-derivative source:
    ``"backward_diff"`` (default) or ``"jerk_feedforward"`` for
    noise-sensitive runs.
    """
    u_b = outer_loop_follower(meas, ref, gains)
    u_c = collision_term(meas, cp, gains)
    u = u_b + u_c
    if udot_mode == "jerk_feedforward":
        u_dot = np.array(ref.jerk, dtype=float)
    elif udot_mode == "backward_diff":
        u_dot = estimate_udot(u, prev_u, dt_ctrl, ref.jerk)
    else:
        raise ValueError(f"unknown udot_mode {udot_mode!r}")
    return VirtualAcceleration(u=u, u_dot=u_dot), u_b, u_c
