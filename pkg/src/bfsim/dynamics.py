"""Quadrotor rigid-body integration under zero-order-hold inputs.

State is position/velocity in the NED inertial frame plus a body-to-
inertial rotation matrix. The plant inputs are total thrust magnitude and
body angular velocity; with both held constant over a step the attitude
propagates exactly through the rotation exponential, and the translation
is integrated with classical RK4 using the exactly-propagated thrust
direction at the stage times. That keeps the attitude on SO(3) without
any re-projection.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NonFiniteState
from .geometry import E3, is_rotation, so3_exp

#: largest admissible physics step [s]
MAX_STEP = 0.01


@dataclass(frozen=True)
class QuadrotorParams:
    mass: float = 1.0
    gravity: float = 9.81

    def __post_init__(self):
        if self.mass <= 0.0:
            raise ValueError(f"mass must be positive, got {self.mass}")
        if self.gravity <= 0.0:
            raise ValueError(f"gravity must be positive, got {self.gravity}")


@dataclass(frozen=True)
class QuadrotorState:
    """Inertial position [m], velocity [m/s], and attitude rotation matrix."""

    p: np.ndarray
    v: np.ndarray
    R: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "p", np.asarray(self.p, dtype=float))
        object.__setattr__(self, "v", np.asarray(self.v, dtype=float))
        object.__setattr__(self, "R", np.asarray(self.R, dtype=float))
        if not (np.isfinite(self.p).all() and np.isfinite(self.v).all()
                and np.isfinite(self.R).all()):
            raise NonFiniteState("state contains non-finite components")


@dataclass(frozen=True)
class ControlInput:
    """Total thrust magnitude [N] and body angular velocity [rad/s]."""

    thrust: float
    omega: np.ndarray

    def __post_init__(self):
        if not self.thrust >= 0.0:
            raise ValueError(f"thrust must be non-negative, got {self.thrust}")
        object.__setattr__(self, "omega", np.asarray(self.omega, dtype=float))


def step_arrays(p: np.ndarray, v: np.ndarray, R: np.ndarray,
                thrust: np.ndarray, omega: np.ndarray,
                mass: np.ndarray, gravity: float, dt: float
                ) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Advance a batch of vehicles one step; shapes (n,3), (n,3), (n,3,3).

    Inputs are held constant over the step. No validation: this is the
    engine's hot path, callers guarantee ``0 < dt <= MAX_STEP``.
    """
    half = so3_exp(omega, 0.5 * dt)
    r_half = R @ half
    r_full = r_half @ half

    # specific force g*e3 - (T/m) * (R e3) at the three RK4 stage times
    tm = (thrust / mass)[:, None]
    ge3 = gravity * E3
    a0 = ge3 - tm * R[:, :, 2]
    ah = ge3 - tm * r_half[:, :, 2]
    a1 = ge3 - tm * r_full[:, :, 2]

    p_new = p + dt * v + (dt * dt / 6.0) * (a0 + 2.0 * ah)
    v_new = v + (dt / 6.0) * (a0 + 4.0 * ah + a1)
    return p_new, v_new, r_full


def step(state: QuadrotorState, inp: ControlInput, params: QuadrotorParams,
         dt: float) -> QuadrotorState:
    """One zero-order-hold step of the rigid-body model.

    Raises
    ------
    NonFiniteState
        If the propagated state blew up (via the state constructor).
    """
    if not 0.0 < dt <= MAX_STEP:
        raise ValueError(f"dt must be in (0, {MAX_STEP}], got {dt}")
    p, v, R = step_arrays(state.p[None], state.v[None], state.R[None],
                          np.array([inp.thrust]), inp.omega[None],
                          np.array([params.mass]), params.gravity, dt)
    return QuadrotorState(p=p[0], v=v[0], R=R[0])


def reference_step(state: QuadrotorState, inp: ControlInput,
                   params: QuadrotorParams, dt: float,
                   substeps: int) -> QuadrotorState:
    """Brute-force oracle: explicit Euler at dt/substeps with re-orthonormalization.

    Slow and deliberately simple; exists only to cross-check :func:`step`
    in tests. Requires ``substeps >= 1000`` so the oracle is meaningfully
    finer than any admissible RK4 step.
    """
    if substeps < 1000:
        raise ValueError(f"substeps must be >= 1000, got {substeps}")
    if dt <= 0.0:
        raise ValueError(f"dt must be positive, got {dt}")
    h = dt / substeps
    g = params.gravity
    tm = inp.thrust / params.mass
    wx, wy, wz = (float(inp.omega[0]), float(inp.omega[1]), float(inp.omega[2]))

    px, py, pz = (float(state.p[0]), float(state.p[1]), float(state.p[2]))
    vx, vy, vz = (float(state.v[0]), float(state.v[1]), float(state.v[2]))
    r = [[float(state.R[i, j]) for j in range(3)] for i in range(3)]

    for _ in range(substeps):
        ax = -tm * r[0][2]
        ay = -tm * r[1][2]
        az = g - tm * r[2][2]
        px += h * vx
        py += h * vy
        pz += h * vz
        vx += h * ax
        vy += h * ay
        vz += h * az
        # R <- R + h * R [w]x, column by column
        c0 = (r[0][1] * wz - r[0][2] * wy,
              r[1][1] * wz - r[1][2] * wy,
              r[2][1] * wz - r[2][2] * wy)
        c1 = (r[0][2] * wx - r[0][0] * wz,
              r[1][2] * wx - r[1][0] * wz,
              r[2][2] * wx - r[2][0] * wz)
        c2 = (r[0][0] * wy - r[0][1] * wx,
              r[1][0] * wy - r[1][1] * wx,
              r[2][0] * wy - r[2][1] * wx)
        for i in range(3):
            r[i][0] += h * c0[i]
            r[i][1] += h * c1[i]
            r[i][2] += h * c2[i]
        _orthonormalize_columns(r)

    out = QuadrotorState(p=np.array([px, py, pz]), v=np.array([vx, vy, vz]),
                         R=np.array(r))
    if not np.isfinite(out.p).all():
        raise NonFiniteState("reference integration diverged")
    return out


def _orthonormalize_columns(r: list[list[float]]) -> None:
    """Gram-Schmidt the columns of a 3x3 matrix in place (right-handed)."""
    n0 = math.sqrt(r[0][0] ** 2 + r[1][0] ** 2 + r[2][0] ** 2)
    for i in range(3):
        r[i][0] /= n0
    dot01 = r[0][0] * r[0][1] + r[1][0] * r[1][1] + r[2][0] * r[2][1]
    for i in range(3):
        r[i][1] -= dot01 * r[i][0]
    n1 = math.sqrt(r[0][1] ** 2 + r[1][1] ** 2 + r[2][1] ** 2)
    for i in range(3):
        r[i][1] /= n1
    r[0][2] = r[1][0] * r[2][1] - r[2][0] * r[1][1]
    r[1][2] = r[2][0] * r[0][1] - r[0][0] * r[2][1]
    r[2][2] = r[0][0] * r[1][1] - r[1][0] * r[0][1]


def assert_valid_attitude(R: np.ndarray, tol: float = 1e-9) -> None:
    """Raise if ``R`` has drifted off SO(3) beyond ``tol``."""
    if not is_rotation(R, tol):
        raise NonFiniteState("attitude matrix left SO(3)")
