"""Vector, rotation, and bearing primitives.

All inertial quantities follow a north-east-down (NED) convention and the
body frame is front-right-down (FRD), so gravity points along +z and hover
thrust along -body-z. Functions take and return plain ``numpy`` float
arrays; unit vectors are renormalized where noted rather than wrapped in a
dedicated class.
"""
from __future__ import annotations

import numpy as np

from .errors import CoincidentAgents, DegenerateYaw

#: inertial down axis (NED)
E3 = np.array([0.0, 0.0, 1.0])

#: projector onto the horizontal plane, pi_{e3} = I - e3 e3^T
PI_E3 = np.diag([1.0, 1.0, 0.0])

#: default minimum separation below which a bearing is undefined [m]
DEFAULT_MIN_SEPARATION = 1e-6

#: below this rotation angle [rad] the Rodrigues coefficients use series
_SMALL_ANGLE = 1e-4


def skew(v: np.ndarray) -> np.ndarray:
    """Skew-symmetric matrix ``[v]x`` such that ``skew(v) @ w == cross(v, w)``."""
    x, y, z = float(v[0]), float(v[1]), float(v[2])
    return np.array([
        [0.0, -z, y],
        [z, 0.0, -x],
        [-y, x, 0.0],
    ])


def projector(y: np.ndarray) -> np.ndarray:
    """Orthogonal projector ``I - y y^T`` onto the plane normal to unit ``y``.

    ``y`` must already be unit length; callers normalize, this does not.
    """
    y = np.asarray(y, dtype=float)
    return np.eye(3) - np.outer(y, y)


def normalize(v: np.ndarray, min_norm: float = 1e-15) -> np.ndarray:
    """Return ``v / ||v||``; raises ``ValueError`` on (near-)zero input."""
    v = np.asarray(v, dtype=float)
    n = float(np.linalg.norm(v))
    if n < min_norm:
        raise ValueError(f"cannot normalize vector of norm {n:.3e}")
    return v / n


def bearing(p_i: np.ndarray, p_j: np.ndarray,
            min_separation: float = DEFAULT_MIN_SEPARATION) -> np.ndarray:
    """Unit vector from agent ``i`` toward agent ``j`` in the inertial frame.

    Raises
    ------
    CoincidentAgents
        If the separation is below ``min_separation``; the formation has
        degenerated and no bearing exists.
    """
    rel = np.asarray(p_j, dtype=float) - np.asarray(p_i, dtype=float)
    dist = float(np.linalg.norm(rel))
    if dist < min_separation:
        raise CoincidentAgents(
            f"separation {dist:.3e} m below threshold {min_separation:.3e} m")
    return rel / dist


def rot_y(theta: float) -> np.ndarray:
    """Right-handed rotation by ``theta`` [rad] about the inertial y-axis."""
    c, s = np.cos(theta), np.sin(theta)
    return np.array([
        [c, 0.0, s],
        [0.0, 1.0, 0.0],
        [-s, 0.0, c],
    ])


def so3_exp(omega: np.ndarray, dt: float = 1.0) -> np.ndarray:
    """Rotation matrix ``exp([omega]x * dt)`` via the Rodrigues closed form.

    Accepts a single ``(3,)`` vector or a batch ``(n, 3)``; the result has a
    matching ``(3, 3)`` or ``(n, 3, 3)`` shape. Below a small total angle the
    trigonometric coefficients switch to their series expansions, so the
    identity is returned exactly at zero rotation.
    """
    w = np.asarray(omega, dtype=float) * dt
    single = w.ndim == 1
    w = np.atleast_2d(w)
    theta2 = np.einsum("ij,ij->i", w, w)
    theta = np.sqrt(theta2)

    small = theta < _SMALL_ANGLE
    safe2 = np.where(small, 1.0, theta2)
    # a = sin(t)/t, b = (1-cos(t))/t^2, c = cos(t)
    a = np.where(small, 1.0 - theta2 / 6.0 + theta2 * theta2 / 120.0,
                 np.sin(theta) / np.sqrt(safe2))
    b = np.where(small, 0.5 - theta2 / 24.0 + theta2 * theta2 / 720.0,
                 (1.0 - np.cos(theta)) / safe2)
    c = np.cos(theta)

    x, y, z = w[:, 0], w[:, 1], w[:, 2]
    R = np.empty((w.shape[0], 3, 3))
    R[:, 0, 0] = c + b * x * x
    R[:, 0, 1] = b * x * y - a * z
    R[:, 0, 2] = b * x * z + a * y
    R[:, 1, 0] = b * x * y + a * z
    R[:, 1, 1] = c + b * y * y
    R[:, 1, 2] = b * y * z - a * x
    R[:, 2, 0] = b * x * z - a * y
    R[:, 2, 1] = b * y * z + a * x
    R[:, 2, 2] = c + b * z * z
    return R[0] if single else R


def attitude_from_thrust_dir(r3_star: np.ndarray, yaw_psi: float) -> np.ndarray:
    """Full attitude from a desired body-z axis plus a yaw angle.

    Column 3 equals ``r3_star``; column 1 is the unit projection of the yaw
    heading ``(cos psi, sin psi, 0)`` onto the plane orthogonal to
    ``r3_star``; column 2 completes the right-handed triad.

    Raises
    ------
    DegenerateYaw
        If ``r3_star`` is (anti)parallel to the yaw heading, which leaves
        the remaining columns undefined.
    """
    r3 = normalize(r3_star)
    heading = np.array([np.cos(yaw_psi), np.sin(yaw_psi), 0.0])
    align = float(np.dot(r3, heading))
    if abs(align) >= 1.0 - 1e-9:
        raise DegenerateYaw(
            f"thrust axis parallel to yaw heading (|dot| = {abs(align):.12f})")
    c1 = normalize(heading - align * r3)
    c2 = np.cross(r3, c1)
    return np.column_stack([c1, c2, r3])


def rotation_from_rpy(roll: float, pitch: float, yaw: float) -> np.ndarray:
    """Body-to-inertial rotation from Z-Y-X intrinsic roll/pitch/yaw [rad]."""
    cr, sr = np.cos(roll), np.sin(roll)
    cp, sp = np.cos(pitch), np.sin(pitch)
    cy, sy = np.cos(yaw), np.sin(yaw)
    rz = np.array([[cy, -sy, 0.0], [sy, cy, 0.0], [0.0, 0.0, 1.0]])
    ry = np.array([[cp, 0.0, sp], [0.0, 1.0, 0.0], [-sp, 0.0, cp]])
    rx = np.array([[1.0, 0.0, 0.0], [0.0, cr, -sr], [0.0, sr, cr]])
    return rz @ ry @ rx


def rotation_defect(R: np.ndarray) -> float:
    """Frobenius norm of ``R^T R - I``; zero for an exact rotation."""
    R = np.asarray(R, dtype=float)
    return float(np.linalg.norm(R.T @ R - np.eye(3)))


def is_rotation(R: np.ndarray, tol: float = 1e-9) -> bool:
    """True if ``R`` is orthonormal with determinant one, within ``tol``."""
    return rotation_defect(R) <= tol and abs(float(np.linalg.det(R)) - 1.0) <= tol
