"""Rotation and rigid-transform algebra.

Transforms are plain 4x4 homogeneous ``numpy`` arrays and rotations are 3x3
arrays.  Orientation in a 6-vector pose ``[x, y, z, roll, pitch, yaw]`` uses
fixed-axis X-Y-Z angles, i.e. ``R = Rz(yaw) @ Ry(pitch) @ Rx(roll)``.
"""

import math

import numpy as np

# below this the rotation angle is treated as zero
ZERO_ANGLE_TOL = 1e-9
# within this of pi the antipodal axis formula is used
PI_ANGLE_TOL = 1e-6


def rotx(a):
    c, s = math.cos(a), math.sin(a)
    return np.array([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])


def roty(a):
    c, s = math.cos(a), math.sin(a)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


def rotz(a):
    c, s = math.cos(a), math.sin(a)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def skew(v):
    return np.array([[0.0, -v[2], v[1]], [v[2], 0.0, -v[0]], [-v[1], v[0], 0.0]])


def make_transform(rotation=None, translation=None):
    """Assemble a 4x4 homogeneous transform from its parts."""
    T = np.eye(4)
    if rotation is not None:
        T[:3, :3] = rotation
    if translation is not None:
        T[:3, 3] = translation
    return T


def translation(x, y=0.0, z=0.0):
    return make_transform(translation=(x, y, z))


def compose(*transforms):
    """Product ``T1 @ T2 @ ...`` of homogeneous transforms."""
    out = transforms[0]
    for T in transforms[1:]:
        out = out @ T
    return out


def inverse(T):
    """Closed-form inverse of a rigid transform."""
    R = T[:3, :3]
    out = np.eye(4)
    out[:3, :3] = R.T
    out[:3, 3] = -R.T @ T[:3, 3]
    return out


def euler_to_rotation(u):
    """Rotation matrix of fixed-axis angles ``u = (roll, pitch, yaw)``."""
    cr, sr = math.cos(u[0]), math.sin(u[0])
    cp, sp = math.cos(u[1]), math.sin(u[1])
    cy, sy = math.cos(u[2]), math.sin(u[2])
    return np.array([
        [cy * cp, cy * sp * sr - sy * cr, cy * sp * cr + sy * sr],
        [sy * cp, sy * sp * sr + cy * cr, sy * sp * cr - cy * sr],
        [-sp, cp * sr, cp * cr],
    ])


def rotation_to_euler(R):
    """Inverse of :func:`euler_to_rotation` away from pitch = +-pi/2."""
    return np.array([
        math.atan2(R[2, 1], R[2, 2]),
        -math.atan2(R[2, 0], math.sqrt(R[2, 1] ** 2 + R[2, 2] ** 2)),
        math.atan2(R[1, 0], R[0, 0]),
    ])


def transform_to_deviation(T):
    """Map a transform to ``[x, y, z, roll, pitch, yaw]``.

    This is the deviation vector used to measure how far a closed kinematic
    chain is from closing; it is also how object poses are read back from
    transforms.
    """
    T = np.asarray(T)
    out = np.empty(6)
    out[:3] = T[:3, 3]
    out[3:] = rotation_to_euler(T)
    return out


def pose_to_transform(xi):
    """Realize a 6-vector pose as a homogeneous transform."""
    xi = np.asarray(xi, dtype=float)
    return make_transform(euler_to_rotation(xi[3:]), xi[:3])


def _vee_antisym(R):
    return np.array([R[2, 1] - R[1, 2], R[0, 2] - R[2, 0], R[1, 0] - R[0, 1]])


def rotation_angle(R):
    """Canonical rotation angle in ``[0, pi]``.

    Equal to ``arccos((tr(R) - 1) / 2)`` but evaluated as an ``atan2`` of the
    sine and cosine parts, which stays accurate near 0 and pi where arccos
    loses half the significant digits.
    """
    c = (R[0, 0] + R[1, 1] + R[2, 2] - 1.0) / 2.0
    s = 0.5 * float(np.linalg.norm(_vee_antisym(R)))
    return math.atan2(s, c)


def _antipodal_axis(R, theta, w):
    # Near pi: the symmetric part is cos(t) I + (1 - cos(t)) w w^T, so any
    # column k gives (1 - cos(t)) w_k w.  At t = pi this is exactly the
    # (1 + r11) column formula.  Column 0 unless 1 + r11 is degenerate.
    c = math.cos(theta)
    B = 0.5 * (R + R.T) - c * np.eye(3)
    k = 0 if 1.0 + R[0, 0] >= 1e-6 else int(np.argmax(np.diag(B)))
    axis = B[:, k] / math.sqrt((1.0 - c) * B[k, k])
    if axis @ w < 0.0:
        axis = -axis
    return axis


def rotation_to_expcoords(R):
    """Exponential coordinates ``phi = axis * angle`` of a rotation, ``|phi| <= pi``."""
    R = np.asarray(R)
    theta = rotation_angle(R)
    w = _vee_antisym(R)
    if theta < ZERO_ANGLE_TOL:
        # first order; exactly zero for the identity
        return 0.5 * w
    if math.pi - theta < PI_ANGLE_TOL:
        return _antipodal_axis(R, theta, w) * theta
    return w * (theta / (2.0 * math.sin(theta)))


def expcoords_to_rotation(phi):
    """Rodrigues formula."""
    phi = np.asarray(phi, dtype=float)
    theta = math.sqrt(phi @ phi)
    if theta < ZERO_ANGLE_TOL:
        return np.eye(3) + skew(phi)
    K = skew(phi / theta)
    return np.eye(3) + math.sin(theta) * K + (1.0 - math.cos(theta)) * (K @ K)
