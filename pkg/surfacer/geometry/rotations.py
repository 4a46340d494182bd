"""Quaternion to rotation conversions and their derivatives."""
import numpy as np

from surfacer.definitions import errors

#: Tolerance on the quaternion norm accepted by the single-value conversion.
UNIT_TOLERANCE = 1e-6


def _rotation_from_unit(q: np.ndarray) -> np.ndarray:
    """Build rotation matrices from unit quaternions of shape (..., 4)."""
    w, x, y, z = q[..., 0], q[..., 1], q[..., 2], q[..., 3]
    return np.stack(
        [
            np.stack(
                [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)], -1
            ),
            np.stack(
                [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)], -1
            ),
            np.stack(
                [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)], -1
            ),
        ],
        axis=-2,
    )


def quat_to_rotation(q: np.ndarray) -> np.ndarray:
    """
    Convert a unit quaternion (w, x, y, z) into a 3x3 rotation matrix.

    :param q:
        Quaternion whose norm is within 1e-6 of one.
    :return:
        Proper orthonormal rotation matrix.
    """
    q = np.asarray(q, dtype=np.float64)
    norm = float(np.linalg.norm(q))
    if norm == 0.0:
        raise errors.InvalidInputError("Cannot convert a zero-norm quaternion.")
    if abs(norm - 1.0) > UNIT_TOLERANCE:
        raise errors.InvalidInputError(
            f"Quaternion norm {norm} is not within {UNIT_TOLERANCE} of one."
        )
    return _rotation_from_unit(q / norm)


def normalize_quaternions(quaternions: np.ndarray) -> np.ndarray:
    """Scale quaternions of shape (N, 4) to unit length."""
    norms = np.linalg.norm(quaternions, axis=-1, keepdims=True)
    if np.any(norms == 0.0):
        raise errors.InvalidInputError("Cannot normalize a zero-norm quaternion.")
    return quaternions / norms


def quaternions_to_rotations(quaternions: np.ndarray) -> np.ndarray:
    """Convert quaternions of shape (N, 4) to rotations of shape (N, 3, 3)."""
    return _rotation_from_unit(normalize_quaternions(np.asarray(quaternions, float)))


def quaternions_backward(
    quaternions: np.ndarray,
    grad_rotations: np.ndarray,
) -> np.ndarray:
    """
    Propagate rotation-matrix gradients back to raw quaternions.

    The conversion normalizes its input, so the returned gradient is
    orthogonal to each quaternion.

    :param quaternions:
        Raw quaternions of shape (N, 4).
    :param grad_rotations:
        Gradient of the loss with respect to each rotation, shape (N, 3, 3).
    """
    quaternions = np.asarray(quaternions, dtype=np.float64)
    norms = np.linalg.norm(quaternions, axis=-1, keepdims=True)
    unit = quaternions / norms
    w, x, y, z = unit[:, 0], unit[:, 1], unit[:, 2], unit[:, 3]
    g = grad_rotations

    grad_w = 2 * (
        -z * g[:, 0, 1] + y * g[:, 0, 2] + z * g[:, 1, 0]
        - x * g[:, 1, 2] - y * g[:, 2, 0] + x * g[:, 2, 1]
    )
    grad_x = 2 * (
        y * g[:, 0, 1] + z * g[:, 0, 2] + y * g[:, 1, 0] - 2 * x * g[:, 1, 1]
        - w * g[:, 1, 2] + z * g[:, 2, 0] + w * g[:, 2, 1] - 2 * x * g[:, 2, 2]
    )
    grad_y = 2 * (
        -2 * y * g[:, 0, 0] + x * g[:, 0, 1] + w * g[:, 0, 2] + x * g[:, 1, 0]
        + z * g[:, 1, 2] - w * g[:, 2, 0] + z * g[:, 2, 1] - 2 * y * g[:, 2, 2]
    )
    grad_z = 2 * (
        -2 * z * g[:, 0, 0] - w * g[:, 0, 1] + x * g[:, 0, 2] + w * g[:, 1, 0]
        - 2 * z * g[:, 1, 1] + y * g[:, 1, 2] + x * g[:, 2, 0] + y * g[:, 2, 1]
    )
    grad_unit = np.stack([grad_w, grad_x, grad_y, grad_z], axis=-1)
    radial = np.sum(grad_unit * unit, axis=-1, keepdims=True)
    return (grad_unit - radial * unit) / norms
