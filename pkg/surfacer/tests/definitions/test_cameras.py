import numpy as np
import pytest

from surfacer.definitions import cameras
from surfacer.definitions import errors


def test_look_at_centers_target():
    """Should project the look-at target onto the principal point."""
    rotation, translation = cameras.look_at(np.array([0.0, 0.0, -3.0]), np.zeros(3))
    view = cameras.CameraView(
        intrinsics=cameras.make_intrinsics(32, 24, 60.0),
        rotation=rotation,
        translation=translation,
        width=32,
        height=24,
    )
    local = rotation @ np.zeros(3) + translation
    assert local[2] == pytest.approx(3.0)
    assert local[0] == pytest.approx(0.0)
    assert local[1] == pytest.approx(0.0)
    assert np.allclose(view.center, [0.0, 0.0, -3.0])


def test_make_intrinsics_focal():
    """Should derive the focal length from the horizontal field of view."""
    intrinsics = cameras.make_intrinsics(100, 50, 90.0)
    assert intrinsics[0, 0] == pytest.approx(50.0)
    assert intrinsics[0, 2] == pytest.approx(49.5)
    assert intrinsics[1, 2] == pytest.approx(24.5)


def test_camera_rejects_improper_rotation():
    """Should reject reflections posing as rotations."""
    with pytest.raises(errors.InvalidInputError):
        cameras.CameraView(
            intrinsics=cameras.make_intrinsics(8, 8, 60.0),
            rotation=np.diag([1.0, 1.0, -1.0]),
            translation=np.zeros(3),
            width=8,
            height=8,
        )


def test_ray_requires_unit_direction():
    """Should reject rays whose direction is not normalized."""
    with pytest.raises(errors.InvalidInputError):
        cameras.Ray(origin=np.zeros(3), direction=np.array([0.0, 0.0, 2.0]))
