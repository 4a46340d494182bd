import numpy as np
import pytest

from surfacer import auditing
from surfacer import rendering
from surfacer.definitions import cameras
from surfacer.definitions import errors


def test_plane_normals_face_camera():
    """Should derive a constant camera-facing normal from a fronto-parallel plane."""
    intrinsics = cameras.make_intrinsics(10, 10, 60.0)
    normals, valid = rendering.depth_to_normal(np.full((10, 10), 2.0), intrinsics)
    assert valid.all()
    assert np.allclose(normals[valid], [0.0, 0.0, -1.0])


def test_invalid_depth_spreads_to_stencil():
    """Should invalidate pixels whose stencil touches a missing depth."""
    intrinsics = cameras.make_intrinsics(10, 10, 60.0)
    depth = np.full((10, 10), 2.0)
    depth[5, 5] = 0.0
    normals, valid = rendering.depth_to_normal(depth, intrinsics)
    assert not valid[5, 5] and not valid[4, 5] and not valid[5, 6]
    assert valid[0, 0]
    assert np.all(normals[~valid] == 0.0)


def test_depth_to_normal_too_small():
    """Should reject rasters narrower than two pixels."""
    with pytest.raises(errors.InvalidInputError):
        rendering.depth_to_normal(np.ones((1, 5)), cameras.make_intrinsics(5, 1, 60.0))


def test_normal_smooth_loss_edges():
    """Should ignore disagreements on strong image edges."""
    rendered = np.zeros((4, 4, 3))
    rendered[..., 2] = -1.0
    derived = np.zeros((4, 4, 3))
    derived[..., 0] = -1.0
    flat = np.full((4, 4, 3), 0.5)
    loss, gradient = rendering.normal_smooth_loss(rendered, derived, flat)
    assert loss == pytest.approx(2.0)
    assert gradient.shape == rendered.shape

    empty, _ = rendering.normal_smooth_loss(
        rendered, derived, flat, mask=np.zeros((4, 4), bool)
    )
    assert empty == 0.0


def test_normal_smooth_parameter_gradients():
    """Should carry normal smoothness gradients back to every parameter."""
    result = auditing.audit_normal_smooth_gradient()
    assert result.passed, result.detail
