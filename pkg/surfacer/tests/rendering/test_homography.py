import numpy as np
import pytest

from surfacer import auditing
from surfacer import geometry
from surfacer import rendering
from surfacer.definitions import cameras
from surfacer.definitions import errors
from surfacer.tests import factories

SIZE = 32


def _neighbor(eye=(0.5, 0.0, 0.0)) -> "cameras.CameraView":
    rotation, translation = cameras.look_at(np.array(eye), np.array([0.0, 0.0, 2.0]))
    reference = factories.make_view(size=SIZE)
    return cameras.CameraView(
        intrinsics=reference.intrinsics,
        rotation=rotation,
        translation=translation,
        width=SIZE,
        height=SIZE,
        name="neighbor",
    )


def _planes(normal: np.ndarray, distance: float) -> "rendering.PlaneMaps":
    return rendering.PlaneMaps(
        normals=np.broadcast_to(normal, (SIZE, SIZE, 3)).copy(),
        distances=np.full((SIZE, SIZE), distance),
        valid=np.ones((SIZE, SIZE), dtype=bool),
    )


def test_homography_matches_projection():
    """Should warp a pixel to the projection of its point on the plane."""
    reference, neighbor = factories.make_view(size=SIZE), _neighbor()
    homography = rendering.compute_homography(
        reference, neighbor, np.array([0.0, 0.0, 1.0]), 2.0
    )
    point = 2.0 * reference.intrinsics_inverse @ np.array([10.0, 20.0, 1.0])
    expected, _ = geometry.project_point(
        neighbor.intrinsics, neighbor.rotation, neighbor.translation, point
    )
    assert np.allclose(homography.apply(np.array([10.0, 20.0])), expected)
    back = homography.inverse().apply(homography.apply(np.array([10.0, 20.0])))
    assert np.allclose(back, [10.0, 20.0])


def test_degenerate_plane():
    """Should reject planes through the camera center."""
    with pytest.raises(errors.InvalidInputError):
        rendering.compute_homography(
            factories.make_view(size=SIZE), _neighbor(), np.array([0.0, 0.0, 1.0]), 0.0
        )


def test_consistent_planes_have_no_loss():
    """Should return every pixel home when both views agree on the plane."""
    reference, neighbor = factories.make_view(size=SIZE), _neighbor()
    world_normal = np.array([0.0, 0.0, 1.0])
    result = rendering.multiview_geom_loss(
        reference,
        neighbor,
        _planes(world_normal, 2.0),
        _planes(neighbor.rotation @ world_normal, 2.0),
    )
    assert result.valid_count > 0
    assert result.loss == pytest.approx(0.0, abs=1e-8)


def test_inconsistent_planes_have_loss():
    """Should penalize and differentiate disagreeing planes."""
    reference, neighbor = factories.make_view(size=SIZE), _neighbor()
    world_normal = np.array([0.0, 0.0, 1.0])
    result = rendering.multiview_geom_loss(
        reference,
        neighbor,
        _planes(world_normal, 2.0),
        _planes(neighbor.rotation @ world_normal, 2.5),
    )
    assert result.loss > 0.1
    assert np.any(result.reference_distances != 0.0)
    assert np.any(result.neighbor_distances != 0.0)


def test_no_overlap():
    """Should report an empty loss when no pixel is valid."""
    reference, neighbor = factories.make_view(size=SIZE), _neighbor()
    planes = _planes(np.array([0.0, 0.0, 1.0]), 2.0)
    empty = rendering.PlaneMaps(
        planes.normals, planes.distances, np.zeros((SIZE, SIZE), bool)
    )
    result = rendering.multiview_geom_loss(reference, neighbor, empty, planes)
    assert result.empty and result.loss == 0.0


def test_nearest_neighbors():
    """Should order views by camera center distance."""
    views = [
        cameras.CameraView(
            intrinsics=cameras.make_intrinsics(8, 8, 60.0),
            rotation=np.eye(3),
            translation=-np.array([x, 0.0, 0.0]),
            width=8,
            height=8,
        )
        for x in (0.0, 1.0, 3.0)
    ]
    assert rendering.nearest_neighbors(views, 2) == [[1, 2], [0, 2], [1, 0]]
    assert rendering.nearest_neighbors(views[:2], 2) == [[1], [0]]


@pytest.mark.parametrize("name", ["multiview_gradient", "ncc_gradient"])
def test_plane_loss_gradients_match_finite_differences(name: str):
    """Should carry plane gradients through both renders to every parameter."""
    result = auditing.AUDITS[name]()
    assert result.passed, result.detail
