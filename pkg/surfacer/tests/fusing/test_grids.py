import pathlib

import numpy as np
import pytest

from surfacer import fusing
from surfacer.definitions import errors


def _sphere_grid(resolution: int = 24) -> "fusing.TsdfGrid":
    spec = fusing.GridSpec.from_bounds(
        np.full(3, -1.0), np.full(3, 1.0), resolution, 0.1
    )
    return fusing.TsdfGrid.from_function(
        spec, lambda p: np.linalg.norm(p, axis=-1) - 0.6, truncation=3 * spec.voxel_size
    )


def test_from_bounds_covers_padded_box():
    """Should place voxel centers over the padded bounds at the requested resolution."""
    spec = fusing.GridSpec.from_bounds(np.zeros(3), np.array([2.0, 1.0, 1.0]), 21, 0.0)
    assert spec.voxel_size == pytest.approx(0.1)
    assert spec.dims[0] == 21
    assert np.all(spec.origin <= 1e-9)
    assert np.all(spec.upper >= np.array([2.0, 1.0, 1.0]) - 1e-9)


def test_invalid_spec():
    """Should reject grids without a single trilinear cell."""
    with pytest.raises(errors.InvalidInputError):
        fusing.GridSpec(origin=np.zeros(3), voxel_size=0.1, dims=(1, 4, 4))


def test_sample_points_outside_grid():
    """Should sample +1 and report no support outside the grid."""
    grid = _sphere_grid()
    values, observed = fusing.sample_points(grid, np.array([[5.0, 0.0, 0.0]]))
    assert values[0] == 1.0
    assert not observed[0]
    assert not fusing.contains_points(grid, np.array([[5.0, 0.0, 0.0]]))[0]


def test_sample_at_voxel_center():
    """Should return stored values exactly at voxel centers."""
    grid = _sphere_grid()
    point = np.array(grid.spec.voxel_center(3, 5, 7))
    assert fusing.sample_trilinear(grid, point) == pytest.approx(grid.values[3, 5, 7])


def test_gradient_points_outward():
    """Should point finite difference gradients away from the sphere center."""
    grid = _sphere_grid(32)
    points = np.array([[0.6, 0.0, 0.0], [0.0, -0.6, 0.0], [0.0, 0.0, 0.55]])
    gradients, supported = fusing.gradient_points(grid, points)
    assert supported.all()
    directions = gradients / np.linalg.norm(gradients, axis=1, keepdims=True)
    expected = points / np.linalg.norm(points, axis=1, keepdims=True)
    assert np.all(np.sum(directions * expected, axis=1) > 0.99)


def test_gradient_fd_boundary():
    """Should raise a boundary error when the stencil leaves the grid."""
    grid = _sphere_grid()
    with pytest.raises(errors.GridBoundaryError):
        fusing.gradient_fd(grid, grid.origin)


def test_write_and_read_grid(tmp_path: pathlib.Path):
    """Should restore a grid from its binary file bit for bit."""
    grid = _sphere_grid(12)
    path = fusing.write_grid(grid, tmp_path / "nested" / "sphere.tsdf")
    loaded = fusing.read_grid(path)
    assert loaded.dims == grid.dims
    assert loaded.truncation == grid.truncation
    assert loaded.voxel_size == grid.voxel_size
    assert np.array_equal(loaded.origin, grid.origin)
    assert np.array_equal(loaded.values, grid.values)
    assert np.array_equal(loaded.weights, grid.weights)


def test_read_grid_rejects_foreign_file(tmp_path: pathlib.Path):
    """Should refuse files that do not carry the grid header."""
    path = tmp_path / "other.tsdf"
    path.write_bytes(b"\x00" * 256)
    with pytest.raises(errors.InvalidInputError):
        fusing.read_grid(path)
