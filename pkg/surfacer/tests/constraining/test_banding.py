import numpy as np
import pytest
from pytest import mark

from surfacer import auditing
from surfacer import constraining
from surfacer import fusing
from surfacer.definitions import errors
from surfacer.tests import factories

BandLabel = constraining.BandLabel


def _plane_grid(observed_below: float = 10.0) -> "fusing.TsdfGrid":
    """Get a grid of the plane z = 0 with voxels above a height unobserved."""
    spec = fusing.GridSpec(origin=np.full(3, -1.0), voxel_size=0.1, dims=(21, 21, 21))
    x, y, z = np.meshgrid(*spec.axes, indexing="ij")
    weights = (z <= observed_below).astype(float)
    return fusing.TsdfGrid.from_values(spec, z / 0.4, truncation=0.4, weights=weights)


@mark.parametrize(
    "point, expected",
    [
        ((0.0, 0.0, 0.05), BandLabel.ON_SURFACE),
        ((0.0, 0.0, -0.1), BandLabel.ON_SURFACE),
        ((0.0, 0.0, 0.2), BandLabel.OFF_SURFACE),
        ((0.0, 0.0, 0.6), BandLabel.OUTSIDE),
        ((0.0, 0.0, -0.7), BandLabel.OUTSIDE),
        ((3.0, 0.0, 0.0), BandLabel.OUTSIDE),
    ],
)
def test_classify_points(point: tuple, expected: "constraining.BandLabel"):
    """Should label points by their normalized distance to the plane."""
    classification = constraining.classify_points(_plane_grid(), 0.3, np.array([point]))
    assert classification.labels[0] == expected


def test_classify_unobserved():
    """Should label points whose support voxels were never observed."""
    grid = _plane_grid(observed_below=0.25)
    classification = constraining.classify_points(
        grid, 0.3, np.array([[0.0, 0.0, 0.65]])
    )
    assert classification.labels[0] == BandLabel.UNOBSERVED


def test_classify_single_gaussian():
    """Should label one Gaussian by its center."""
    cloud = factories.make_cloud(1)
    cloud.centers[0] = [0.0, 0.0, 0.02]
    assert constraining.classify(_plane_grid(), 0.3, cloud[0]) == BandLabel.ON_SURFACE


def test_remove_outliers_report():
    """Should drop outside Gaussians and report label counts."""
    cloud = factories.make_cloud(4)
    cloud.centers[:] = [[0, 0, 0.05], [0, 0, 0.2], [0, 0, -0.8], [0, 0, 0.65]]
    grid = _plane_grid(observed_below=0.45)
    kept_cloud, report, kept = constraining.remove_outliers(cloud, grid, 0.3)
    assert list(kept) == [0, 1, 3]
    assert report.removed == (2,)
    assert (report.on_surface, report.off_surface) == (1, 1)
    assert (report.outside, report.unobserved) == (1, 1)
    assert len(kept_cloud) == 3
    assert report.to_line(500) == "iter=500 removed=1 on=1 off=1 outside=1 unobserved=1"


def test_remove_unobserved():
    """Should also drop unobserved Gaussians when asked to."""
    cloud = factories.make_cloud(2)
    cloud.centers[:] = [[0, 0, 0.05], [0, 0, 0.65]]
    grid = _plane_grid(observed_below=0.45)
    kept_cloud, report, _ = constraining.remove_outliers(
        cloud, grid, 0.3, remove_unobserved=True
    )
    assert len(kept_cloud) == 1
    assert report.removed == (1,)


def test_removal_soundness():
    """Should leave no outside Gaussians after removal."""
    result = auditing.audit_removal_soundness()
    assert result.passed, result.detail


def test_scp_loss_requires_gaussians():
    """Should reject empty collections and mismatched classifications."""
    cloud = factories.make_cloud(3)
    classification = constraining.classify_cloud(_plane_grid(), 0.3, cloud)
    with pytest.raises(errors.InvalidInputError):
        constraining.scp_loss(cloud.select([]), classification.select([]))
    with pytest.raises(errors.InvalidInputError):
        constraining.scp_loss(cloud.select([0]), classification)
