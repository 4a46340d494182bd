import dataclasses

import numpy as np
import pytest
from pytest import mark

from surfacer import auditing
from surfacer import rendering
from surfacer.definitions import errors
from surfacer.definitions import gaussians
from surfacer.tests import factories


def test_render_facing_gaussian():
    """Should blend a camera-facing Gaussian at its depth with its color."""
    output = rendering.render_view(factories.facing_cloud(2.0), factories.make_view())
    opacity = float(gaussians.sigmoid(np.array([2.0]))[0])
    center = (8, 8)
    assert output.depth[center] == pytest.approx(2.0)
    assert output.alpha[center] == pytest.approx(opacity, rel=0.05)
    assert np.allclose(
        output.rgb[center], output.alpha[center] * np.array([0.8, 0.4, 0.2])
    )
    assert output.normal[center][2] == pytest.approx(-1.0)


def test_render_background():
    """Should composite the background behind uncovered pixels."""
    cloud = factories.facing_cloud(2.0)
    cloud.centers[0] = [50.0, 0.0, 2.0]
    output = rendering.render_view(cloud, factories.make_view(), background=np.ones(3))
    assert np.allclose(output.rgb, 1.0)
    assert np.all(output.alpha == 0.0)


def test_render_behind_camera():
    """Should not draw Gaussians behind the near plane."""
    cloud = factories.facing_cloud(-2.0)
    output = rendering.render_view(cloud, factories.make_view())
    assert np.all(output.alpha == 0.0)


def test_render_invalid_inputs():
    """Should reject empty clouds and inverted clipping planes."""
    view = factories.make_view()
    with pytest.raises(errors.InvalidInputError):
        rendering.render_view(factories.facing_cloud().select([]), view)
    with pytest.raises(errors.InvalidInputError):
        rendering.render_view(factories.facing_cloud(), view, near=5.0, far=1.0)


def test_render_views_threads_identical():
    """Should render bit-identical rasters regardless of the worker count."""
    cloud = factories.make_cloud(30, spread=0.3)
    cloud.centers[:, 2] += 2.0
    views = [factories.make_view(name=f"v{i}") for i in range(3)]
    single = rendering.render_views(cloud, views, threads=1)
    multiple = rendering.render_views(cloud, views, threads=3)
    for a, b in zip(single, multiple):
        assert np.array_equal(a.rgb, b.rgb)
        assert np.array_equal(a.depth, b.depth)


def test_render_gradients_match_finite_differences():
    """Should backpropagate color and opacity gradients exactly."""
    result = auditing.audit_render_gradient()
    assert result.passed, result.detail


def test_distortion_matches_pairwise_sum():
    """Should evaluate the closed form of the pairwise depth spread."""
    cloud = factories.facing_cloud(2.0)
    behind = factories.facing_cloud(2.5)
    behind.opacity_logits[0] = 0.0
    both = gaussians.GaussianCloud.concatenate([cloud, behind])
    records = rendering.render_view(both, factories.make_view()).records

    loss, _, _ = rendering.depth_distortion_loss(records)
    covered = np.unique(records.pixels)
    expected = np.mean(
        [
            rendering.distortion.pixel_distortion(
                records.weights[records.pixels == p], records.depths[
                    records.pixels == p
                ]
            )
            for p in covered
        ]
    )
    assert loss == pytest.approx(expected)
    assert loss > 0


def _ray(weights: np.ndarray, depths: np.ndarray) -> "rendering.PixelRecords":
    count = len(weights)
    zeros = np.zeros(count)
    return rendering.PixelRecords(
        pixels=np.zeros(count, dtype=np.int64),
        gaussians=np.arange(count),
        depths=depths,
        responses=zeros,
        alphas=zeros,
        transmittance=zeros,
        weights=weights,
        clamped=np.zeros(count, dtype=bool),
        normals=np.zeros((count, 3)),
        signs=zeros,
        denominators=zeros,
        offsets=np.zeros((count, 3)),
        local=np.zeros((count, 3)),
    )


def test_distortion_gradients_on_one_ray():
    """Should differentiate the depth spread of a five-deep ray exactly."""
    rng = np.random.default_rng(4)
    records = _ray(rng.uniform(0.05, 0.3, size=5), np.sort(rng.uniform(1.0, 3.0, 5)))
    _, grad_weights, grad_depths = rendering.depth_distortion_loss(records)

    step = 1e-6
    for name, analytic in (("weights", grad_weights), ("depths", grad_depths)):
        values = getattr(records, name)
        numeric = []
        for i in range(len(values)):
            shift = np.zeros(len(values))
            shift[i] = step
            forward = dataclasses.replace(records, **{name: values + shift})
            backward = dataclasses.replace(records, **{name: values - shift})
            numeric.append(
                (
                    rendering.depth_distortion_loss(forward)[0]
                    - rendering.depth_distortion_loss(backward)[0]
                )
                / (2 * step)
            )
        assert np.allclose(analytic, numeric, rtol=1e-4, atol=1e-9), name


@mark.parametrize("name", ["rgb_gradient", "distortion_gradient"])
def test_parameter_gradients_match_finite_differences(name: str):
    """Should backpropagate center, scale, rotation and opacity gradients."""
    result = auditing.AUDITS[name]()
    assert result.passed, result.detail
