"""
Fast property audits of the numerical core.

Every audit builds a tiny problem whose answer is known in closed form (or by
finite differences) and compares it with what the package computes. The
selftest command runs them without pytest and the test suite runs them too.
"""
import dataclasses
import typing

import numpy as np

from surfacer import constraining
from surfacer import fusing
from surfacer import optimizing
from surfacer import rendering
from surfacer.definitions import cameras
from surfacer.definitions import gaussians


@dataclasses.dataclass(frozen=True)
class AuditResult:
    """Outcome of one audit."""

    name: str
    passed: bool
    #: Largest observed error or violation count, for display.
    detail: str

    def serialize(self) -> dict:
        """Serialize the object for output representation."""
        return dataclasses.asdict(self)


def _oracle_spec() -> "fusing.GridSpec":
    """Get a small grid in front of a camera at the origin looking down +z."""
    return fusing.GridSpec(
        origin=np.array([-0.2, -0.2, 1.5]),
        voxel_size=0.05,
        dims=(9, 9, 21),
    )


def _voxel_points(spec: "fusing.GridSpec") -> np.ndarray:
    """Get every voxel center of a grid, indexed [x, y, z]."""
    x, y, z = np.meshgrid(*spec.axes, indexing="ij")
    return np.stack([x, y, z], axis=-1)


Field = typing.Callable[[np.ndarray], np.ndarray]


def _affine_grid(
    spec: "fusing.GridSpec",
) -> typing.Tuple["fusing.TsdfGrid", Field, np.ndarray]:
    """Get a grid holding a multilinear field, the field and its linear part."""
    slope = np.array([0.3, -0.2, 0.5])

    def field(points: np.ndarray) -> np.ndarray:
        return points @ slope - 1.0 + 0.1 * points[..., 0] * points[..., 1]

    values = field(_voxel_points(spec))
    return fusing.TsdfGrid.from_values(spec, values, truncation=0.2), field, slope


def _random_cloud(
    rng: np.random.Generator,
    count: int,
    low: float,
    high: float,
) -> "gaussians.GaussianCloud":
    """Create Gaussians with random centers, scales, rotations and opacities."""
    rotations = rng.normal(size=(count, 4))
    return gaussians.GaussianCloud(
        centers=rng.uniform(low, high, size=(count, 3)),
        log_scales=np.log(rng.uniform(0.01, 0.1, size=(count, 3))),
        rotations=rotations / np.linalg.norm(rotations, axis=1, keepdims=True),
        opacity_logits=rng.normal(size=count),
        colors=rng.uniform(size=(count, 3)),
    )


def _sphere_grid(radius: float = 0.5) -> "fusing.TsdfGrid":
    """Get a fully observed grid of a sphere centered at the origin."""
    spec = fusing.GridSpec.from_bounds(np.full(3, -0.7), np.full(3, 0.7), 48, 0.05)
    return fusing.TsdfGrid.from_function(
        spec,
        lambda p: np.linalg.norm(p, axis=-1) - radius,
        truncation=4 * spec.voxel_size,
    )


def _relative_error(a: np.ndarray, b: np.ndarray) -> float:
    """Get the largest error relative to the magnitude of the reference."""
    scale = max(1.0, float(np.max(np.abs(b))))
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b)))) / scale


def audit_fusion_oracle() -> "AuditResult":
    """Fuse a constant depth plane and compare with the closed-form TSDF."""
    spec = _oracle_spec()
    truncation = 0.2
    view = cameras.CameraView(
        intrinsics=cameras.make_intrinsics(16, 16, 60.0),
        rotation=np.eye(3),
        translation=np.zeros(3),
        width=16,
        height=16,
        name="oracle",
    )
    grid = fusing.fuse_depth_maps([view], [np.full((16, 16), 2.0)], spec, truncation)

    z = _voxel_points(spec)[..., 2]
    observed = 2.0 - z >= -truncation
    expected = np.where(observed, np.clip((2.0 - z) / truncation, -1.0, 1.0), 1.0)
    error = float(np.max(np.abs(grid.values - expected)))
    weights_ok = bool(np.array_equal(grid.weights > 0, observed))
    return AuditResult(
        "fusion_oracle", error < 1e-9 and weights_ok, f"max error {error:.2e}"
    )


def audit_trilinear_oracle(seed: int = 0) -> "AuditResult":
    """Trilinear sampling reproduces multilinear fields exactly."""
    spec = _oracle_spec()
    grid, field, _ = _affine_grid(spec)
    rng = np.random.default_rng(seed)
    points = rng.uniform(spec.origin, spec.upper, size=(200, 3))
    values, _ = fusing.sample_points(grid, points)
    error = float(np.max(np.abs(values - field(points))))
    return AuditResult("trilinear_oracle", error < 1e-9, f"max error {error:.2e}")


def audit_gradient_oracle(seed: int = 0) -> "AuditResult":
    """Finite difference gradients match the analytic gradient of the field."""
    spec = _oracle_spec()
    grid, _, slope = _affine_grid(spec)
    rng = np.random.default_rng(seed)
    margin = 2 * spec.voxel_size
    points = rng.uniform(spec.origin + margin, spec.upper - margin, size=(100, 3))
    gradients, supported = fusing.gradient_points(grid, points)
    expected = slope + 0.1 * np.stack(
        [points[:, 1], points[:, 0], np.zeros(len(points))], axis=1
    )
    error = float(np.max(np.abs(gradients - expected)))
    return AuditResult(
        "gradient_oracle",
        bool(supported.all()) and error < 1e-6,
        f"max error {error:.2e}",
    )


def audit_projection_contraction(seed: int = 0) -> "AuditResult":
    """Projection moves in-band points closer to the zero level set."""
    grid = _sphere_grid()
    rng = np.random.default_rng(seed)
    directions = rng.normal(size=(300, 3))
    directions /= np.linalg.norm(directions, axis=1, keepdims=True)
    offsets = rng.uniform(-0.5, 0.5, size=(300, 1)) * grid.truncation
    points = directions * (0.5 + offsets)

    steps, moving = constraining.projection_steps(grid, points)
    before = np.abs(np.linalg.norm(points, axis=1) - 0.5)
    after = np.abs(np.linalg.norm(points + steps, axis=1) - 0.5)
    worse = int(np.count_nonzero(after > before + 0.25 * grid.voxel_size))
    contracted = float(after.mean()) < 0.5 * float(before.mean())
    return AuditResult(
        "projection_contraction",
        bool(moving.all()) and worse == 0 and contracted,
        f"mean distance {before.mean():.2e} -> {after.mean():.2e}",
    )


def audit_removal_soundness(seed: int = 0) -> "AuditResult":
    """Removal drops exactly the Gaussians labeled outside the band."""
    grid = _sphere_grid()
    rng = np.random.default_rng(seed)
    cloud = _random_cloud(rng, 400, -0.9, 0.9)
    labels = constraining.classify_cloud(grid, 0.3, cloud).labels
    kept_cloud, report, kept = constraining.remove_outliers(cloud, grid, 0.3)

    outside = constraining.BandLabel.OUTSIDE
    remaining = constraining.classify_cloud(grid, 0.3, kept_cloud).labels
    violations = int(np.count_nonzero(remaining == outside))
    violations += int(np.count_nonzero(labels[list(report.removed)] != outside))
    violations += int(np.count_nonzero(labels[kept] == outside))
    return AuditResult(
        "removal_soundness", violations == 0, f"{violations} violations"
    )


def _central_differences(
    function: typing.Callable[[np.ndarray], float],
    values: np.ndarray,
    indices: typing.Sequence[typing.Tuple[int, ...]],
    step: float = 1e-6,
) -> np.ndarray:
    """Differentiate a scalar function of an array at a few entries."""
    out = []
    for index in indices:
        shifted = values.copy()
        shifted[index] += step
        forward = function(shifted)
        shifted[index] -= 2 * step
        backward = function(shifted)
        out.append((forward - backward) / (2 * step))
    return np.array(out)


def audit_scp_gradient(seed: int = 0) -> "AuditResult":
    """The opacity constraint gradient matches finite differences."""
    grid = _sphere_grid()
    rng = np.random.default_rng(seed)
    cloud = _random_cloud(rng, 60, -0.6, 0.6)
    classification = constraining.classify_cloud(grid, 0.3, cloud)
    _, gradient = constraining.scp_loss(cloud, classification)

    def loss(logits: np.ndarray) -> float:
        changed = dataclasses.replace(cloud, opacity_logits=logits)
        return constraining.scp_loss(changed, classification)[0]

    indices = [(i,) for i in range(len(cloud))]
    numeric = _central_differences(loss, cloud.opacity_logits, indices)
    error = _relative_error(gradient, numeric)
    return AuditResult("scp_gradient", error < 1e-6, f"max error {error:.2e}")


def audit_flatten_gradient(seed: int = 0) -> "AuditResult":
    """The planarity penalty gradient matches finite differences."""
    rng = np.random.default_rng(seed)
    cloud = _random_cloud(rng, 20, -1.0, 1.0)
    _, gradient = optimizing.flatten_loss(cloud)

    def loss(log_scales: np.ndarray) -> float:
        changed = dataclasses.replace(cloud, log_scales=log_scales)
        return optimizing.flatten_loss(changed)[0]

    indices = [(i, a) for i in range(len(cloud)) for a in range(3)]
    numeric = _central_differences(loss, cloud.log_scales, indices)
    error = _relative_error(gradient[tuple(np.array(indices).T)], numeric)
    return AuditResult("flatten_gradient", error < 1e-6, f"max error {error:.2e}")


def audit_ssim_gradient(seed: int = 0) -> "AuditResult":
    """The structural similarity gradient matches finite differences."""
    rng = np.random.default_rng(seed)
    rendered = rng.uniform(size=(12, 12, 3))
    target = rng.uniform(size=(12, 12, 3))
    _, gradient = rendering.ssim(rendered, target)

    indices = [(0, 0, 0), (5, 6, 1), (11, 3, 2), (7, 11, 0)]
    numeric = _central_differences(
        lambda image: rendering.ssim(image, target)[0], rendered, indices
    )
    analytic = np.array([gradient[i] for i in indices])
    error = float(np.max(np.abs(analytic - numeric)))
    return AuditResult("ssim_gradient", error < 1e-7, f"max error {error:.2e}")


def audit_render_gradient(seed: int = 0) -> "AuditResult":
    """Splatting gradients of opacity and color match finite differences."""
    rng = np.random.default_rng(seed)
    view = cameras.CameraView(
        intrinsics=cameras.make_intrinsics(16, 16, 60.0),
        rotation=np.eye(3),
        translation=np.zeros(3),
        width=16,
        height=16,
        name="audit",
    )
    cloud = gaussians.GaussianCloud(
        centers=np.array([[0.0, 0.0, 2.0], [0.1, -0.05, 2.3]]),
        log_scales=np.log(np.array([[0.3, 0.2, 0.01], [0.25, 0.3, 0.01]])),
        rotations=np.array([[1.0, 0.0, 0.0, 0.0], [0.98, 0.1, 0.1, 0.0]]),
        opacity_logits=np.array([0.0, -0.5]),
        colors=np.array([[0.8, 0.2, 0.1], [0.1, 0.5, 0.9]]),
    )
    cloud.rotations[:] /= np.linalg.norm(cloud.rotations, axis=1, keepdims=True)
    weights = rng.uniform(size=(16, 16, 3))

    output = rendering.render_view(cloud, view)
    grads = rendering.backward(output, cloud, rendering.RenderGradients(rgb=weights))

    def loss_of(name: str) -> typing.Callable[[np.ndarray], float]:
        def loss(values: np.ndarray) -> float:
            changed = dataclasses.replace(cloud, **{name: values})
            return float(np.sum(rendering.render_view(changed, view).rgb * weights))

        return loss

    checks = {
        "opacity_logits": [(0,), (1,)],
        "colors": [(0, 0), (1, 2)],
    }
    error = 0.0
    for name, indices in checks.items():
        numeric = _central_differences(loss_of(name), getattr(cloud, name), indices)
        analytic = np.array([grads[name][i] for i in indices])
        error = max(error, _relative_error(analytic, numeric))
    return AuditResult("render_gradient", error < 1e-5, f"max error {error:.2e}")


#: Parameters compared against finite differences by the loss gradient audits.
GRADIENT_PARAMETERS = ("centers", "log_scales", "rotations", "opacity_logits")
#: Alpha above which rendered pixels define a plane in the gradient scenes.
PLANE_ALPHA = 0.1

Objective = typing.Callable[
    ["gaussians.GaussianCloud"],
    typing.Tuple[float, typing.Dict[str, np.ndarray], int],
]


def _gradient_scene(
    seed: int = 0,
) -> typing.Tuple[
    "gaussians.GaussianCloud", "cameras.CameraView", "cameras.CameraView"
]:
    """
    Get five stacked Gaussians covering an 8x8 view and a shifted neighbour.

    The Gaussians are nearly fronto-parallel, separated in depth and wide
    enough that every pixel ray meets all five well inside their footprints,
    so every loss is smooth in every parameter. The neighbour sits a fraction
    of a pixel of parallax away.
    """
    rng = np.random.default_rng(seed)
    count = 5
    depths = 1.6 + 0.4 * np.arange(count)
    centers = np.column_stack([rng.uniform(-0.2, 0.2, size=(count, 2)), depths])
    in_plane = rng.uniform(0.55, 0.7, size=(count, 2)) * depths[:, None]
    thin = rng.uniform(0.01, 0.02, size=(count, 1))
    rotations = np.column_stack(
        [np.ones(count), rng.uniform(-0.02, 0.02, size=(count, 3))]
    )
    cloud = gaussians.GaussianCloud(
        centers=centers,
        log_scales=np.log(np.hstack([in_plane, thin])),
        rotations=rotations / np.linalg.norm(rotations, axis=1, keepdims=True),
        opacity_logits=rng.uniform(-1.0, 1.0, size=count),
        colors=rng.uniform(size=(count, 3)),
    )

    def view(name: str, center: np.ndarray) -> "cameras.CameraView":
        return cameras.CameraView(
            intrinsics=cameras.make_intrinsics(8, 8, 60.0),
            rotation=np.eye(3),
            translation=-center,
            width=8,
            height=8,
            name=name,
        ).with_rasters(rng.uniform(size=(8, 8, 3)), None)

    reference = view("reference", np.zeros(3))
    neighbor = view("neighbor", np.array([0.08, 0.03, 0.0]))
    return cloud, reference, neighbor


def _parameter_gradient_error(
    objective: "Objective",
    cloud: "gaussians.GaussianCloud",
    step: float = 1e-7,
) -> float:
    """Get the largest relative error of the analytic parameter gradients."""
    _, analytic, _ = objective(cloud)
    error = 0.0
    for name in GRADIENT_PARAMETERS:
        values = getattr(cloud, name)

        def loss(changed: np.ndarray, name: str = name) -> float:
            return objective(dataclasses.replace(cloud, **{name: changed}))[0]

        indices = list(np.ndindex(*values.shape))
        numeric = _central_differences(loss, values, indices, step)
        error = max(error, _relative_error(analytic[name].reshape(-1), numeric))
    return error


def _gradient_audit(name: str, objective: "Objective", seed: int) -> "AuditResult":
    """Compare every parameter gradient of a loss on the stacked scene."""
    cloud, _, _ = _gradient_scene(seed)
    _, _, support = objective(cloud)
    error = _parameter_gradient_error(objective, cloud)
    return AuditResult(
        name,
        support > 0 and error < 1e-3,
        f"max error {error:.2e} over {support} pixels",
    )


def audit_rgb_gradient(seed: int = 0) -> "AuditResult":
    """The image loss gradients match finite differences for every parameter."""
    _, reference, _ = _gradient_scene(seed)

    def objective(cloud: "gaussians.GaussianCloud"):
        output = rendering.render_view(cloud, reference)
        photometric = rendering.rgb_loss(output.rgb, reference.gt_rgb)
        gradients = rendering.RenderGradients(rgb=photometric.grad_rgb)
        grads = rendering.backward(output, cloud, gradients)
        return photometric.total, grads, output.rgb.shape[0] * output.rgb.shape[1]

    return _gradient_audit("rgb_gradient", objective, seed)


def audit_distortion_gradient(seed: int = 0) -> "AuditResult":
    """Depth distortion gradients match finite differences on five-deep rays."""
    _, reference, _ = _gradient_scene(seed)

    def objective(cloud: "gaussians.GaussianCloud"):
        output = rendering.render_view(cloud, reference)
        loss, grad_w, grad_rho = rendering.depth_distortion_loss(output.records)
        gradients = rendering.RenderGradients(
            record_weights=grad_w, record_depths=grad_rho
        )
        grads = rendering.backward(output, cloud, gradients)
        return loss, grads, len(np.unique(output.records.pixels))

    return _gradient_audit("distortion_gradient", objective, seed)


def audit_normal_smooth_gradient(seed: int = 0) -> "AuditResult":
    """Normal smoothness gradients match finite differences."""
    _, reference, _ = _gradient_scene(seed)
    rng = np.random.default_rng(seed + 1)
    derived = rng.normal(size=(8, 8, 3))
    derived /= np.linalg.norm(derived, axis=-1, keepdims=True)

    def objective(cloud: "gaussians.GaussianCloud"):
        output = rendering.render_view(cloud, reference)
        loss, grad_normal = rendering.normal_smooth_loss(
            output.normal, derived, reference.gt_rgb
        )
        gradients = rendering.RenderGradients(normal=grad_normal)
        grads = rendering.backward(output, cloud, gradients)
        return loss, grads, derived.shape[0] * derived.shape[1]

    return _gradient_audit("normal_smooth_gradient", objective, seed)


def audit_multiview_gradient(seed: int = 0) -> "AuditResult":
    """Reprojection gradients through both views match finite differences."""
    _, reference, neighbor = _gradient_scene(seed)

    def objective(cloud: "gaussians.GaussianCloud"):
        reference_output = rendering.render_view(cloud, reference)
        neighbor_output = rendering.render_view(cloud, neighbor)
        reference_planes = rendering.PlaneMaps.from_render(
            reference_output, PLANE_ALPHA
        )
        neighbor_planes = rendering.PlaneMaps.from_render(neighbor_output, PLANE_ALPHA)
        geometry = rendering.multiview_geom_loss(
            reference, neighbor, reference_planes, neighbor_planes
        )
        grads = rendering.backward(
            reference_output,
            cloud,
            reference_planes.backward(
                reference_output,
                geometry.reference_normals,
                geometry.reference_distances,
            ),
        )
        neighbor_grads = rendering.backward(
            neighbor_output,
            cloud,
            neighbor_planes.backward(
                neighbor_output,
                geometry.neighbor_normals,
                geometry.neighbor_distances,
            ),
        )
        for name, values in neighbor_grads.items():
            grads[name] = grads[name] + values
        return geometry.loss, grads, geometry.valid_count

    return _gradient_audit("multiview_gradient", objective, seed)


def audit_ncc_gradient(seed: int = 0) -> "AuditResult":
    """Warped patch correlation gradients match finite differences."""
    _, reference, neighbor = _gradient_scene(seed)

    def objective(cloud: "gaussians.GaussianCloud"):
        output = rendering.render_view(cloud, reference)
        planes = rendering.PlaneMaps.from_render(output, PLANE_ALPHA)
        correlation = rendering.warped_ncc(reference, neighbor, planes, patch=3)
        gradients = planes.backward(
            output, correlation.grad_normals, correlation.grad_distances
        )
        grads = rendering.backward(output, cloud, gradients)
        return 1.0 - correlation.ncc, grads, correlation.valid_count

    return _gradient_audit("ncc_gradient", objective, seed)


#: Audits run by the selftest command, in order.
AUDITS: typing.Dict[str, typing.Callable[[], "AuditResult"]] = {
    "fusion_oracle": audit_fusion_oracle,
    "trilinear_oracle": audit_trilinear_oracle,
    "gradient_oracle": audit_gradient_oracle,
    "projection_contraction": audit_projection_contraction,
    "removal_soundness": audit_removal_soundness,
    "scp_gradient": audit_scp_gradient,
    "flatten_gradient": audit_flatten_gradient,
    "ssim_gradient": audit_ssim_gradient,
    "render_gradient": audit_render_gradient,
    "rgb_gradient": audit_rgb_gradient,
    "distortion_gradient": audit_distortion_gradient,
    "normal_smooth_gradient": audit_normal_smooth_gradient,
    "multiview_gradient": audit_multiview_gradient,
    "ncc_gradient": audit_ncc_gradient,
}


def run_audits(
    names: typing.Optional[typing.Sequence[str]] = None,
) -> typing.List["AuditResult"]:
    """Run the named audits, or all of them."""
    selected = list(AUDITS) if not names else list(names)
    unknown = [n for n in selected if n not in AUDITS]
    if unknown:
        raise KeyError(f"Unknown audits: {', '.join(unknown)}")
    return [AUDITS[name]() for name in selected]
