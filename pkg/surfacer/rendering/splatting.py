"""
Ray-cast splatting of planar Gaussians and its reverse pass.

Every pixel ray is intersected exactly with the plane of each Gaussian whose
screen footprint covers it. Contributions are sorted front to back per pixel
and alpha blended. The forward pass keeps every per-pixel contribution as a
flat record array so that losses defined on individual contributions (depth
distortion) and losses defined on the blended rasters share a single reverse
pass back to the Gaussian parameters.
"""
import concurrent.futures
import dataclasses
import typing

import numpy as np

from surfacer.definitions import cameras
from surfacer.definitions import errors
from surfacer.definitions import gaussians
from surfacer import geometry

#: Largest per-contribution alpha; keeps transmittance strictly positive.
ALPHA_CLAMP = 0.999
#: Floor of the accumulated alpha when normalizing the blended depth.
ALPHA_FLOOR = 1e-8
#: Squared Mahalanobis radius of the footprint (three standard deviations).
FOOTPRINT_RADIUS_SQUARED = 9.0
#: Rays closer than this to parallel with a Gaussian plane skip that Gaussian.
PARALLEL_TOLERANCE = 1e-8

_BOX_SIGNS = np.array(
    [[a, b, c] for a in (-1, 1) for b in (-1, 1) for c in (-1, 1)], dtype=np.float64
)


@dataclasses.dataclass(frozen=True, eq=False)
class PixelRecords:
    """
    Flat arrays describing every Gaussian contribution to every pixel.

    Records are sorted by pixel and then by intersection depth so each
    pixel's contributions form a contiguous front-to-back run.
    """

    pixels: np.ndarray
    gaussians: np.ndarray
    depths: np.ndarray
    responses: np.ndarray
    alphas: np.ndarray
    transmittance: np.ndarray
    weights: np.ndarray
    clamped: np.ndarray
    #: Plane normals flipped to face the camera, camera frame.
    normals: np.ndarray
    #: Sign applied to the raw plane normal to make it face the camera.
    signs: np.ndarray
    #: Ray direction dot raw plane normal.
    denominators: np.ndarray
    #: Intersection point relative to the Gaussian center, camera frame.
    offsets: np.ndarray
    #: Intersection offset expressed along the Gaussian's scale axes.
    local: np.ndarray

    def __len__(self) -> int:
        """Get the number of contributions."""
        return len(self.pixels)

    def segment_starts(self) -> np.ndarray:
        """Get, for each record, the index of the first record of its pixel."""
        if len(self.pixels) == 0:
            return np.zeros(0, dtype=np.int64)
        is_start = np.ones(len(self.pixels), dtype=bool)
        is_start[1:] = self.pixels[1:] != self.pixels[:-1]
        return np.maximum.accumulate(np.where(is_start, np.arange(len(self.pixels)), 0))


@dataclasses.dataclass(frozen=True, eq=False)
class RenderOutput:
    """Rasters rendered for one view together with the state the reverse pass needs."""

    view: "cameras.CameraView"
    rgb: np.ndarray
    depth: np.ndarray
    normal: np.ndarray
    alpha: np.ndarray
    records: "PixelRecords"
    background: np.ndarray
    #: Camera-frame Gaussian rotations, centers, scales, opacities, normal axes.
    camera_rotations: np.ndarray
    camera_centers: np.ndarray
    scales: np.ndarray
    opacities: np.ndarray
    axes: np.ndarray
    #: Unnormalized blended normals.
    normal_sums: np.ndarray

    @property
    def height(self) -> int:
        """Get the raster height."""
        return self.view.height

    @property
    def width(self) -> int:
        """Get the raster width."""
        return self.view.width

    def per_pixel_records(
        self,
        row: int,
        column: int,
    ) -> typing.List[typing.Tuple[int, float, float, float]]:
        """
        List (gaussian index, blend weight, intersection depth, response) for a pixel.

        Entries are ordered front to back.
        """
        index = row * self.width + column
        selected = np.flatnonzero(self.records.pixels == index)
        return [
            (
                int(self.records.gaussians[i]),
                float(self.records.weights[i]),
                float(self.records.depths[i]),
                float(self.records.responses[i]),
            )
            for i in selected
        ]


@dataclasses.dataclass(frozen=True)
class RenderGradients:
    """Gradients of a loss with respect to the outputs of one render."""

    rgb: typing.Optional[np.ndarray] = None
    depth: typing.Optional[np.ndarray] = None
    normal: typing.Optional[np.ndarray] = None
    alpha: typing.Optional[np.ndarray] = None
    #: Per-record gradients with respect to blend weights and depths.
    record_weights: typing.Optional[np.ndarray] = None
    record_depths: typing.Optional[np.ndarray] = None

    def __add__(self, other: "RenderGradients") -> "RenderGradients":
        """Sum two gradient sets field by field."""

        def merge(a: typing.Optional[np.ndarray], b: typing.Optional[np.ndarray]):
            if a is None:
                return b
            if b is None:
                return a
            return a + b

        return RenderGradients(
            **{
                f.name: merge(getattr(self, f.name), getattr(other, f.name))
                for f in dataclasses.fields(self)
            }
        )

    def scaled(self, factor: float) -> "RenderGradients":
        """Multiply every gradient by a constant factor."""
        return RenderGradients(
            **{
                f.name: None if (v := getattr(self, f.name)) is None else v * factor
                for f in dataclasses.fields(self)
            }
        )


def _screen_bounds(
    view: "cameras.CameraView",
    camera_rotations: np.ndarray,
    camera_centers: np.ndarray,
    scales: np.ndarray,
    near: float,
) -> typing.Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """
    Get inclusive pixel bounds of the 3-sigma oriented box of each Gaussian.

    Boxes reaching behind the near plane cover the whole frame; boxes entirely
    behind it come back empty.
    """
    offsets = FOOTPRINT_RADIUS_SQUARED ** 0.5 * scales[:, None, :] * _BOX_SIGNS[None]
    corners = camera_centers[:, None, :] + np.einsum(
        "nij,nkj->nki", camera_rotations, offsets
    )
    z = corners[..., 2]
    in_front = z > near
    with np.errstate(divide="ignore", invalid="ignore"):
        u = view.fx * corners[..., 0] / z + view.cx
        v = view.fy * corners[..., 1] / z + view.cy
    u = np.where(in_front, u, np.nan)
    v = np.where(in_front, v, np.nan)

    straddling = in_front.any(axis=1) & ~in_front.all(axis=1)
    visible = in_front.any(axis=1)
    with np.errstate(invalid="ignore"):
        x0 = np.floor(np.nanmin(np.where(visible[:, None], u, 0.0), axis=1))
        x1 = np.ceil(np.nanmax(np.where(visible[:, None], u, 0.0), axis=1))
        y0 = np.floor(np.nanmin(np.where(visible[:, None], v, 0.0), axis=1))
        y1 = np.ceil(np.nanmax(np.where(visible[:, None], v, 0.0), axis=1))

    x0 = np.where(straddling, 0, np.clip(x0, 0, view.width))
    x1 = np.where(straddling, view.width - 1, np.clip(x1, -1, view.width - 1))
    y0 = np.where(straddling, 0, np.clip(y0, 0, view.height))
    y1 = np.where(straddling, view.height - 1, np.clip(y1, -1, view.height - 1))
    widths = np.where(visible, np.maximum(0, x1 - x0 + 1), 0).astype(np.int64)
    heights = np.where(visible, np.maximum(0, y1 - y0 + 1), 0).astype(np.int64)
    return x0.astype(np.int64), y0.astype(np.int64), widths, heights


def _candidate_pairs(
    view: "cameras.CameraView",
    camera_rotations: np.ndarray,
    camera_centers: np.ndarray,
    scales: np.ndarray,
    near: float,
) -> typing.Tuple[np.ndarray, np.ndarray]:
    """Expand every Gaussian's screen box into (pixel, gaussian) candidates."""
    x0, y0, widths, heights = _screen_bounds(
        view, camera_rotations, camera_centers, scales, near
    )
    counts = widths * heights
    total = int(counts.sum())
    owners = np.repeat(np.arange(len(counts)), counts)
    starts = np.cumsum(counts) - counts
    offsets = np.arange(total) - np.repeat(starts, counts)
    repeated_widths = np.repeat(widths, counts)
    columns = np.repeat(x0, counts) + offsets % np.maximum(repeated_widths, 1)
    rows = np.repeat(y0, counts) + offsets // np.maximum(repeated_widths, 1)
    return rows * view.width + columns, owners


def render_view(
    cloud: "gaussians.GaussianCloud",
    view: "cameras.CameraView",
    near: float = 0.01,
    far: float = 100.0,
    background: typing.Optional[np.ndarray] = None,
) -> "RenderOutput":
    """
    Render RGB, depth, normal and alpha rasters of a view.

    Each contribution intersects the pixel ray with the Gaussian plane at
    depth rho, evaluates the Gaussian response at that point, and blends
    front to back with alpha = min(opacity * response, 0.999). Depth is
    normalized by the accumulated alpha; normals face the camera.

    :param cloud:
        Gaussians to render; at least one is required.
    :param view:
        Camera to render from.
    :param near:
        Closest accepted intersection depth.
    :param far:
        Farthest accepted intersection depth.
    :param background:
        RGB composited behind the Gaussians, black by default.
    """
    if len(cloud) < 1:
        raise errors.InvalidInputError("Rendering needs at least one Gaussian.")
    if not near < far:
        raise errors.InvalidInputError(
            f"Near plane {near} must be closer than far {far}."
        )

    background = np.zeros(3) if background is None else np.asarray(background, float)
    height, width = view.height, view.width
    world_rotations = geometry.quaternions_to_rotations(cloud.rotations)
    camera_rotations = np.einsum("ij,njk->nik", view.rotation, world_rotations)
    camera_centers = cloud.centers @ view.rotation.T + view.translation
    scales = cloud.scales
    opacities = cloud.opacities
    axes = geometry.normal_axes(cloud.log_scales)
    plane_normals = camera_rotations[np.arange(len(cloud)), :, axes]

    pixels, owners = _candidate_pairs(
        view, camera_rotations, camera_centers, scales, near
    )
    directions = view.pixel_directions.reshape(-1, 3)[pixels]
    normals = plane_normals[owners]
    centers = camera_centers[owners]
    denominators = np.sum(normals * directions, axis=1)
    usable = np.abs(denominators) >= PARALLEL_TOLERANCE
    safe = np.where(usable, denominators, 1.0)
    depths = np.sum(normals * centers, axis=1) / safe
    offsets = depths[:, None] * directions - centers
    local = np.einsum("kji,kj->ki", camera_rotations[owners], offsets)
    distances = np.sum((local / scales[owners]) ** 2, axis=1)
    keep = (
        usable
        & (depths > near)
        & (depths < far)
        & (distances <= FOOTPRINT_RADIUS_SQUARED)
    )

    pixels, owners, depths = pixels[keep], owners[keep], depths[keep]
    denominators, offsets, local = denominators[keep], offsets[keep], local[keep]
    order = np.lexsort((depths, pixels))
    pixels, owners, depths = pixels[order], owners[order], depths[order]
    denominators, offsets, local = denominators[order], offsets[order], local[order]
    distances = distances[keep][order]

    responses = np.exp(-0.5 * distances)
    raw_alphas = opacities[owners] * responses
    clamped = raw_alphas > ALPHA_CLAMP
    alphas = np.minimum(raw_alphas, ALPHA_CLAMP)
    signs = np.where(denominators > 0, -1.0, 1.0)
    facing = plane_normals[owners] * signs[:, None]

    records = PixelRecords(
        pixels=pixels,
        gaussians=owners,
        depths=depths,
        responses=responses,
        alphas=alphas,
        transmittance=np.empty(0),
        weights=np.empty(0),
        clamped=clamped,
        normals=facing,
        signs=signs,
        denominators=denominators,
        offsets=offsets,
        local=local,
    )
    transmittance = _transmittance(records)
    weights = alphas * transmittance
    records = dataclasses.replace(records, transmittance=transmittance, weights=weights)

    count = height * width
    alpha = np.bincount(pixels, weights, minlength=count)
    colors = cloud.colors[owners]
    rgb = np.stack(
        [
            np.bincount(pixels, weights * colors[:, c], minlength=count)
            for c in range(3)
        ],
        axis=-1,
    )
    rgb += (1.0 - alpha)[:, None] * background
    depth_sums = np.bincount(pixels, weights * depths, minlength=count)
    depth = depth_sums / np.maximum(alpha, ALPHA_FLOOR)
    normal_sums = np.stack(
        [
            np.bincount(pixels, weights * facing[:, c], minlength=count)
            for c in range(3)
        ],
        axis=-1,
    )
    lengths = np.linalg.norm(normal_sums, axis=1, keepdims=True)
    normal = np.where(lengths > 1e-12, normal_sums / np.maximum(lengths, 1e-12), 0.0)

    return RenderOutput(
        view=view,
        rgb=rgb.reshape(height, width, 3),
        depth=depth.reshape(height, width),
        normal=normal.reshape(height, width, 3),
        alpha=alpha.reshape(height, width),
        records=records,
        background=background,
        camera_rotations=camera_rotations,
        camera_centers=camera_centers,
        scales=scales,
        opacities=opacities,
        axes=axes,
        normal_sums=normal_sums,
    )


def _transmittance(records: "PixelRecords") -> np.ndarray:
    """Compute the product of (1 - alpha) over earlier contributions of each pixel."""
    if len(records) == 0:
        return np.zeros(0)
    logs = np.log1p(-records.alphas)
    exclusive = np.cumsum(logs) - logs
    starts = records.segment_starts()
    return np.exp(exclusive - exclusive[starts])


def _segment_suffix(records: "PixelRecords", values: np.ndarray) -> np.ndarray:
    """Sum values over later contributions of the same pixel (exclusive)."""
    if len(records) == 0:
        return np.zeros(0)
    inclusive = np.cumsum(values)
    starts = records.segment_starts()
    before_segment = inclusive[starts] - values[starts]
    totals = np.bincount(
        records.pixels, values, minlength=int(records.pixels.max()) + 1
    )
    return totals[records.pixels] - (inclusive - before_segment)


def render_views(
    cloud: "gaussians.GaussianCloud",
    views: typing.Sequence["cameras.CameraView"],
    near: float = 0.01,
    far: float = 100.0,
    background: typing.Optional[np.ndarray] = None,
    threads: int = 1,
) -> typing.List["RenderOutput"]:
    """Render several views, in parallel when more than one thread is allowed."""
    with concurrent.futures.ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        return list(
            pool.map(lambda v: render_view(cloud, v, near, far, background), views)
        )


def _flat(
    array: typing.Optional[np.ndarray],
    count: int,
    channels: int = 0,
) -> np.ndarray:
    """Flatten a raster gradient, substituting zeros when absent."""
    shape = (count, channels) if channels else (count,)
    if array is None:
        return np.zeros(shape)
    return np.asarray(array, dtype=np.float64).reshape(shape)


def backward(
    output: "RenderOutput",
    cloud: "gaussians.GaussianCloud",
    gradients: "RenderGradients",
) -> typing.Dict[str, np.ndarray]:
    """
    Propagate raster and record gradients back to the Gaussian parameters.

    :return:
        Gradients keyed by parameter name, aligned with the cloud's arrays.
    """
    records = output.records
    count = output.height * output.width
    pixels, owners = records.pixels, records.gaussians
    directions = output.view.pixel_directions.reshape(-1, 3)[pixels]
    n_gaussians = len(cloud)

    grad_rgb = _flat(gradients.rgb, count, 3)
    grad_depth = _flat(gradients.depth, count)
    grad_normal = _flat(gradients.normal, count, 3)
    grad_alpha = _flat(gradients.alpha, count) - grad_rgb @ output.background

    grad_weights = np.zeros(len(records))
    if gradients.record_weights is not None:
        grad_weights += gradients.record_weights
    grad_depths = np.zeros(len(records))
    if gradients.record_depths is not None:
        grad_depths += gradients.record_depths

    colors = cloud.colors[owners]
    grad_weights += np.sum(grad_rgb[pixels] * colors, axis=1)
    grad_color_records = records.weights[:, None] * grad_rgb[pixels]

    alpha = output.alpha.reshape(-1)
    depth = output.depth.reshape(-1)
    active = alpha > ALPHA_FLOOR
    safe_alpha = np.maximum(alpha, ALPHA_FLOOR)
    grad_weights += grad_depth[pixels] * (
        records.depths - np.where(active, depth, 0.0)[pixels]
    ) / safe_alpha[pixels]
    grad_depths += grad_depth[pixels] * records.weights / safe_alpha[pixels]

    sums = output.normal_sums
    lengths = np.linalg.norm(sums, axis=1, keepdims=True)
    unit = np.where(lengths > 1e-12, sums / np.maximum(lengths, 1e-12), 0.0)
    grad_sums = np.where(
        lengths > 1e-12,
        (grad_normal - unit * np.sum(unit * grad_normal, axis=1, keepdims=True))
        / np.maximum(lengths, 1e-12),
        0.0,
    )
    grad_weights += np.sum(grad_sums[pixels] * records.normals, axis=1)
    grad_facing = records.weights[:, None] * grad_sums[pixels]
    grad_weights += grad_alpha[pixels]

    suffix = _segment_suffix(records, grad_weights * records.weights)
    grad_alphas = grad_weights * records.transmittance - suffix / (1.0 - records.alphas)
    grad_alphas = np.where(records.clamped, 0.0, grad_alphas)

    opacities = output.opacities
    grad_opacity = np.bincount(
        owners, grad_alphas * records.responses, minlength=n_gaussians
    )
    grad_responses = grad_alphas * opacities[owners]
    grad_distances = -0.5 * records.responses * grad_responses

    scales = output.scales[owners]
    grad_local = grad_distances[:, None] * 2.0 * records.local / scales ** 2
    grad_log_scale_records = (
        grad_distances[:, None] * (-2.0) * records.local ** 2 / scales ** 2
    )

    rotations = output.camera_rotations[owners]
    grad_offsets = np.einsum("kij,kj->ki", rotations, grad_local)
    grad_rotation_records = records.offsets[:, :, None] * grad_local[:, None, :]

    grad_depths += np.sum(grad_offsets * directions, axis=1)
    grad_center_records = -grad_offsets
    rows = np.arange(len(records))
    raw_normals = rotations[rows, :, output.axes[owners]]
    denominators = records.denominators
    grad_center_records += grad_depths[:, None] * raw_normals / denominators[:, None]
    grad_normals = -grad_depths[:, None] * records.offsets / denominators[:, None]
    grad_normals += records.signs[:, None] * grad_facing
    grad_rotation_records[rows, :, output.axes[owners]] += grad_normals

    grad_camera_centers = np.stack(
        [
            np.bincount(owners, grad_center_records[:, i], minlength=n_gaussians)
            for i in range(3)
        ],
        axis=-1,
    )
    grad_camera_rotations = np.zeros((n_gaussians, 3, 3))
    np.add.at(grad_camera_rotations, owners, grad_rotation_records)
    grad_world_rotations = np.einsum(
        "ji,njk->nik", output.view.rotation, grad_camera_rotations
    )

    opacity = opacities
    return {
        "centers": grad_camera_centers @ output.view.rotation,
        "log_scales": np.stack(
            [
                np.bincount(owners, grad_log_scale_records[:, i], minlength=n_gaussians)
                for i in range(3)
            ],
            axis=-1,
        ),
        "rotations": geometry.quaternions_backward(
            cloud.rotations, grad_world_rotations
        ),
        "opacity_logits": grad_opacity * opacity * (1.0 - opacity),
        "colors": np.stack(
            [
                np.bincount(owners, grad_color_records[:, i], minlength=n_gaussians)
                for i in range(3)
            ],
            axis=-1,
        ),
    }
