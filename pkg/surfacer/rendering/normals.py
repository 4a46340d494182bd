"""Depth-derived normals and the edge-aware normal smoothness loss."""
import typing

import numpy as np

from surfacer.definitions import errors

#: Luma weights turning RGB into grayscale.
GRAY_WEIGHTS = np.array([0.299, 0.587, 0.114])


def to_gray(rgb: np.ndarray) -> np.ndarray:
    """Convert an H x W x 3 image to grayscale."""
    return np.asarray(rgb, dtype=np.float64) @ GRAY_WEIGHTS


def backproject(depth: np.ndarray, intrinsics: np.ndarray) -> np.ndarray:
    """Lift every pixel of a depth raster to its camera-frame point."""
    height, width = depth.shape
    columns, rows = np.meshgrid(
        np.arange(width, dtype=float), np.arange(height, dtype=float)
    )
    pixels = np.stack([columns, rows, np.ones_like(columns)], axis=-1)
    return (pixels @ np.linalg.inv(intrinsics).T) * depth[..., None]


def _differences(points: np.ndarray, axis: int) -> np.ndarray:
    """Central differences along an axis with one-sided differences on borders."""
    result = np.empty_like(points)

    def at(index: typing.Union[int, slice]) -> typing.Tuple:
        selector: typing.List[typing.Union[int, slice]] = [slice(None)] * points.ndim
        selector[axis] = index
        return tuple(selector)

    result[at(slice(1, -1))] = 0.5 * (
        points[at(slice(2, None))] - points[at(slice(None, -2))]
    )
    result[at(0)] = points[at(1)] - points[at(0)]
    result[at(-1)] = points[at(-1)] - points[at(-2)]
    return result


def depth_to_normal(
    depth: np.ndarray,
    intrinsics: np.ndarray,
    valid: typing.Optional[np.ndarray] = None,
) -> typing.Tuple[np.ndarray, np.ndarray]:
    """
    Derive a camera-facing normal raster from a depth raster.

    Each pixel is back-projected to a camera-frame point; the normal is the
    normalized cross product of the horizontal and vertical point deltas.

    :param depth:
        H x W depth raster; needs at least 2 pixels along each axis.
    :param intrinsics:
        Pinhole intrinsics of the raster.
    :param valid:
        Optional mask of pixels whose depth can be trusted (for example
        rendered alpha above a threshold).
    :return:
        The H x W x 3 normal raster and its validity mask. Pixels whose
        stencil touches an invalid depth, or whose deltas are degenerate, are
        invalid and carry a zero normal.
    """
    depth = np.asarray(depth, dtype=np.float64)
    if depth.ndim != 2 or min(depth.shape) < 2:
        raise errors.InvalidInputError(
            "Deriving normals needs a depth raster of 2x2 or more."
        )

    usable = np.isfinite(depth) & (depth > 0)
    if valid is not None:
        usable &= np.asarray(valid, dtype=bool)
    points = backproject(np.where(usable, depth, 0.0), intrinsics)
    normals = np.cross(_differences(points, 1), _differences(points, 0))
    lengths = np.linalg.norm(normals, axis=-1, keepdims=True)

    padded = np.pad(usable, 1, mode="edge")
    stencil = (
        usable
        & padded[1:-1, :-2]
        & padded[1:-1, 2:]
        & padded[:-2, 1:-1]
        & padded[2:, 1:-1]
    )
    ok = stencil & (lengths[..., 0] > 1e-12)
    normals = np.where(ok[..., None], normals / np.maximum(lengths, 1e-12), 0.0)
    flip = np.sum(normals * points, axis=-1) > 0
    normals[flip] *= -1.0
    return normals, ok


def edge_weights(gt_rgb: np.ndarray) -> np.ndarray:
    """
    Compute the per-pixel smoothness weight (1 - |grad I|)^2.

    The image gradient is taken with central differences of the grayscale
    image (edge padded) and its magnitude clamped to [0, 1].
    """
    gray = np.pad(to_gray(gt_rgb), 1, mode="edge")
    dx = 0.5 * (gray[1:-1, 2:] - gray[1:-1, :-2])
    dy = 0.5 * (gray[2:, 1:-1] - gray[:-2, 1:-1])
    magnitude = np.clip(np.sqrt(dx ** 2 + dy ** 2), 0.0, 1.0)
    return (1.0 - magnitude) ** 2


def normal_smooth_loss(
    rendered: np.ndarray,
    derived: np.ndarray,
    gt_rgb: np.ndarray,
    mask: typing.Optional[np.ndarray] = None,
) -> typing.Tuple[float, np.ndarray]:
    """
    Compare rendered normals with depth-derived normals, down-weighted on edges.

    L = mean over the mask of eta * |n - n'|_1. The derived normals are
    treated as constants.

    :return:
        The loss and its gradient with respect to the rendered normal raster.
    """
    rendered = np.asarray(rendered, dtype=np.float64)
    derived = np.asarray(derived, dtype=np.float64)
    if rendered.shape != derived.shape or rendered.shape[:2] != gt_rgb.shape[:2]:
        raise errors.InvalidInputError("Normal rasters and image sizes differ.")

    mask = np.ones(rendered.shape[:2], bool) if mask is None else np.asarray(mask, bool)
    count = int(mask.sum())
    if count == 0:
        return 0.0, np.zeros_like(rendered)

    eta = edge_weights(gt_rgb)
    difference = rendered - derived
    per_pixel = eta * np.abs(difference).sum(axis=-1)
    loss = float(per_pixel[mask].sum() / count)
    gradient = np.where(
        mask[..., None], eta[..., None] * np.sign(difference) / count, 0.0
    )
    return loss, gradient
