"""
Image reconstruction loss: absolute error, structural similarity and
normalized cross correlation of homography-warped patches.
"""
import dataclasses
import functools
import typing

import numpy as np
from scipy import ndimage

from surfacer.definitions import cameras
from surfacer.definitions import errors
from surfacer.rendering import homography
from surfacer.rendering import normals as normals_module

SSIM_C1 = 0.01 ** 2
SSIM_C2 = 0.03 ** 2
SSIM_WINDOW = 11
SSIM_SIGMA = 1.5
NCC_PATCH = 7
#: Patches whose intensity variance falls below this carry no NCC signal.
NCC_MIN_VARIANCE = 1e-8
DEFAULT_BETA = 0.2


@functools.lru_cache(maxsize=None)
def gaussian_window(size: int = SSIM_WINDOW, sigma: float = SSIM_SIGMA) -> np.ndarray:
    """Get the normalized 2D Gaussian window used for local image statistics."""
    offsets = np.arange(size, dtype=np.float64) - (size - 1) / 2
    profile = np.exp(-(offsets ** 2) / (2 * sigma ** 2))
    profile /= profile.sum()
    window = np.outer(profile, profile)
    window.setflags(write=False)
    return window


def _filter(image: np.ndarray) -> np.ndarray:
    """Correlate a single-channel image with the window, zero padded."""
    return ndimage.correlate(image, gaussian_window(), mode="constant", cval=0.0)


def _check_sizes(rendered: np.ndarray, target: np.ndarray):
    if rendered.shape != target.shape:
        raise errors.InvalidInputError(
            f"Rendered image {rendered.shape} and target {target.shape} differ in size."
        )


def mae(rendered: np.ndarray, target: np.ndarray) -> typing.Tuple[float, np.ndarray]:
    """Compute the mean absolute difference and its gradient."""
    rendered, target = np.asarray(rendered, float), np.asarray(target, float)
    _check_sizes(rendered, target)
    difference = rendered - target
    return float(np.abs(difference).mean()), np.sign(difference) / difference.size


def _ssim_channel(x: np.ndarray, y: np.ndarray) -> typing.Tuple[np.ndarray, np.ndarray]:
    """Compute the SSIM map of one channel and the gradient of its sum in x."""
    mu_x, mu_y = _filter(x), _filter(y)
    var_x = _filter(x * x) - mu_x ** 2
    var_y = _filter(y * y) - mu_y ** 2
    covariance = _filter(x * y) - mu_x * mu_y

    a1 = 2 * mu_x * mu_y + SSIM_C1
    a2 = 2 * covariance + SSIM_C2
    b1 = mu_x ** 2 + mu_y ** 2 + SSIM_C1
    b2 = var_x + var_y + SSIM_C2
    similarity = a1 * a2 / (b1 * b2)

    by_mean = 2 * mu_y * (a2 - a1) / (b1 * b2) - 2 * mu_x * similarity * (
        1 / b1 - 1 / b2
    )
    by_cross = 2 * a1 / (b1 * b2)
    by_square = -similarity / b2
    gradient = _filter(by_mean) + y * _filter(by_cross) + 2 * x * _filter(by_square)
    return similarity, gradient


def ssim(rendered: np.ndarray, target: np.ndarray) -> typing.Tuple[float, np.ndarray]:
    """
    Compute the mean structural similarity of two images and its gradient.

    Statistics use an 11x11 Gaussian window (sigma 1.5) with zero padding,
    constants (0.01)^2 and (0.03)^2 for images in [0, 1], and the mean over
    every pixel and channel.
    """
    rendered, target = np.asarray(rendered, float), np.asarray(target, float)
    _check_sizes(rendered, target)
    x = rendered.reshape(rendered.shape[0], rendered.shape[1], -1)
    y = target.reshape(x.shape)
    maps, gradients = zip(
        *(_ssim_channel(x[..., c], y[..., c]) for c in range(x.shape[2]))
    )
    total = float(np.stack(maps, axis=-1).mean())
    gradient = np.stack(gradients, axis=-1) / x.size
    return total, gradient.reshape(rendered.shape)


def _bilinear(
    image: np.ndarray,
    points: np.ndarray,
) -> typing.Tuple[np.ndarray, np.ndarray]:
    """Sample an image at (x, y) points and get the sample gradients."""
    height, width = image.shape
    x0 = np.clip(np.floor(points[..., 0]), 0, width - 2).astype(np.int64)
    y0 = np.clip(np.floor(points[..., 1]), 0, height - 2).astype(np.int64)
    fx, fy = points[..., 0] - x0, points[..., 1] - y0
    g00, g01 = image[y0, x0], image[y0, x0 + 1]
    g10, g11 = image[y0 + 1, x0], image[y0 + 1, x0 + 1]
    values = (1 - fy) * ((1 - fx) * g00 + fx * g01) + fy * ((1 - fx) * g10 + fx * g11)
    gradients = np.stack(
        [
            (1 - fy) * (g01 - g00) + fy * (g11 - g10),
            (1 - fx) * (g10 - g00) + fx * (g11 - g01),
        ],
        axis=-1,
    )
    return values, gradients


def patch_ncc(a: np.ndarray, b: np.ndarray) -> float:
    """Compute the normalized cross correlation of two equally sized patches."""
    a = np.asarray(a, float).ravel() - np.mean(a)
    b = np.asarray(b, float).ravel() - np.mean(b)
    return float(np.sum(a * b) / np.sqrt(np.sum(a * a) * np.sum(b * b)))


@dataclasses.dataclass(frozen=True, eq=False)
class PatchCorrelation:
    """Mean NCC between reference patches and their warps into a neighbour."""

    ncc: float
    valid_count: int
    #: Gradients of (1 - ncc) with respect to the reference plane maps.
    grad_normals: np.ndarray
    grad_distances: np.ndarray


def warped_ncc(
    reference: "cameras.CameraView",
    neighbor: "cameras.CameraView",
    planes: "homography.PlaneMaps",
    patch: int = NCC_PATCH,
) -> "PatchCorrelation":
    """
    Correlate 7x7 grayscale patches of the reference with their plane warps.

    The patch around each valid reference pixel is mapped into the neighbour
    by the homography of that pixel's plane and sampled bilinearly. Patches
    leaving either image, or without intensity variation, are skipped. When
    no patch is usable the correlation is reported as 1 (no penalty).
    """
    height, width = reference.height, reference.width
    zeros = (np.zeros((height, width, 3)), np.zeros((height, width)))
    if reference.gt_rgb is None or neighbor.gt_rgb is None:
        return PatchCorrelation(1.0, 0, *zeros)

    radius = patch // 2
    interior = np.zeros((height, width), dtype=bool)
    interior[radius : height - radius, radius : width - radius] = True
    rows, columns = np.nonzero(planes.valid & interior)
    if len(rows) == 0:
        return PatchCorrelation(1.0, 0, *zeros)

    reference_gray = normals_module.to_gray(reference.gt_rgb)
    neighbor_gray = normals_module.to_gray(neighbor.gt_rgb)
    dy, dx = np.meshgrid(
        np.arange(-radius, radius + 1), np.arange(-radius, radius + 1), indexing="ij"
    )
    patch_columns = columns[:, None] + dx.ravel()[None]
    patch_rows = rows[:, None] + dy.ravel()[None]
    a = reference_gray[patch_rows, patch_columns]

    plane_normals = planes.normals[rows, columns]
    plane_distances = planes.distances[rows, columns]
    matrices = homography.pixel_homographies(
        reference, neighbor, plane_normals, plane_distances
    )
    sources = np.stack(
        [patch_columns, patch_rows, np.ones_like(patch_rows)], axis=-1
    ).astype(np.float64)
    warped_h = np.einsum("pij,pkj->pki", matrices, sources)
    with np.errstate(divide="ignore", invalid="ignore"):
        warped = warped_h[..., :2] / warped_h[..., 2:]
        inside = (
            np.all(warped_h[..., 2] > 0, axis=1)
            & np.all(np.isfinite(warped), axis=(1, 2))
            & np.all(
                (warped[..., 0] >= 0) & (warped[..., 0] <= neighbor.width - 1), axis=1
            )
            & np.all(
                (warped[..., 1] >= 0) & (warped[..., 1] <= neighbor.height - 1), axis=1
            )
        )
    warped = np.where(np.isfinite(warped), warped, 0.0)
    b, sample_gradients = _bilinear(neighbor_gray, warped)

    centered_a = a - a.mean(axis=1, keepdims=True)
    centered_b = b - b.mean(axis=1, keepdims=True)
    s_aa = np.sum(centered_a ** 2, axis=1)
    s_bb = np.sum(centered_b ** 2, axis=1)
    keep = inside & (s_aa > NCC_MIN_VARIANCE) & (s_bb > NCC_MIN_VARIANCE)
    count = int(keep.sum())
    if count == 0:
        return PatchCorrelation(1.0, 0, *zeros)

    centered_a, centered_b = centered_a[keep], centered_b[keep]
    s_aa, s_bb = s_aa[keep], s_bb[keep]
    root = np.sqrt(s_aa * s_bb)
    scores = np.sum(centered_a * centered_b, axis=1) / root

    grad_b = -(
        centered_a / root[:, None] - scores[:, None] * centered_b / s_bb[:, None]
    ) / count
    grad_warped = grad_b[..., None] * sample_gradients[keep]
    kept_h, kept_warped = warped_h[keep], warped[keep]
    grad_h = np.concatenate(
        [
            grad_warped / kept_h[..., 2:],
            -np.sum(grad_warped * kept_warped, axis=-1, keepdims=True) / kept_h[
                ..., 2:
            ],
        ],
        axis=-1,
    )
    grad_matrices = np.einsum("pki,pkj->pij", grad_h, sources[keep])
    grad_n, grad_tau = homography.homography_backward(
        reference, neighbor, plane_normals[keep], plane_distances[keep], grad_matrices
    )

    grad_normals, grad_distances = zeros
    grad_normals[rows[keep], columns[keep]] = grad_n
    grad_distances[rows[keep], columns[keep]] = grad_tau
    return PatchCorrelation(
        ncc=float(scores.mean()),
        valid_count=count,
        grad_normals=grad_normals,
        grad_distances=grad_distances,
    )


@dataclasses.dataclass(frozen=True, eq=False)
class PhotometricLoss:
    """Components of the image reconstruction loss and its gradients."""

    total: float
    mae: float
    ssim: float
    ncc: float
    grad_rgb: np.ndarray
    correlation: typing.Optional["PatchCorrelation"] = None


def rgb_loss(
    rendered: np.ndarray,
    target: np.ndarray,
    beta: float = DEFAULT_BETA,
    correlation: typing.Optional["PatchCorrelation"] = None,
) -> "PhotometricLoss":
    """
    Combine L = (1 - beta) MAE + beta (1 - SSIM) + (1 - NCC).

    :param rendered:
        Rendered H x W x 3 image.
    :param target:
        Ground-truth image of the same size.
    :param beta:
        Weight of the structural term.
    :param correlation:
        Warped patch correlation with a neighbour view; without it the NCC
        term contributes nothing.
    """
    absolute, grad_absolute = mae(rendered, target)
    structural, grad_structural = ssim(rendered, target)
    ncc = 1.0 if correlation is None else correlation.ncc
    total = (1 - beta) * absolute + beta * (1 - structural) + (1 - ncc)
    return PhotometricLoss(
        total=float(total),
        mae=absolute,
        ssim=structural,
        ncc=ncc,
        grad_rgb=(1 - beta) * grad_absolute - beta * grad_structural,
        correlation=correlation,
    )
