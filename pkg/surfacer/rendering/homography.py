"""
Plane-induced homographies between views and the multi-view geometry loss.

Every rendered pixel defines a local plane (normal and distance) in its
camera frame. The plane induces a homography into a neighbouring view;
warping a pixel into the neighbour with the reference plane and back with the
neighbour's plane returns it to where it started only when both views agree
on the geometry.
"""
import dataclasses
import typing

import numpy as np

from surfacer.definitions import cameras
from surfacer.definitions import errors
from surfacer.rendering import splatting

#: Smallest accepted plane distance.
MIN_DISTANCE = 1e-6
#: Smallest accepted homography determinant.
MIN_DETERMINANT = 1e-12


@dataclasses.dataclass(frozen=True)
class Homography:
    """Projective map of homogeneous pixels from a reference view to a neighbour."""

    matrix: np.ndarray

    def __post_init__(self):
        """Validate invertibility."""
        if abs(float(np.linalg.det(self.matrix))) <= MIN_DETERMINANT:
            raise errors.InvalidInputError("Homography is singular.")

    def apply(self, pixels: np.ndarray) -> np.ndarray:
        """Warp pixel coordinates of shape (..., 2)."""
        pixels = np.asarray(pixels, dtype=np.float64)
        homogeneous = np.concatenate(
            [pixels, np.ones(pixels.shape[:-1] + (1,))], axis=-1
        )
        warped = homogeneous @ self.matrix.T
        return warped[..., :2] / warped[..., 2:]

    def inverse(self) -> "Homography":
        """Get the homography mapping back from the neighbour."""
        return Homography(np.linalg.inv(self.matrix))


@dataclasses.dataclass(frozen=True, eq=False)
class PlaneMaps:
    """
    Per-pixel local planes of a view in its camera frame.

    A camera-frame point X lies on the plane of its pixel when n . X = tau.
    Normals point away from the camera so that distances are positive.
    """

    normals: np.ndarray
    distances: np.ndarray
    valid: np.ndarray

    @classmethod
    def from_render(
        cls,
        output: "splatting.RenderOutput",
        alpha_threshold: float = 0.5,
    ) -> "PlaneMaps":
        """Read the local planes off a render's normal and depth rasters."""
        normals = -output.normal
        points = output.depth[..., None] * output.view.pixel_directions
        distances = np.sum(normals * points, axis=-1)
        valid = (
            (output.alpha > alpha_threshold)
            & (distances > MIN_DISTANCE)
            & (np.linalg.norm(normals, axis=-1) > 0.5)
        )
        return cls(normals=normals, distances=distances, valid=valid)

    def backward(
        self,
        output: "splatting.RenderOutput",
        grad_normals: np.ndarray,
        grad_distances: np.ndarray,
    ) -> "splatting.RenderGradients":
        """Turn plane gradients into gradients of the render's normal and depth."""
        directions = output.view.pixel_directions
        points = output.depth[..., None] * directions
        grad_normals = np.where(self.valid[..., None], grad_normals, 0.0)
        grad_distances = np.where(self.valid, grad_distances, 0.0)
        return splatting.RenderGradients(
            normal=-(grad_normals + grad_distances[..., None] * points),
            depth=grad_distances * np.sum(self.normals * directions, axis=-1),
        )


def relative_pose(
    reference: "cameras.CameraView",
    neighbor: "cameras.CameraView",
) -> typing.Tuple[np.ndarray, np.ndarray]:
    """Get the pose taking reference camera points into the neighbour frame."""
    rotation = neighbor.rotation @ reference.rotation.T
    return rotation, neighbor.translation - rotation @ reference.translation


def compute_homography(
    reference: "cameras.CameraView",
    neighbor: "cameras.CameraView",
    normal: np.ndarray,
    distance: float,
) -> "Homography":
    """
    Compute H = K_m (R_rm + T_rm n^T / tau) K_r^-1 for one reference plane.

    :param reference:
        View the plane is expressed in.
    :param neighbor:
        View the homography maps into.
    :param normal:
        Plane normal in the reference camera frame.
    :param distance:
        Plane distance tau from the reference camera; must exceed 1e-6.
    """
    if not distance > MIN_DISTANCE:
        raise errors.InvalidInputError(f"Plane distance {distance} is degenerate.")
    matrices = pixel_homographies(
        reference, neighbor, np.asarray(normal)[None], np.array([distance])
    )
    return Homography(matrices[0])


def pixel_homographies(
    reference: "cameras.CameraView",
    neighbor: "cameras.CameraView",
    normals: np.ndarray,
    distances: np.ndarray,
) -> np.ndarray:
    """Compute one homography per plane, planes of shape (P, 3) and (P,)."""
    rotation, translation = relative_pose(reference, neighbor)
    plane_terms = translation[None, :, None] * normals[:, None, :] / distances[
        :, None, None
    ]
    return np.einsum(
        "ij,pjk,kl->pil",
        neighbor.intrinsics,
        rotation[None] + plane_terms,
        reference.intrinsics_inverse,
    )


def homography_backward(
    reference: "cameras.CameraView",
    neighbor: "cameras.CameraView",
    normals: np.ndarray,
    distances: np.ndarray,
    grad_matrices: np.ndarray,
) -> typing.Tuple[np.ndarray, np.ndarray]:
    """Propagate per-plane homography gradients (P, 3, 3) to normals and distances."""
    _, translation = relative_pose(reference, neighbor)
    u = neighbor.intrinsics @ translation
    w = normals @ reference.intrinsics_inverse
    projected = np.einsum("pij,i->pj", grad_matrices, u)
    grad_normals = projected @ reference.intrinsics_inverse.T / distances[:, None]
    grad_distances = -np.sum(projected * w, axis=1) / distances ** 2
    return grad_normals, grad_distances


def _dehomogenize_backward(
    homogeneous: np.ndarray,
    pixels: np.ndarray,
    grad_pixels: np.ndarray,
) -> np.ndarray:
    """Propagate gradients of x/z, y/z back to the homogeneous vectors."""
    z = homogeneous[..., 2:]
    return np.concatenate(
        [grad_pixels / z, -np.sum(grad_pixels * pixels, axis=-1, keepdims=True) / z],
        axis=-1,
    )


@dataclasses.dataclass(frozen=True, eq=False)
class GeometryLoss:
    """Forward-backward reprojection loss between a view pair and its gradients."""

    loss: float
    valid_count: int
    reference_normals: np.ndarray
    reference_distances: np.ndarray
    neighbor_normals: np.ndarray
    neighbor_distances: np.ndarray

    @property
    def empty(self) -> bool:
        """Whether no pixel was valid in both views."""
        return self.valid_count == 0


def multiview_geom_loss(
    reference: "cameras.CameraView",
    neighbor: "cameras.CameraView",
    reference_planes: "PlaneMaps",
    neighbor_planes: "PlaneMaps",
) -> "GeometryLoss":
    """
    Measure how far pixels land from home after a round trip through a neighbour.

    Each valid reference pixel is warped into the neighbour with its own plane
    homography, the neighbour's plane is read at the nearest pixel, and the
    pixel is warped back with the neighbour's homography. The loss is the mean
    L1 distance between start and return positions over pixels valid in both
    views.
    """
    height, width = reference.height, reference.width
    zero_reference = (np.zeros((height, width, 3)), np.zeros((height, width)))
    zero_neighbor = (
        np.zeros((neighbor.height, neighbor.width, 3)),
        np.zeros((neighbor.height, neighbor.width)),
    )

    rows, columns = np.nonzero(reference_planes.valid)
    starts = np.stack([columns, rows], axis=-1).astype(np.float64)
    homogeneous_starts = np.concatenate([starts, np.ones((len(starts), 1))], axis=-1)
    forward = pixel_homographies(
        reference,
        neighbor,
        reference_planes.normals[rows, columns],
        reference_planes.distances[rows, columns],
    )
    landed_h = np.einsum("pij,pj->pi", forward, homogeneous_starts)
    with np.errstate(divide="ignore", invalid="ignore"):
        landed = landed_h[:, :2] / landed_h[:, 2:]
    target_columns = np.floor(landed[:, 0] + 0.5)
    target_rows = np.floor(landed[:, 1] + 0.5)
    inside = (
        (landed_h[:, 2] > 0)
        & np.all(np.isfinite(landed), axis=1)
        & (target_columns >= 0)
        & (target_columns < neighbor.width)
        & (target_rows >= 0)
        & (target_rows < neighbor.height)
    )
    tc = np.where(inside, target_columns, 0).astype(np.int64)
    tr = np.where(inside, target_rows, 0).astype(np.int64)
    inside &= neighbor_planes.valid[tr, tc]

    keep = np.flatnonzero(inside)
    count = len(keep)
    if count == 0:
        return GeometryLoss(0.0, 0, *zero_reference, *zero_neighbor)

    rows, columns, starts = rows[keep], columns[keep], starts[keep]
    homogeneous_starts = homogeneous_starts[keep]
    forward, landed_h, landed = forward[keep], landed_h[keep], landed[keep]
    tr, tc = tr[keep], tc[keep]

    backward = pixel_homographies(
        neighbor,
        reference,
        neighbor_planes.normals[tr, tc],
        neighbor_planes.distances[tr, tc],
    )
    homogeneous_landed = np.concatenate([landed, np.ones((count, 1))], axis=-1)
    returned_h = np.einsum("pij,pj->pi", backward, homogeneous_landed)
    returned = returned_h[:, :2] / returned_h[:, 2:]
    difference = returned - starts
    loss = float(np.abs(difference).sum() / count)

    grad_returned = np.sign(difference) / count
    grad_returned_h = _dehomogenize_backward(returned_h, returned, grad_returned)
    grad_backward = grad_returned_h[:, :, None] * homogeneous_landed[:, None, :]
    grad_landed = np.einsum("pij,pi->pj", backward, grad_returned_h)[:, :2]
    grad_landed_h = _dehomogenize_backward(landed_h, landed, grad_landed)
    grad_forward = grad_landed_h[:, :, None] * homogeneous_starts[:, None, :]

    ref_normals, ref_distances = homography_backward(
        reference,
        neighbor,
        reference_planes.normals[rows, columns],
        reference_planes.distances[rows, columns],
        grad_forward,
    )
    nb_normals, nb_distances = homography_backward(
        neighbor,
        reference,
        neighbor_planes.normals[tr, tc],
        neighbor_planes.distances[tr, tc],
        grad_backward,
    )

    reference_normals, reference_distances = zero_reference
    reference_normals[rows, columns] = ref_normals
    reference_distances[rows, columns] = ref_distances
    neighbor_normals, neighbor_distances = zero_neighbor
    np.add.at(neighbor_normals, (tr, tc), nb_normals)
    np.add.at(neighbor_distances, (tr, tc), nb_distances)
    return GeometryLoss(
        loss=loss,
        valid_count=count,
        reference_normals=reference_normals,
        reference_distances=reference_distances,
        neighbor_normals=neighbor_normals,
        neighbor_distances=neighbor_distances,
    )


def nearest_neighbors(
    views: typing.Sequence["cameras.CameraView"],
    count: int = 2,
) -> typing.List[typing.List[int]]:
    """List, for every view, the views with the closest camera centers."""
    centers = np.stack([v.center for v in views])
    distances = np.linalg.norm(centers[:, None] - centers[None], axis=-1)
    np.fill_diagonal(distances, np.inf)
    order = np.argsort(distances, axis=1, kind="stable")
    limit = min(count, len(views) - 1)
    return [[int(i) for i in row[:limit]] for row in order]
