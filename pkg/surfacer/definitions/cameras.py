"""Camera and ray data structures module."""
import dataclasses
import functools
import typing

import numpy as np

from surfacer.definitions import errors


@dataclasses.dataclass(frozen=True)
class Ray:
    """Half-line with a unit direction."""

    origin: np.ndarray
    direction: np.ndarray

    def __post_init__(self):
        """Validate the unit-length direction."""
        if abs(float(np.linalg.norm(self.direction)) - 1.0) > 1e-9:
            raise errors.InvalidInputError("Ray direction must have unit length.")

    def at(self, distance: float) -> np.ndarray:
        """Get the point at the given distance along the ray."""
        return np.asarray(self.origin) + distance * np.asarray(self.direction)


@dataclasses.dataclass(frozen=True, eq=False)
class CameraView:
    """
    Pinhole camera viewpoint with its ground-truth rasters.

    Rotation and translation map world points into the camera frame,
    x_cam = R x + T, with the camera looking down its +z axis. Pixel
    centers sit at integer pixel coordinates.
    """

    intrinsics: np.ndarray
    rotation: np.ndarray
    translation: np.ndarray
    width: int
    height: int
    gt_rgb: typing.Optional[np.ndarray] = None
    gt_depth: typing.Optional[np.ndarray] = None
    gt_mask: typing.Optional[np.ndarray] = None
    name: str = "view"

    def __post_init__(self):
        """Validate intrinsics, rotation and raster consistency."""
        if abs(float(np.linalg.det(self.intrinsics))) < 1e-12:
            raise errors.InvalidInputError("Camera intrinsics must be invertible.")

        rotation = np.asarray(self.rotation, dtype=np.float64)
        orthonormal = np.allclose(rotation @ rotation.T, np.eye(3), atol=1e-6)
        if not orthonormal or abs(float(np.linalg.det(rotation)) - 1.0) > 1e-6:
            raise errors.InvalidInputError("Camera rotation must be a proper rotation.")

        if self.gt_depth is not None:
            mask = self.depth_mask
            if np.any(self.gt_depth[mask] <= 0):
                raise errors.InvalidInputError(
                    f'Ground-truth depth of "{self.name}" must be positive where valid.'
                )

    @property
    def fx(self) -> float:
        """Get the horizontal focal length in pixels."""
        return float(self.intrinsics[0, 0])

    @property
    def fy(self) -> float:
        """Get the vertical focal length in pixels."""
        return float(self.intrinsics[1, 1])

    @property
    def cx(self) -> float:
        """Get the horizontal principal point."""
        return float(self.intrinsics[0, 2])

    @property
    def cy(self) -> float:
        """Get the vertical principal point."""
        return float(self.intrinsics[1, 2])

    @property
    def depth_mask(self) -> np.ndarray:
        """Get the ground-truth depth validity mask."""
        if self.gt_mask is not None:
            return np.asarray(self.gt_mask, dtype=bool)
        if self.gt_depth is None:
            return np.zeros((self.height, self.width), dtype=bool)
        return np.isfinite(self.gt_depth) & (self.gt_depth > 0)

    @functools.cached_property
    def intrinsics_inverse(self) -> np.ndarray:
        """Get the inverse of the intrinsics matrix."""
        return np.linalg.inv(self.intrinsics)

    @property
    def center(self) -> np.ndarray:
        """Get the camera center in world coordinates."""
        return -self.rotation.T @ self.translation

    @functools.cached_property
    def pixel_directions(self) -> np.ndarray:
        """
        Get per-pixel camera-frame ray directions scaled to unit z.

        Points along a direction d at parameter t have camera depth t, so the
        parameter of a ray intersection is directly the rendered depth.
        """
        columns, rows = np.meshgrid(
            np.arange(self.width, dtype=np.float64),
            np.arange(self.height, dtype=np.float64),
        )
        pixels = np.stack([columns, rows, np.ones_like(columns)], axis=-1)
        return pixels @ self.intrinsics_inverse.T

    def world_to_camera_matrix(self) -> np.ndarray:
        """Get the 4x4 homogeneous world-to-camera transform."""
        matrix = np.eye(4)
        matrix[:3, :3] = self.rotation
        matrix[:3, 3] = self.translation
        return matrix

    def ray(self, column: float, row: float) -> "Ray":
        """Create the world-space unit ray through the given pixel coordinate."""
        local = self.intrinsics_inverse @ np.array([column, row, 1.0])
        direction = self.rotation.T @ local
        return Ray(
            origin=self.center,
            direction=direction / np.linalg.norm(direction),
        )

    def with_rasters(
        self,
        rgb: typing.Optional[np.ndarray],
        depth: typing.Optional[np.ndarray],
        mask: typing.Optional[np.ndarray] = None,
    ) -> "CameraView":
        """Create a copy of the view carrying the given ground-truth rasters."""
        return dataclasses.replace(self, gt_rgb=rgb, gt_depth=depth, gt_mask=mask)


def look_at(
    eye: np.ndarray,
    target: np.ndarray,
    up: typing.Optional[np.ndarray] = None,
) -> typing.Tuple[np.ndarray, np.ndarray]:
    """
    Compute a world-to-camera rotation and translation looking at a target.

    The camera frame uses +z forward, +x right and +y down the image.
    """
    eye = np.asarray(eye, dtype=np.float64)
    forward = np.asarray(target, dtype=np.float64) - eye
    forward /= np.linalg.norm(forward)
    up = np.array([0.0, 1.0, 0.0]) if up is None else np.asarray(up, dtype=np.float64)
    if abs(float(forward @ up)) > 0.999:
        up = np.array([1.0, 0.0, 0.0])

    right = np.cross(forward, up)
    right /= np.linalg.norm(right)
    down = np.cross(forward, right)
    rotation = np.stack([right, down, forward], axis=0)
    return rotation, -rotation @ eye


def make_intrinsics(width: int, height: int, fov_degrees: float) -> np.ndarray:
    """Create pinhole intrinsics with the given horizontal field of view."""
    focal = 0.5 * width / np.tan(0.5 * np.radians(fov_degrees))
    return np.array(
        [
            [focal, 0.0, 0.5 * (width - 1)],
            [0.0, focal, 0.5 * (height - 1)],
            [0.0, 0.0, 1.0],
        ]
    )
