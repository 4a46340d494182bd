"""Analytic signed distance shapes and uniform surface sampling."""
import dataclasses
import typing

import numpy as np

from surfacer.definitions import enumerations
from surfacer.definitions import errors

ShapeKind = enumerations.ShapeKind


def sphere_sdf(points: np.ndarray, radius: float) -> np.ndarray:
    """Signed distance to a sphere centered at the origin."""
    return np.linalg.norm(points, axis=-1) - radius


def box_sdf(points: np.ndarray, half_extents: np.ndarray) -> np.ndarray:
    """Signed distance to an axis-aligned box centered at the origin."""
    q = np.abs(points) - half_extents
    outside = np.linalg.norm(np.maximum(q, 0.0), axis=-1)
    inside = np.minimum(np.max(q, axis=-1), 0.0)
    return outside + inside


def torus_sdf(points: np.ndarray, major: float, minor: float) -> np.ndarray:
    """Signed distance to a torus around the y axis centered at the origin."""
    ring = np.linalg.norm(points[..., [0, 2]], axis=-1) - major
    return np.sqrt(ring ** 2 + points[..., 1] ** 2) - minor


@dataclasses.dataclass(frozen=True)
class AnalyticShape:
    """Closed analytic surface with an exact signed distance function."""

    kind: "enumerations.ShapeKind"
    center: np.ndarray = dataclasses.field(default_factory=lambda: np.zeros(3))
    radius: float = 1.0
    half_extents: np.ndarray = dataclasses.field(
        default_factory=lambda: np.array([0.7, 0.7, 0.7])
    )
    major_radius: float = 1.0
    minor_radius: float = 0.35

    def __post_init__(self):
        """Validate the shape dimensions."""
        sizes = {
            ShapeKind.SPHERE: [self.radius],
            ShapeKind.BOX: list(np.asarray(self.half_extents, float)),
            ShapeKind.TORUS: [self.minor_radius, self.major_radius - self.minor_radius],
        }[self.kind]
        if min(sizes) <= 0:
            raise errors.InvalidInputError(f"Degenerate {self.kind.value} dimensions.")

    def sdf(self, points: np.ndarray) -> np.ndarray:
        """Evaluate the signed distance at points of shape (..., 3)."""
        local = np.asarray(points, dtype=np.float64) - self.center
        if self.kind == ShapeKind.SPHERE:
            return sphere_sdf(local, self.radius)
        if self.kind == ShapeKind.BOX:
            return box_sdf(local, np.asarray(self.half_extents, float))
        return torus_sdf(local, self.major_radius, self.minor_radius)

    def normals(self, points: np.ndarray, step: float = 1e-6) -> np.ndarray:
        """Compute unit outward normals by central differences of the distance."""
        points = np.asarray(points, dtype=np.float64)
        gradient = np.stack(
            [
                self.sdf(points + step * axis) - self.sdf(points - step * axis)
                for axis in np.eye(3)
            ],
            axis=-1,
        )
        lengths = np.linalg.norm(gradient, axis=-1, keepdims=True)
        return gradient / np.maximum(lengths, 1e-12)

    @property
    def half_size(self) -> np.ndarray:
        """Get the half extents of the axis-aligned bounding box."""
        if self.kind == ShapeKind.SPHERE:
            return np.full(3, self.radius)
        if self.kind == ShapeKind.BOX:
            return np.asarray(self.half_extents, dtype=np.float64)
        outer = self.major_radius + self.minor_radius
        return np.array([outer, self.minor_radius, outer])

    @property
    def bounds(self) -> typing.Tuple[np.ndarray, np.ndarray]:
        """Get the lower and upper corners of the bounding box."""
        return self.center - self.half_size, self.center + self.half_size

    @property
    def scale(self) -> float:
        """Get the radius of the sphere enclosing the bounding box."""
        return float(np.linalg.norm(self.half_size))

    def sample_surface(self, count: int, rng: np.random.Generator) -> np.ndarray:
        """Draw points distributed uniformly by area over the surface."""
        if self.kind == ShapeKind.SPHERE:
            return self.center + self.radius * _unit_vectors(count, rng)
        if self.kind == ShapeKind.BOX:
            return self.center + _box_surface(
                np.asarray(self.half_extents, float), count, rng
            )
        return self.center + _torus_surface(
            self.major_radius, self.minor_radius, count, rng
        )


def _unit_vectors(count: int, rng: np.random.Generator) -> np.ndarray:
    """Draw directions uniformly on the unit sphere."""
    vectors = rng.normal(size=(count, 3))
    return vectors / np.linalg.norm(vectors, axis=1, keepdims=True)


def _box_surface(half: np.ndarray, count: int, rng: np.random.Generator) -> np.ndarray:
    """Pick faces by area, then points uniformly on the picked face."""
    areas = np.array([half[1] * half[2], half[0] * half[2], half[0] * half[1]])
    areas = np.repeat(areas, 2)
    faces = rng.choice(6, size=count, p=areas / areas.sum())
    points = rng.uniform(-1.0, 1.0, size=(count, 3)) * half
    axes = faces // 2
    signs = np.where(faces % 2 == 0, -1.0, 1.0)
    points[np.arange(count), axes] = signs * half[axes]
    return points


def _torus_surface(
    major: float,
    minor: float,
    count: int,
    rng: np.random.Generator,
) -> np.ndarray:
    """Sample the torus parametrically, rejecting by the local area element."""
    accepted: typing.List[np.ndarray] = []
    total = 0
    while total < count:
        theta = rng.uniform(0.0, 2 * np.pi, size=2 * count)
        phi = rng.uniform(0.0, 2 * np.pi, size=2 * count)
        keep = rng.uniform(size=2 * count) < (major + minor * np.cos(phi)) / (
            major + minor
        )
        theta, phi = theta[keep], phi[keep]
        ring = major + minor * np.cos(phi)
        batch = np.stack(
            [ring * np.cos(theta), minor * np.sin(phi), ring * np.sin(theta)], axis=1
        )
        accepted.append(batch)
        total += len(batch)
    return np.concatenate(accepted)[:count]
