"""Surface extraction from TSDF grids and triangle mesh utilities."""
import dataclasses
import pathlib
import typing

import numpy as np
import plyfile
from skimage import measure

from surfacer.fusing import grids


@dataclasses.dataclass(frozen=True, eq=False)
class Mesh:
    """Indexed triangle mesh in world coordinates."""

    vertices: np.ndarray
    faces: np.ndarray

    def __len__(self) -> int:
        """Get the number of triangles."""
        return len(self.faces)

    @property
    def is_empty(self) -> bool:
        """Whether the mesh has no triangles."""
        return len(self.faces) == 0

    @classmethod
    def empty(cls) -> "Mesh":
        """Create a mesh without vertices or faces."""
        return cls(np.zeros((0, 3)), np.zeros((0, 3), dtype=np.int64))

    @property
    def areas(self) -> np.ndarray:
        """Get the area of every triangle."""
        a, b, c = (self.vertices[self.faces[:, i]] for i in range(3))
        return 0.5 * np.linalg.norm(np.cross(b - a, c - a), axis=1)

    def sample_points(self, count: int, seed: int = 0) -> np.ndarray:
        """Draw points uniformly by area over the triangles."""
        rng = np.random.default_rng(seed)
        areas = self.areas
        chosen = rng.choice(len(self.faces), size=count, p=areas / areas.sum())
        u, v = rng.uniform(size=(2, count))
        flip = u + v > 1
        u[flip], v[flip] = 1 - u[flip], 1 - v[flip]
        a, b, c = (self.vertices[self.faces[chosen, i]] for i in range(3))
        return a + u[:, None] * (b - a) + v[:, None] * (c - a)

    def edge_counts(self) -> typing.Dict[typing.Tuple[int, int], int]:
        """Count how many triangles share each undirected edge."""
        edges = np.concatenate(
            [self.faces[:, [0, 1]], self.faces[:, [1, 2]], self.faces[:, [2, 0]]]
        )
        edges = np.sort(edges, axis=1)
        unique, counts = np.unique(edges, axis=0, return_counts=True)
        return {(int(a), int(b)): int(n) for (a, b), n in zip(unique, counts)}


def _compact(vertices: np.ndarray, faces: np.ndarray) -> "Mesh":
    """Drop vertices no face references and renumber the faces."""
    used, inverse = np.unique(faces.ravel(), return_inverse=True)
    return Mesh(vertices[used], inverse.reshape(faces.shape).astype(np.int64))


def extract_mesh(grid: "grids.TsdfGrid") -> "Mesh":
    """
    Extract the zero level set of a grid with marching cubes.

    Vertices are placed by linear interpolation along cell edges and returned
    in world coordinates. Triangles inside cells touching an unobserved voxel
    are dropped. A grid without a sign change yields an empty mesh.
    """
    values = grid.values
    if not (np.min(values) < 0.0 < np.max(values)):
        return Mesh.empty()

    vertices, faces, _, _ = measure.marching_cubes(
        values.astype(np.float64),
        level=0.0,
        spacing=(grid.voxel_size,) * 3,
        allow_degenerate=False,
    )
    faces = faces.astype(np.int64)
    centroids = vertices[faces].mean(axis=1) / grid.voxel_size
    cells = np.clip(np.floor(centroids), 0, np.asarray(grid.dims) - 2).astype(np.int64)
    i, j, k = cells[:, 0], cells[:, 1], cells[:, 2]
    observed = np.ones(len(faces), dtype=bool)
    for a in (0, 1):
        for b in (0, 1):
            for c in (0, 1):
                observed &= grid.weights[i + a, j + b, k + c] > 0

    if not observed.any():
        return Mesh.empty()
    return _compact(vertices + grid.origin, faces[observed])


def write_ply(mesh: "Mesh", path: typing.Union[str, pathlib.Path]) -> pathlib.Path:
    """Write the mesh as binary little-endian PLY with positions and faces."""
    vertices = np.empty(
        len(mesh.vertices), dtype=[("x", "<f4"), ("y", "<f4"), ("z", "<f4")]
    )
    vertices["x"], vertices["y"], vertices["z"] = mesh.vertices.T
    faces = np.empty(len(mesh.faces), dtype=[("vertex_indices", "<i4", (3,))])
    faces["vertex_indices"] = mesh.faces
    target = pathlib.Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    plyfile.PlyData(
        [
            plyfile.PlyElement.describe(vertices, "vertex"),
            plyfile.PlyElement.describe(faces, "face"),
        ],
        text=False,
        byte_order="<",
    ).write(str(target))
    return target


def read_ply(path: typing.Union[str, pathlib.Path]) -> "Mesh":
    """Read a PLY mesh; point-only files come back without faces."""
    data = plyfile.PlyData.read(str(path))
    vertex = data["vertex"]
    vertices = np.stack([vertex["x"], vertex["y"], vertex["z"]], axis=1).astype(
        np.float64
    )
    names = [e.name for e in data.elements]
    if "face" not in names or data["face"].count == 0:
        return Mesh(vertices, np.zeros((0, 3), dtype=np.int64))
    faces = np.stack(
        [np.asarray(f, dtype=np.int64) for f in data["face"]["vertex_indices"]]
    )
    return Mesh(vertices, faces)
