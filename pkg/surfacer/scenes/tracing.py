"""Sphere tracing of analytic scenes into ground-truth rasters."""
import concurrent.futures
import typing

import numpy as np

from surfacer.definitions import cameras
from surfacer.scenes import building

MAX_STEPS = 64
#: Hit tolerance relative to the scene scale.
RELATIVE_TOLERANCE = 1e-5


def sphere_trace(
    distance_function: typing.Callable[[np.ndarray], np.ndarray],
    origins: np.ndarray,
    directions: np.ndarray,
    tolerance: float,
    max_distance: float,
    steps: int = MAX_STEPS,
) -> typing.Tuple[np.ndarray, np.ndarray]:
    """
    March unit-direction rays until the distance function falls under tolerance.

    :return:
        Ray parameters of the first hits and flags telling which rays hit.
    """
    t = np.zeros(len(directions))
    active = np.ones(len(directions), dtype=bool)
    hit = np.zeros(len(directions), dtype=bool)
    for _ in range(steps):
        if not active.any():
            break
        indices = np.flatnonzero(active)
        distances = distance_function(
            origins[indices] + t[indices, None] * directions[indices]
        )
        converged = distances < tolerance
        hit[indices[converged]] = True
        t[indices[~converged]] += distances[~converged]
        active[indices[converged]] = False
        active[indices[t[indices] > max_distance]] = False
    return t, hit


def render_ground_truth(
    scene: "building.AnalyticScene",
    view: "cameras.CameraView",
) -> typing.Tuple[np.ndarray, np.ndarray]:
    """
    Render the exact RGB and depth rasters of a view.

    Depth is the camera z of the first surface hit; pixels whose rays miss
    get depth 0 (invalid) and the background color. Color is the checker
    albedo times a Lambert term lit from the camera. RGB is quantized to 8
    bits so that cached and freshly rendered rasters agree exactly.
    """
    local = view.pixel_directions.reshape(-1, 3)
    lengths = np.linalg.norm(local, axis=1)
    directions = (local / lengths[:, None]) @ view.rotation
    origins = np.broadcast_to(view.center, directions.shape)
    shape = scene.shape
    distance_to_center = float(np.linalg.norm(view.center - shape.center))
    t, hit = sphere_trace(
        shape.sdf,
        origins,
        directions,
        tolerance=RELATIVE_TOLERANCE * shape.scale,
        max_distance=distance_to_center + 2.0 * shape.scale,
    )

    depth = np.where(hit, t / lengths, 0.0)
    points = origins + t[:, None] * directions
    lambert = np.clip(-np.sum(shape.normals(points) * directions, axis=1), 0.0, 1.0)
    shaded = scene.checker.albedo(points) * lambert[:, None]
    rgb = np.where(hit[:, None], shaded, scene.background)
    rgb = np.round(np.clip(rgb, 0.0, 1.0) * 255.0) / 255.0
    depth = depth.astype(np.float32).astype(np.float64)
    return rgb.reshape(view.height, view.width, 3), depth.reshape(
        view.height, view.width
    )


def attach_ground_truth(
    scene: "building.AnalyticScene",
    threads: int = 1,
) -> "building.AnalyticScene":
    """Create a copy of the scene whose views carry their ground-truth rasters."""

    def work(view: "cameras.CameraView") -> "cameras.CameraView":
        rgb, depth = render_ground_truth(scene, view)
        return view.with_rasters(rgb, depth, depth > 0)

    with concurrent.futures.ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        return scene.with_views(list(pool.map(work, scene.views)))
