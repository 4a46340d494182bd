"""Depth map fusion into a truncated signed distance grid."""
import concurrent.futures
import typing

import numpy as np

from surfacer.definitions import cameras
from surfacer.definitions import errors
from surfacer.fusing import grids
from surfacer.geometry import projections

#: Number of z-slices of the grid fused together as one work item.
SLICES_PER_CHUNK = 8


def _depth_validity(depth: np.ndarray, mask: typing.Optional[np.ndarray]) -> np.ndarray:
    """Combine an explicit mask with the implicit positive-finite depth rule."""
    valid = np.isfinite(depth) & (depth > 0)
    if mask is not None:
        valid &= np.asarray(mask, dtype=bool)
    return valid


def _fuse_chunk(
    spec: "grids.GridSpec",
    z_indices: np.ndarray,
    views: typing.Sequence["cameras.CameraView"],
    depths: typing.Sequence[np.ndarray],
    validities: typing.Sequence[np.ndarray],
    truncation: float,
) -> typing.Tuple[np.ndarray, np.ndarray]:
    """Accumulate normalized distance evidence for a slab of z-slices."""
    x_axis, y_axis, z_axis = spec.axes
    x, y, z = np.meshgrid(x_axis, y_axis, z_axis[z_indices], indexing="ij")
    points = np.stack([x, y, z], axis=-1)
    totals = np.zeros(x.shape)
    weights = np.zeros(x.shape)

    for view, depth, valid in zip(views, depths, validities):
        local = projections.transform_points(view.rotation, view.translation, points)
        camera_z = local[..., 2]
        with np.errstate(divide="ignore", invalid="ignore"):
            fx, fy = view.intrinsics[0, 0], view.intrinsics[1, 1]
            u = fx * (local[..., 0] / camera_z) + view.intrinsics[0, 2]
            v = fy * (local[..., 1] / camera_z) + view.intrinsics[1, 2]
            columns = np.floor(u + 0.5)
            rows = np.floor(v + 0.5)
            in_frame = (
                (camera_z > 0)
                & (columns >= 0)
                & (columns < depth.shape[1])
                & (rows >= 0)
                & (rows < depth.shape[0])
            )

        c = np.where(in_frame, columns, 0).astype(np.int64)
        r = np.where(in_frame, rows, 0).astype(np.int64)
        observed = in_frame & valid[r, c]
        distance = depth[r, c] - camera_z
        keep = observed & (distance >= -truncation)
        totals[keep] += np.clip(distance[keep] / truncation, -1.0, 1.0)
        weights[keep] += 1.0

    return totals, weights


def fuse_depth_maps(
    views: typing.Sequence["cameras.CameraView"],
    depths: typing.Sequence[np.ndarray],
    spec: "grids.GridSpec",
    truncation: float,
    masks: typing.Optional[typing.Sequence[typing.Optional[np.ndarray]]] = None,
    threads: int = 1,
) -> "grids.TsdfGrid":
    """
    Fuse depth maps into a normalized TSDF grid.

    Every voxel center projecting in front of a camera onto a valid depth pixel
    (nearest pixel) contributes clamp((d - z) / T, -1, 1) with weight 1, unless
    it lies more than T behind the observed surface. The fused value is the
    mean contribution; voxels without contributions keep value +1 and weight 0.

    :param views:
        Cameras the depth maps were rendered or captured from.
    :param depths:
        Depth rasters (camera z, world units), one per view.
    :param spec:
        Placement and resolution of the output grid.
    :param truncation:
        Metric truncation distance T.
    :param masks:
        Optional per-view validity masks combined with the positive depth rule.
    :param threads:
        Worker count for fusing independent slabs of the grid.
    """
    if not views or len(views) != len(depths):
        raise errors.InvalidInputError(
            "Fusion needs one depth map per view and >= 1 view."
        )
    if truncation <= 0:
        raise errors.InvalidInputError("Fusion truncation must be positive.")

    masks = masks or [None] * len(views)
    validities = [_depth_validity(np.asarray(d), m) for d, m in zip(depths, masks)]
    depths = [np.asarray(d, dtype=np.float64) for d in depths]
    chunks = [
        np.arange(start, min(start + SLICES_PER_CHUNK, spec.dims[2]))
        for start in range(0, spec.dims[2], SLICES_PER_CHUNK)
    ]

    def work(z_indices: np.ndarray) -> typing.Tuple[np.ndarray, np.ndarray]:
        return _fuse_chunk(spec, z_indices, views, depths, validities, truncation)

    with concurrent.futures.ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        results = list(pool.map(work, chunks))

    totals = np.concatenate([r[0] for r in results], axis=2)
    weights = np.concatenate([r[1] for r in results], axis=2)
    with np.errstate(divide="ignore", invalid="ignore"):
        values = np.where(weights > 0, totals / weights, 1.0)
    return grids.TsdfGrid(
        spec=spec, values=values, weights=weights, truncation=truncation
    )


def fuse_ground_truth(
    views: typing.Sequence["cameras.CameraView"],
    spec: "grids.GridSpec",
    truncation: float,
    threads: int = 1,
) -> "grids.TsdfGrid":
    """Fuse the ground-truth depth rasters carried by the views."""
    return fuse_depth_maps(
        views=views,
        depths=[v.gt_depth for v in views],
        spec=spec,
        truncation=truncation,
        masks=[v.depth_mask for v in views],
        threads=threads,
    )
