"""On-disk cache of ground-truth rasters."""
import pathlib
import typing

from surfacer.definitions import configurations
from surfacer.rendering import rasters
from surfacer.scenes import building
from surfacer.scenes import tracing


def load_ground_truth(
    scene: "building.AnalyticScene",
    directory: typing.Optional[pathlib.Path] = None,
    threads: int = 1,
) -> "building.AnalyticScene":
    """
    Attach ground-truth rasters to every view, reusing cached files when present.

    Depth is cached as `<view>.pfm` and color as `<view>.png`. Views missing
    from the cache are rendered and written back, then every view is read from
    the cache so first and later runs see identical rasters.
    """
    if directory is None:
        return tracing.attach_ground_truth(scene, threads)

    directory = pathlib.Path(directory)
    cached = all(
        directory.joinpath(f"{v.name}.{suffix}").exists()
        for v in scene.views
        for suffix in ("pfm", "png")
    )
    if not cached:
        rendered = tracing.attach_ground_truth(scene, threads)
        for view in rendered.views:
            rasters.write_pfm(directory.joinpath(f"{view.name}.pfm"), view.gt_depth)
            rasters.write_png(directory.joinpath(f"{view.name}.png"), view.gt_rgb)

    views = []
    for view in scene.views:
        depth = rasters.read_pfm(directory.joinpath(f"{view.name}.pfm")).astype(float)
        rgb = rasters.read_png(directory.joinpath(f"{view.name}.png"))
        views.append(view.with_rasters(rgb, depth, depth > 0))
    return scene.with_views(views)


def load_configured_scene(
    configuration: "configurations.Configuration",
    threads: int = 1,
) -> "building.AnalyticScene":
    """Build the configured scene and attach its cached or freshly traced rasters."""
    scene = building.from_configuration(configuration)
    return load_ground_truth(scene, configuration.cache_directory, threads)
