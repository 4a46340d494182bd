"""
Render RGB, depth, normal and alpha rasters of a checkpoint.

Each selected view is written as <view>_rgb.png, <view>_depth.pfm,
<view>_normal.png and <view>_alpha.png under renders/ in the output directory.
"""
import argparse
import pathlib

import numpy as np

from surfacer import evaluating
from surfacer import interactivity
from surfacer import optimizing
from surfacer import parsing
from surfacer import rendering
from surfacer import scenes
from surfacer.definitions import errors


def populate_subparser(parser: argparse.ArgumentParser):
    """Populate parser for this command."""
    parsing.populate_run_arguments(parser)
    parser.add_argument("checkpoint", help="Checkpoint file to render.")
    parser.add_argument(
        "--view",
        dest="views",
        type=int,
        action="append",
        help="Index of a view to render; repeatable. All views by default.",
    )


def run(ex: "interactivity.Execution") -> "interactivity.Execution":
    """Execute a render of checkpointed Gaussians."""
    context = ex.context
    config = optimizing.TrainConfig.from_configuration(context.configuration)
    scene = scenes.load_configured_scene(context.configuration, context.threads)
    checkpoint = optimizing.load_checkpoint(ex.args["checkpoint"])

    indices = ex.args.get("views") or list(range(len(scene.views)))
    if any(i < 0 or i >= len(scene.views) for i in indices):
        raise errors.InvalidInputError(
            f"View indices {indices} out of range for {len(scene.views)} views."
        )

    views = [scene.views[i] for i in indices]
    outputs = rendering.render_views(
        checkpoint.cloud,
        views,
        config.near,
        config.far,
        scene.background,
        threads=context.threads,
    )
    directory = pathlib.Path(context.output_directory).joinpath("renders")
    psnrs = {}
    for view, output in zip(views, outputs):
        rendering.write_png(directory.joinpath(f"{view.name}_rgb.png"), output.rgb)
        depth = np.where(output.alpha > config.alpha_threshold, output.depth, np.nan)
        rendering.write_pfm(directory.joinpath(f"{view.name}_depth.pfm"), depth)
        rendering.write_png(
            directory.joinpath(f"{view.name}_normal.png"), 0.5 * (output.normal + 1.0)
        )
        rendering.write_png(
            directory.joinpath(f"{view.name}_alpha.png"),
            np.repeat(output.alpha[..., None], 3, axis=-1),
        )
        psnrs[view.name] = evaluating.psnr(output.rgb, view.gt_rgb)

    return ex.finalize(
        status="RENDERED",
        message=f"Rendered {len(views)} views into {directory}.",
        info={
            "iteration": checkpoint.iteration,
            "views": len(views),
            "psnr": float(np.mean(list(psnrs.values()))),
        },
        data={"outputs": outputs, "psnr": psnrs},
        echo=True,
    )
