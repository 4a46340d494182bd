"""
Fuse depth maps of the configured scene into a TSDF grid file.

Fuses the ground-truth depths by default, or the depths rendered from a
training checkpoint when one is given.
"""
import argparse
import pathlib

from surfacer import fusing
from surfacer import interactivity
from surfacer import optimizing
from surfacer import parsing
from surfacer import scenes


def populate_subparser(parser: argparse.ArgumentParser):
    """Populate parser for this command."""
    parsing.populate_run_arguments(parser)
    parser.add_argument(
        "--checkpoint",
        help="Fuse depths rendered from this checkpoint instead of ground truth.",
    )
    parser.add_argument(
        "--sigma",
        type=float,
        default=1.0,
        help="Band scaling multiplied into the configured base truncation.",
    )
    parser.add_argument(
        "--output",
        help="Grid file to write; defaults to fused.tsdf in the output directory.",
    )


def run(ex: "interactivity.Execution") -> "interactivity.Execution":
    """Execute a fusion of depth maps."""
    context = ex.context
    config = optimizing.TrainConfig.from_configuration(context.configuration)
    scene = scenes.load_configured_scene(context.configuration, context.threads)
    spec, base_truncation = optimizing.prior_spec(scene, config)
    truncation = base_truncation * ex.args["sigma"]

    if checkpoint_path := ex.args.get("checkpoint"):
        checkpoint = optimizing.load_checkpoint(checkpoint_path)
        depths, masks = fusing.render_depth_maps(
            checkpoint.cloud,
            scene.views,
            config.near,
            config.far,
            config.alpha_threshold,
            context.threads,
        )
        grid = fusing.fuse_depth_maps(
            scene.views, depths, spec, truncation, masks, context.threads
        )
    else:
        grid = fusing.fuse_ground_truth(scene.views, spec, truncation, context.threads)

    target = pathlib.Path(
        ex.args.get("output") or context.output_directory.joinpath("fused.tsdf")
    )
    fusing.write_grid(grid, target)
    if context.verbose:
        print(f"[FUSED]: {grid.observed_count} observed voxels")

    return ex.finalize(
        status="FUSED",
        message=f"Grid written to {target}.",
        info={
            "path": str(target),
            "dims": list(grid.dims),
            "truncation": float(grid.truncation),
            "observed": grid.observed_count,
        },
        data={"grid": grid},
        echo=True,
    )
