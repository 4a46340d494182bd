"""
Train Gaussians on the configured scene with the self-constrained prior.

Writes the loss trace, removal and prior logs, periodic checkpoints, the final
mesh and metrics.yaml into the output directory. Ablation flags switch off
individual parts of the prior pipeline.
"""
import argparse

from surfacer import interactivity
from surfacer import optimizing
from surfacer import parsing
from surfacer import scenes


def populate_subparser(parser: argparse.ArgumentParser):
    """Populate parser for this command."""
    parsing.populate_run_arguments(parser)
    parser.add_argument(
        "--no-prior",
        action="store_true",
        help="Never fuse the prior; disables every constraint below too.",
    )
    parser.add_argument(
        "--no-scp",
        action="store_true",
        help="Disable the opacity constraint.",
    )
    parser.add_argument(
        "--no-remove",
        action="store_true",
        help="Disable outlier removal after densification.",
    )
    parser.add_argument(
        "--no-project",
        action="store_true",
        help="Disable pulling Gaussians onto the prior surface.",
    )
    parser.add_argument(
        "--bandwidth-fixed",
        type=float,
        metavar="SIGMA",
        help="Use the same band scaling for every prior update.",
    )
    parser.add_argument(
        "--remove-unobserved",
        action="store_true",
        help="Also remove Gaussians in space no camera observed.",
    )
    parser.add_argument(
        "--literal-eq5",
        "--literal-projection",
        dest="literal_projection",
        action="store_true",
        help="""
            Project with the unscaled step -s * grad f instead of the
            metric step along the normalized gradient.
            """,
    )
    parser.add_argument(
        "--iterations",
        type=int,
        help="Override the configured number of iterations.",
    )


def run(ex: "interactivity.Execution") -> "interactivity.Execution":
    """Execute a training run."""
    context = ex.context
    config = optimizing.TrainConfig.from_configuration(context.configuration)
    config = config.with_flags(argparse.Namespace(**ex.args))

    scene = scenes.load_configured_scene(context.configuration, context.threads)
    if context.verbose:
        print(f"[SCENE]: {scene.shape.kind.value} seen from {len(scene.views)} views")

    result = optimizing.train(
        scene,
        config,
        output_directory=context.output_directory,
        threads=context.threads,
        seed=context.seed,
        verbose=context.verbose,
    )
    info = {
        "iterations": config.iterations,
        "num_gaussians": len(result.cloud),
        "chamfer_l1": result.metrics["chamfer_l1"],
        "psnr": result.metrics["psnr"],
        "counters": dict(sorted(result.counters.items())),
    }
    return ex.finalize(
        status="TRAINED",
        message=f"Training artifacts written to {context.output_directory}.",
        info=info,
        data={"result": result, "config": config},
        echo=True,
    )
