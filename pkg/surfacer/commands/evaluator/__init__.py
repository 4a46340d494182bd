"""
Evaluate a reconstructed mesh or point set against the configured scene.

Reports the Chamfer-L1 distance to points sampled on the analytic surface and,
with --delta-sweep, how well the fused ground-truth prior separates on-surface
from off-surface samples for several band thresholds.
"""
import argparse
import pathlib

import yaml

from surfacer import evaluating
from surfacer import fusing
from surfacer import interactivity
from surfacer import optimizing
from surfacer import parsing
from surfacer import scenes
from surfacer import templating


def populate_subparser(parser: argparse.ArgumentParser):
    """Populate parser for this command."""
    parsing.populate_run_arguments(parser)
    parser.add_argument(
        "mesh",
        nargs="?",
        help="PLY mesh or point set to evaluate; defaults to output mesh.ply.",
    )
    parser.add_argument(
        "--delta-sweep",
        dest="deltas",
        type=float,
        nargs="+",
        metavar="DELTA",
        help="Band thresholds to report accuracy for, e.g. 0.7 0.5 0.3 0.1.",
    )
    parser.add_argument(
        "--grid",
        help="Prior grid used by the sweep; the ground truth is fused when omitted.",
    )


def _sweep(
    ex: "interactivity.Execution",
    scene: "scenes.AnalyticScene",
    config: "optimizing.TrainConfig",
) -> list:
    """Classify noisy surface samples against the prior for every threshold."""
    context = ex.context
    if grid_path := ex.args.get("grid"):
        grid = fusing.read_grid(grid_path)
    else:
        spec, truncation = optimizing.prior_spec(scene, config)
        grid = fusing.fuse_ground_truth(scene.views, spec, truncation, context.threads)
    rows = evaluating.delta_sweep(
        grid, scene.shape, ex.args["deltas"], seed=context.seed
    )
    templating.printer("commands/evaluator/sweep.jinja2", rows=rows)
    return [r.serialize() for r in rows]


def run(ex: "interactivity.Execution") -> "interactivity.Execution":
    """Execute an evaluation of reconstruction quality."""
    context = ex.context
    directory = context.output_directory
    config = optimizing.TrainConfig.from_configuration(context.configuration)
    scene = scenes.load_configured_scene(context.configuration, context.threads)

    info: dict = {}
    source = pathlib.Path(ex.args.get("mesh") or directory.joinpath("mesh.ply"))
    if ex.args.get("mesh") or not ex.args.get("deltas"):
        if not source.exists():
            raise FileNotFoundError(f"Mesh file not found: {source}")
        mesh = evaluating.read_ply(source)
        target = scenes.chamfer_pointcloud(scene, config.chamfer_samples, context.seed)
        predicted = mesh.vertices if mesh.is_empty else mesh
        info["chamfer_l1"] = evaluating.chamfer_l1(
            predicted, target, config.chamfer_samples, context.seed
        )
        info["mesh"] = str(source)

    if ex.args.get("deltas"):
        info["delta_sweep"] = _sweep(ex, scene, config)

    report = directory.joinpath("eval.yaml")
    report.parent.mkdir(parents=True, exist_ok=True)
    report.write_text(yaml.safe_dump(info, sort_keys=False))
    return ex.finalize(
        status="EVALUATED",
        message=f"Evaluation written to {report}.",
        info=info,
        echo=True,
    )
