"""
Extract the zero level set of a TSDF grid file as a binary PLY mesh.

Triangles in cells touching unobserved voxels are dropped.
"""
import argparse
import pathlib

from surfacer import evaluating
from surfacer import fusing
from surfacer import interactivity


def populate_subparser(parser: argparse.ArgumentParser):
    """Populate parser for this command."""
    parser.add_argument(
        "grid",
        nargs="?",
        help="Grid file to read; defaults to fused.tsdf in the output directory.",
    )
    parser.add_argument(
        "--output",
        help="Mesh file to write; defaults to mesh.ply in the output directory.",
    )


def run(ex: "interactivity.Execution") -> "interactivity.Execution":
    """Execute a mesh extraction."""
    directory = ex.context.output_directory
    source = pathlib.Path(ex.args.get("grid") or directory.joinpath("fused.tsdf"))
    if not source.exists():
        raise FileNotFoundError(f"Grid file not found: {source}")

    grid = fusing.read_grid(source)
    mesh = evaluating.extract_mesh(grid)
    target = pathlib.Path(ex.args.get("output") or directory.joinpath("mesh.ply"))
    evaluating.write_ply(mesh, target)

    return ex.finalize(
        status="EXTRACTED",
        message=f"Mesh written to {target}.",
        info={
            "path": str(target),
            "vertices": len(mesh.vertices),
            "faces": len(mesh.faces),
        },
        data={"mesh": mesh},
        echo=True,
    )
