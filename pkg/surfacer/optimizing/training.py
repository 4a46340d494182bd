"""Training loop orchestrating rendering, losses, densification and the prior."""
import collections
import dataclasses
import pathlib
import typing

import numpy as np
import yaml

from surfacer import constraining
from surfacer import evaluating
from surfacer import fusing
from surfacer import rendering
from surfacer import scenes
from surfacer.definitions import cameras
from surfacer.definitions import errors
from surfacer.definitions import gaussians
from surfacer.optimizing import adam
from surfacer.optimizing import checkpoints
from surfacer.optimizing import densifying
from surfacer.optimizing import losses
from surfacer.optimizing import settings


@dataclasses.dataclass(frozen=True)
class TrainResult:
    """Final Gaussians of a run together with everything it measured."""

    cloud: "gaussians.GaussianCloud"
    trace: typing.List["checkpoints.TraceRow"]
    #: Number of times each pipeline operation was invoked.
    counters: typing.Counter[str]
    grid: typing.Optional["fusing.TsdfGrid"]
    mesh: "evaluating.Mesh"
    metrics: typing.Dict[str, float]
    state: "adam.OptimizerState"


@dataclasses.dataclass(frozen=True)
class IterationLosses:
    """Loss components of one iteration with the parameter gradients they produce."""

    components: "losses.LossComponents"
    total: float
    grads: typing.Dict[str, np.ndarray]
    output: "rendering.RenderOutput"


def _accumulate(
    into: typing.Dict[str, np.ndarray],
    other: typing.Dict[str, np.ndarray],
) -> typing.Dict[str, np.ndarray]:
    """Add parameter gradients key by key."""
    for name, values in other.items():
        into[name] = into[name] + values
    return into


def compute_losses(
    cloud: "gaussians.GaussianCloud",
    view: "cameras.CameraView",
    neighbor: typing.Optional["cameras.CameraView"],
    config: "settings.TrainConfig",
    iteration: int,
    classification: typing.Optional["constraining.Classification"] = None,
    background: typing.Optional[np.ndarray] = None,
    counters: typing.Optional[typing.Counter[str]] = None,
) -> "IterationLosses":
    """
    Render one view and evaluate every enabled loss term with its gradient.

    The geometric terms (normal smoothing, multi-view consistency and the
    patch correlation inside the image loss) start at the geometry warm-up
    iteration. The opacity constraint starts at its own iteration and uses
    the given classification as is; it is inactive without one.
    """
    counters = collections.Counter() if counters is None else counters
    weights = config.losses
    output = rendering.render_view(cloud, view, config.near, config.far, background)
    geometric = iteration >= weights.geometry_from_iter and neighbor is not None
    planes = rendering.PlaneMaps.from_render(output, config.alpha_threshold)

    correlation = None
    if geometric:
        correlation = rendering.warped_ncc(view, neighbor, planes)
    photometric = rendering.rgb_loss(output.rgb, view.gt_rgb, weights.beta, correlation)
    gradients = rendering.RenderGradients(rgb=photometric.grad_rgb)
    if correlation is not None and correlation.valid_count > 0:
        gradients += planes.backward(
            output, correlation.grad_normals, correlation.grad_distances
        )

    l_depth, grad_w, grad_rho = rendering.depth_distortion_loss(output.records)
    gradients += rendering.RenderGradients(
        record_weights=weights.depth * grad_w,
        record_depths=weights.depth * grad_rho,
    )

    l_ns = 0.0
    l_nm = 0.0
    neighbor_grads = None
    if iteration >= weights.geometry_from_iter:
        derived, ok = rendering.depth_to_normal(
            output.depth, view.intrinsics, valid=output.alpha > config.alpha_threshold
        )
        l_ns, grad_normal = rendering.normal_smooth_loss(
            output.normal, derived, view.gt_rgb, mask=ok
        )
        gradients += rendering.RenderGradients(
            normal=weights.normal_smooth * grad_normal
        )

    if geometric:
        neighbor_output = rendering.render_view(
            cloud, neighbor, config.near, config.far, background
        )
        neighbor_planes = rendering.PlaneMaps.from_render(
            neighbor_output, config.alpha_threshold
        )
        geometry = rendering.multiview_geom_loss(
            view, neighbor, planes, neighbor_planes
        )
        if not geometry.empty:
            l_nm = geometry.loss
            gradients += planes.backward(
                output,
                weights.multiview * geometry.reference_normals,
                weights.multiview * geometry.reference_distances,
            )
            neighbor_grads = rendering.backward(
                neighbor_output,
                cloud,
                neighbor_planes.backward(
                    neighbor_output,
                    weights.multiview * geometry.neighbor_normals,
                    weights.multiview * geometry.neighbor_distances,
                ),
            )

    grads = rendering.backward(output, cloud, gradients)
    if neighbor_grads is not None:
        _accumulate(grads, neighbor_grads)

    l_scp = 0.0
    scp_active = (
        config.use_prior
        and config.use_scp
        and classification is not None
        and iteration >= weights.scp_start
    )
    if scp_active:
        l_scp, grad_logits = constraining.scp_loss(cloud, classification)
        grads["opacity_logits"] = grads["opacity_logits"] + weights.scp * grad_logits
        counters["scp"] += 1

    l_flat, grad_scales = losses.flatten_loss(cloud)
    grads["log_scales"] = grads["log_scales"] + weights.flatten * grad_scales

    components = losses.LossComponents(
        rgb=photometric.total,
        depth=l_depth,
        normal_smooth=l_ns,
        multiview=l_nm,
        scp=l_scp,
        flatten=l_flat,
    )
    total = losses.total_loss(components, weights, iteration)
    for name, values in grads.items():
        if not np.isfinite(values).all():
            counters[f"nonfinite_{name}"] += 1
    return IterationLosses(
        components=components, total=total, grads=grads, output=output
    )


class _Logs:
    """Append-only plain-text logs of one training run."""

    def __init__(self, directory: typing.Optional[pathlib.Path]):
        """Create the log files, truncating those of an earlier run."""
        self.directory = directory
        if directory is not None:
            directory.mkdir(parents=True, exist_ok=True)
            for name in ("removals.log", "priors.log"):
                directory.joinpath(name).write_text("")

    def append(self, name: str, line: str):
        """Append one line to a log file."""
        if self.directory is None:
            return
        with self.directory.joinpath(name).open("a") as stream:
            stream.write(f"{line}\n")


def _constrain(
    cloud: "gaussians.GaussianCloud",
    state: "adam.OptimizerState",
    grid: "fusing.TsdfGrid",
    config: "settings.TrainConfig",
    iteration: int,
    counters: typing.Counter[str],
    logs: "_Logs",
    verbose: bool,
) -> typing.Tuple["gaussians.GaussianCloud", "adam.OptimizerState"]:
    """Pull Gaussians onto the prior surface, then drop the ones outside its band."""
    if config.use_project:
        cloud, moved = constraining.project_to_surface(
            cloud, grid, literal=config.literal_projection
        )
        counters["project"] += 1
        counters["projected"] += moved

    if config.use_remove:
        cloud, report, kept = constraining.remove_outliers(
            cloud, grid, config.schedule.delta, config.remove_unobserved
        )
        state = state.remap(kept)
        counters["remove"] += 1
        counters["removed"] += len(report.removed)
        logs.append("removals.log", report.to_line(iteration))
        if verbose and report.removed:
            print(f"[REMOVED]: {report.to_line(iteration)}")

    if len(cloud) == 0:
        raise errors.EmptyGaussianSetError(
            f"Outlier removal at iteration {iteration} left no Gaussians."
        )
    return cloud, state


def _classify(
    cloud: "gaussians.GaussianCloud",
    grid: "fusing.TsdfGrid",
    config: "settings.TrainConfig",
    counters: typing.Counter[str],
) -> typing.Optional["constraining.Classification"]:
    """Label the current Gaussians for the opacity constraint."""
    if not config.use_scp:
        return None
    counters["classify"] += 1
    return constraining.classify_cloud(grid, config.schedule.delta, cloud)


def prior_spec(
    scene: "scenes.AnalyticScene",
    config: "settings.TrainConfig",
) -> typing.Tuple["fusing.GridSpec", float]:
    """Get the prior grid placement and its base truncation distance."""
    lower, upper = scene.bounds
    spec = fusing.GridSpec.from_bounds(
        lower, upper, config.grid.resolution, config.grid.padding
    )
    return spec, config.grid.truncation_voxels * spec.voxel_size


def evaluate_cloud(
    scene: "scenes.AnalyticScene",
    cloud: "gaussians.GaussianCloud",
    config: "settings.TrainConfig",
    threads: int = 1,
    seed: int = 0,
) -> typing.Tuple["fusing.TsdfGrid", "evaluating.Mesh", typing.Dict[str, float]]:
    """
    Fuse rendered depths at the base truncation and measure the result.

    :return:
        The fused grid, the extracted mesh, and the Chamfer-L1 to the
        analytic surface with the mean PSNR over the training views.
    """
    spec, truncation = prior_spec(scene, config)
    outputs = rendering.render_views(
        cloud, scene.views, config.near, config.far, scene.background, threads=threads
    )
    grid = fusing.fuse_depth_maps(
        views=scene.views,
        depths=[o.depth for o in outputs],
        spec=spec,
        truncation=truncation,
        masks=[o.alpha > config.alpha_threshold for o in outputs],
        threads=threads,
    )
    mesh = evaluating.extract_mesh(grid)
    target = scenes.chamfer_pointcloud(scene, config.chamfer_samples, seed)
    chamfer = (
        float("inf")
        if mesh.is_empty
        else evaluating.chamfer_l1(mesh, target, config.chamfer_samples, seed)
    )
    psnrs = [evaluating.psnr(o.rgb, v.gt_rgb) for o, v in zip(outputs, scene.views)]
    metrics = {
        "chamfer_l1": chamfer,
        "psnr": float(np.mean(psnrs)),
        "num_gaussians": float(len(cloud)),
        "mesh_faces": float(len(mesh)),
    }
    return grid, mesh, metrics


def train(
    scene: "scenes.AnalyticScene",
    config: "settings.TrainConfig",
    output_directory: typing.Optional[pathlib.Path] = None,
    threads: int = 1,
    seed: int = 0,
    verbose: bool = False,
    cloud: typing.Optional["gaussians.GaussianCloud"] = None,
) -> "TrainResult":
    """
    Optimize Gaussians against the ground-truth views of a scene.

    One view is used per iteration in round-robin order, paired with one of
    its nearest neighbours in alternation. After each Adam step the prior is
    re-fused when scheduled. After each densification event the centers are
    projected onto the prior surface and only then are outliers removed.
    Nothing touches the prior when it is disabled.

    :param output_directory:
        Where the trace, logs, checkpoints, mesh and metrics are written;
        nothing is written when omitted.
    :param cloud:
        Starting Gaussians; initialized from the scene when omitted.
    """
    if len(scene.views) < 2:
        raise errors.InvalidInputError("Training needs a scene with at least 2 views.")
    if any(v.gt_rgb is None for v in scene.views):
        raise errors.InvalidInputError(
            "Training needs ground-truth rasters on every view."
        )

    directory = None if output_directory is None else pathlib.Path(output_directory)
    logs = _Logs(directory)
    rng = np.random.default_rng(seed)
    counters: typing.Counter[str] = collections.Counter()

    if cloud is None:
        cloud = scenes.init_gaussians(scene, config.init_count, config.init_mode, seed)
    cloud = cloud.copy()
    state = adam.OptimizerState.zeros(cloud)
    stats = densifying.DensifyStats.zeros(len(cloud))
    neighbors = rendering.nearest_neighbors(scene.views, config.neighbors)
    spec, base_truncation = prior_spec(scene, config)
    schedule = config.schedule
    grid: typing.Optional["fusing.TsdfGrid"] = None
    # Band labels stay fixed until the next prior or densify event.
    classification: typing.Optional["constraining.Classification"] = None
    trace: typing.List["checkpoints.TraceRow"] = []

    for iteration in range(1, config.iterations + 1):
        index = (iteration - 1) % len(scene.views)
        view = scene.views[index]
        candidates = neighbors[index]
        lap = (iteration - 1) // len(scene.views)
        neighbor = None
        if candidates:
            neighbor = scene.views[candidates[lap % len(candidates)]]

        step = compute_losses(
            cloud,
            view,
            neighbor,
            config,
            iteration,
            classification,
            scene.background,
            counters,
        )
        if iteration <= config.densify.stop_iter:
            stats.add(step.grads["centers"], step.output)

        rates = config.learning_rates.at(iteration, config.iterations, scene.extent)
        adam.adam_step(cloud, step.grads, state, rates, config.betas, config.eps)
        if not cloud.is_finite():
            raise errors.NonFiniteError("parameters", iteration)

        if config.use_prior:
            fused = fusing.maybe_update_prior(
                schedule,
                iteration,
                cloud,
                scene.views,
                spec,
                base_truncation,
                config.near,
                config.far,
                config.alpha_threshold,
                threads,
            )
            if fused is not None:
                grid = fused
                sigma = schedule.sigma_at(iteration)
                schedule = schedule.advanced(iteration)
                counters["prior_update"] += 1
                line = (
                    f"iter={iteration} sigma={sigma} truncation={grid.truncation}"
                    f" observed={grid.observed_count}"
                )
                logs.append("priors.log", line)
                if verbose:
                    print(f"[PRIOR]: {line}")
                classification = _classify(cloud, grid, config, counters)

        if config.densify.fires_at(iteration):
            result = densifying.densify(
                cloud, stats.means(), config.densify, scene.extent, rng
            )
            cloud = result.cloud
            state = state.remap(result.sources)
            counters["densify"] += 1
            if verbose:
                print(f"[DENSIFIED]: {result.to_line(iteration)}")
            if config.use_prior and grid is not None:
                cloud, state = _constrain(
                    cloud, state, grid, config, iteration, counters, logs, verbose
                )
                classification = _classify(cloud, grid, config, counters)
            stats = densifying.DensifyStats.zeros(len(cloud))

        if config.densify.resets_at(iteration):
            densifying.reset_opacity(cloud, state)
            counters["opacity_reset"] += 1

        components = step.components
        trace.append(
            checkpoints.TraceRow(
                iteration=iteration,
                l_rgb=components.rgb,
                l_depth=components.depth,
                l_ns=components.normal_smooth,
                l_nm=components.multiview,
                l_scp=components.scp,
                total=step.total,
                num_gaussians=len(cloud),
            )
        )

        interval = config.checkpoint_interval
        if directory is not None and interval > 0 and iteration % interval == 0:
            path = directory.joinpath("checkpoints", f"iter_{iteration:06d}.npz")
            checkpoints.save_checkpoint(path, cloud, state, iteration)
            if verbose:
                print(f"[CHECKPOINT]: {path}")

    final_grid, mesh, metrics = evaluate_cloud(scene, cloud, config, threads, seed)
    metrics["skipped_updates"] = float(sum(state.skipped.values()))

    if directory is not None:
        checkpoints.save_checkpoint(
            directory.joinpath("checkpoints", "final.npz"),
            cloud,
            state,
            config.iterations,
        )
        checkpoints.write_trace(directory.joinpath("trace.csv"), trace, metrics)
        fusing.write_grid(final_grid, directory.joinpath("final.tsdf"))
        evaluating.write_ply(mesh, directory.joinpath("mesh.ply"))
        directory.joinpath("metrics.yaml").write_text(
            yaml.safe_dump(metrics, sort_keys=True)
        )
        if verbose:
            print(f"[WRITTEN]: {directory}")

    return TrainResult(
        cloud=cloud,
        trace=trace,
        counters=counters,
        grid=grid,
        mesh=mesh,
        metrics=metrics,
        state=state,
    )
