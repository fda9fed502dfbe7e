"""Command-line entry point: gen-data, train, eval, infer, serve."""

import json
import os
import sys
from dataclasses import asdict
from pathlib import Path

import click
import numpy as np
import yaml

from . import datagen, dataset, images, metrics
from .model.generator import GeneratorConfig
from .model.infer import infer as run_infer
from .model.train import TrainConfig, load_checkpoint, train as run_train
from .render import stress_to_color

DEVICE_ENV = "STRESSPIX_DEVICE"


def _device() -> str:
    return os.environ.get(DEVICE_ENV, "cpu")


def _load_config_defaults(ctx, param, value):
    """--config YAML populates click's default map (explicit flags still win)."""
    if value is None:
        return None
    with open(value) as fh:
        data = yaml.safe_load(fh) or {}
    ctx.default_map = ctx.default_map or {}
    ctx.default_map.update(data)
    return value


def _write_run_json(out_dir: Path, payload: dict) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "run.json").write_text(json.dumps(payload, indent=2, sort_keys=True, default=str))


config_option = click.option(
    "--config",
    type=click.Path(exists=True),
    callback=_load_config_defaults,
    is_eager=True,
    expose_value=False,
    help="YAML file whose keys override option defaults.",
)


@click.group()
def main():
    """Sketch-based structural stress analysis pipeline."""


@main.command("gen-data")
@config_option
@click.option("--mesh-dir", type=click.Path(), default=None, help="Directory of OBJ/STL meshes.")
@click.option("--out", "out_dir", type=click.Path(), required=True)
@click.option("--views", default="0,45,90", show_default=True, help="Comma-separated azimuths.")
@click.option("--elevation", default=10.0, show_default=True)
@click.option("--forces", default=250, show_default=True, help="Force samples per view.")
@click.option("--fem-resolution", default=32, show_default=True)
@click.option("--image-size", default=256, show_default=True)
@click.option("--norm-mode", type=click.Choice(["shape", "category"]), default="shape")
@click.option("--tau", default=100.0, show_default=True)
@click.option("--fixed-ratio", default=0.03, show_default=True)
@click.option("--young-modulus", default=1e9, show_default=True)
@click.option("--poisson-ratio", default=0.3, show_default=True)
@click.option("--test-fraction", default=0.2, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--toy", is_flag=True, help="Small built-in preset: 2 procedural shapes, 64^2.")
def gen_data(
    mesh_dir, out_dir, views, elevation, forces, fem_resolution, image_size,
    norm_mode, tau, fixed_ratio, young_modulus, poisson_ratio, test_fraction, seed, toy,
):
    """Synthesize quadruples from meshes by FEM simulation and rendering."""
    out = Path(out_dir)
    if toy:
        if mesh_dir is None:
            mesh_dir = str(out / "meshes")
        datagen.write_toy_meshes(mesh_dir)
        cfg = datagen.toy_config(mesh_dir, out, seed=seed)
    else:
        if mesh_dir is None:
            raise click.UsageError("--mesh-dir is required without --toy")
        cfg = datagen.PipelineConfig(
            mesh_dir=mesh_dir,
            out_dir=str(out),
            azimuths=tuple(float(v) for v in views.split(",")),
            elevation_deg=elevation,
            forces_per_view=forces,
            fem_resolution=fem_resolution,
            image_size=image_size,
            norm_mode=norm_mode,
            tau=tau,
            fixed_ratio=fixed_ratio,
            young_modulus=young_modulus,
            poisson_ratio=poisson_ratio,
            test_fraction=test_fraction,
            seed=seed,
        )
    manifest, report = datagen.generate_dataset(cfg)
    click.echo(f"wrote {report.samples_written} samples from {len(report.shapes_ok)} shapes")
    for shape_id, err in report.shapes_failed.items():
        click.echo(f"  failed {shape_id}: {err}", err=True)
    if not report.shapes_ok:
        sys.exit(1)


@main.command("train")
@config_option
@click.option("--data", "data_dir", type=click.Path(exists=True), required=True)
@click.option("--out", "out_dir", type=click.Path(), required=True)
@click.option("--resolution", default=64, show_default=True)
@click.option("--base-channels", default=32, show_default=True)
@click.option("--batch-size", default=16, show_default=True)
@click.option("--epochs", default=100, show_default=True)
@click.option("--lr", default=2e-4, show_default=True)
@click.option("--lambda-shape", default=500.0, show_default=True)
@click.option("--lambda-point", default=100.0, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--max-steps", default=None, type=int)
@click.option("--split", default="train", show_default=True, type=click.Choice(["train", "test", "all"]))
@click.option("--no-normal-branch", is_flag=True, help="Ablation: drop the normal decoder.")
@click.option("--no-augment", is_flag=True)
@click.option("--toy", is_flag=True, help="Preset sized for the toy dataset overfit check.")
def train_cmd(
    data_dir, out_dir, resolution, base_channels, batch_size, epochs, lr,
    lambda_shape, lambda_point, seed, max_steps, split, no_normal_branch, no_augment, toy,
):
    """Train the two-branch generator on a generated dataset."""
    if toy:
        epochs = 300
        batch_size = 16
        resolution = 64
        no_augment = True
        split = "all"  # the overfit smoke check memorizes every toy sample
    manifest = dataset.Manifest.load(data_dir)
    gen_cfg = GeneratorConfig(
        resolution=resolution,
        base_channels=base_channels,
        use_normal_branch=not no_normal_branch,
    )
    train_cfg = TrainConfig(
        learning_rate=lr,
        batch_size=batch_size,
        lambda_shape=lambda_shape,
        lambda_point=lambda_point,
        epochs=epochs,
        seed=seed,
        resolution=resolution,
        augment=not no_augment,
        max_steps=max_steps,
        split=split,
        device=_device(),
    )
    out = Path(out_dir)
    _write_run_json(out, {"generator": asdict(gen_cfg), "train": asdict(train_cfg)})
    ckpt = run_train(manifest, gen_cfg, train_cfg, out)
    click.echo(f"checkpoint: {ckpt}")


@main.command("eval")
@config_option
@click.option("--pred", type=click.Path(exists=True), required=True)
@click.option("--gt", type=click.Path(exists=True), required=True)
@click.option("--out", "out_dir", type=click.Path(), default=None)
@click.option("--fm-threshold", default=0.1, show_default=True)
@click.option("--emd-bins", default=256, show_default=True)
@click.option("--no-fid", is_flag=True)
def eval_cmd(pred, gt, out_dir, fm_threshold, emd_bins, no_fid):
    """Compare predicted vs ground-truth stress maps matched by filename."""
    report = metrics.evaluate_dirs(
        pred, gt, fm_threshold=fm_threshold, emd_bins=emd_bins, with_fid=not no_fid
    )
    click.echo(report.to_table())
    if out_dir:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "metrics.json").write_text(report.to_json())
        _write_run_json(
            out,
            {"pred": pred, "gt": gt, "fm_threshold": fm_threshold, "emd_bins": emd_bins},
        )


@main.command("infer")
@config_option
@click.option("--checkpoint", type=click.Path(exists=True), required=True)
@click.option("--sketch", type=click.Path(exists=True), required=True)
@click.option("--force", required=True, help="Force pixel as 'x,y'.")
@click.option("--out", "out_dir", type=click.Path(), default=".", show_default=True)
def infer_cmd(checkpoint, sketch, force, out_dir):
    """Run one inference; writes normal.png, stress.png, mask.png."""
    bundle = load_checkpoint(checkpoint, device=_device())
    img = images.load_image(sketch)
    if img.ndim == 3:
        img = img.mean(axis=2)
    x, y = (int(v) for v in force.split(","))
    result = run_infer(bundle["generator"], img, (x, y))
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if result.normal is not None:
        images.save_rgb8(out / "normal.png", result.normal)
    images.save_gray16(out / "stress.png", result.stress)
    images.save_gray8(out / "mask.png", result.mask)
    images.save_rgb8(out / "stress_color.png", stress_to_color(result.stress))
    _write_run_json(out, {"checkpoint": checkpoint, "sketch": sketch, "force": [x, y]})
    click.echo(f"latency_ms: {result.latency_ms:.2f}")
    for w in result.warnings:
        click.echo(f"warning: {w}", err=True)


@main.command("serve")
@config_option
@click.option(
    "--checkpoint",
    "checkpoints",
    multiple=True,
    required=True,
    help="category=path (repeatable) or a bare path for category 'default'.",
)
@click.option("--default-category", default=None)
@click.option("--port", default=8787, show_default=True)
def serve_cmd(checkpoints, default_category, port):
    """Serve inference and aggregation over HTTP."""
    from .server import run

    mapping = {}
    for spec in checkpoints:
        if "=" in spec:
            name, path = spec.split("=", 1)
        else:
            name, path = "default", spec
        mapping[name] = path
    run(mapping, default_category, port=port)


if __name__ == "__main__":
    main()
