"""End-to-end dataset synthesis: meshes -> FEM stress -> rendered quadruples."""

import json
import logging
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import dataset, fem, meshio, render, shape_prep, toyshapes
from .camera import Camera

log = logging.getLogger(__name__)


@dataclass
class PipelineConfig:
    mesh_dir: str
    out_dir: str
    azimuths: tuple[float, ...] = (0.0, 45.0, 90.0)
    elevation_deg: float = 10.0
    forces_per_view: int = 250
    fem_resolution: int = fem.DEFAULT_RESOLUTION
    image_size: int = 256
    young_modulus: float = 1e9
    poisson_ratio: float = 0.3
    fixed_ratio: float = shape_prep.DEFAULT_FIXED_RATIO
    norm_mode: str = "shape"
    tau: float = 100.0
    test_fraction: float = 0.2
    seed: int = 0

    def material(self) -> fem.Material:
        return fem.Material(self.young_modulus, self.poisson_ratio)


@dataclass
class RunReport:
    shapes_ok: list[str] = field(default_factory=list)
    shapes_failed: dict[str, str] = field(default_factory=dict)
    samples_written: int = 0
    seconds: float = 0.0

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True)


def discover_meshes(mesh_dir) -> list[tuple[str, str, Path]]:
    """(category, shape_id, path) for every OBJ/STL under mesh_dir.

    A first-level subdirectory names the category; flat files fall into
    "default". Sorted for deterministic processing order.
    """
    mesh_dir = Path(mesh_dir)
    found = []
    for path in sorted(mesh_dir.rglob("*")):
        if path.suffix.lower() not in (".obj", ".stl") or not path.is_file():
            continue
        rel = path.relative_to(mesh_dir)
        category = rel.parts[0] if len(rel.parts) > 1 else "default"
        found.append((category, path.stem, path))
    return found


def write_toy_meshes(mesh_dir) -> None:
    """Two procedural shapes (a table and a chair built from boxes)."""
    mesh_dir = Path(mesh_dir)
    mesh_dir.mkdir(parents=True, exist_ok=True)
    for name, mesh in (("table", toyshapes.table()), ("chair", toyshapes.chair())):
        meshio.save_obj(mesh_dir / f"{name}.obj", mesh.vertices, mesh.triangles)


def toy_config(mesh_dir, out_dir, seed: int = 0) -> PipelineConfig:
    """Small preset: 2 shapes, 1 view, 25 forces each, 64^2 images."""
    return PipelineConfig(
        mesh_dir=str(mesh_dir),
        out_dir=str(out_dir),
        azimuths=(0.0,),
        forces_per_view=25,
        fem_resolution=16,
        image_size=64,
        test_fraction=0.5,
        seed=seed,
    )


def generate_dataset(config: PipelineConfig) -> tuple[dataset.Manifest, RunReport]:
    """Run the synthesis pipeline; per-shape failures are logged and skipped.

    Raises only if every shape fails. Deterministic for a fixed config: the
    manifest and all PNG payloads are byte-identical across reruns.
    """
    t_start = time.time()
    report = RunReport()
    out_root = Path(config.out_dir)
    manifest = dataset.Manifest.create(out_root)

    entries = discover_meshes(config.mesh_dir)
    if not entries:
        raise ValueError(f"no OBJ/STL meshes found under {config.mesh_dir}")

    material = config.material()
    # (category, shape_id, mesh, labels, per-view forces, per-view stress fields)
    prepared = []
    category_pool: dict[str, list[np.ndarray]] = {}
    for shape_index, (category, shape_id, path) in enumerate(entries):
        try:
            mesh = shape_prep.SurfaceMesh.load(path)
            mesh = shape_prep.normalize_shape(mesh)
            labels = shape_prep.assign_regions(mesh, config.fixed_ratio)
            volume = fem.discretize(mesh, config.fem_resolution)
            solver = fem.StressSolver(volume, material, labels)
            views = []
            for view_index, azimuth in enumerate(config.azimuths):
                camera = Camera.for_mesh(
                    mesh,
                    azimuth_deg=azimuth,
                    elevation_deg=config.elevation_deg,
                    image_size=config.image_size,
                    view_id=view_index,
                )
                seed = config.seed + 1000 * shape_index + view_index
                forces = shape_prep.sample_forces(
                    mesh, labels, camera, config.forces_per_view, seed=seed
                )
                fields = solver.solve_many(forces)
                views.append((camera, forces, fields, seed))
                category_pool.setdefault(category, []).extend(fields)
            prepared.append((category, shape_id, mesh, views))
            report.shapes_ok.append(shape_id)
        except Exception as exc:  # noqa: BLE001 - per-shape failure policy
            log.warning("shape %s failed: %s", shape_id, exc)
            report.shapes_failed[shape_id] = str(exc)
    if not prepared:
        raise ValueError("all shapes failed; nothing to write")

    stats_by_category: dict[str, render.CategoryStats] = {}
    if config.norm_mode == "category":
        for category, fields in category_pool.items():
            stats_by_category[category] = render.CategoryStats.fit(
                np.concatenate(fields), tau=config.tau
            )
        manifest.category_stats = {
            cat: json.loads(stats.to_json()) for cat, stats in stats_by_category.items()
        }
        manifest.save()

    for category, shape_id, mesh, views in prepared:
        for camera, forces, fields, seed in views:
            sidecar = shape_prep.regions_to_json(
                shape_prep.assign_regions(mesh, config.fixed_ratio), forces, seed
            )
            sidecar_dir = out_root / category / shape_id
            sidecar_dir.mkdir(parents=True, exist_ok=True)
            (sidecar_dir / f"view{int(camera.azimuth_deg):03d}_forces.json").write_text(sidecar)
            for k, (force, stress) in enumerate(zip(forces, fields)):
                quad = render.build_quadruple(
                    mesh,
                    force,
                    stress,
                    camera,
                    norm_mode=config.norm_mode,
                    category_stats=stats_by_category.get(category),
                )
                record = dataset.SampleRecord(
                    sample_id=f"{shape_id}_v{int(camera.azimuth_deg):03d}_f{k:03d}",
                    shape_id=shape_id,
                    category=category,
                    azimuth_deg=camera.azimuth_deg,
                    elevation_deg=camera.elevation_deg,
                    force_pixel=quad.force_pixel,
                    force_location=tuple(force.location.tolist()),
                    force_normal=tuple(force.normal.tolist()),
                    norm_mode=config.norm_mode,
                    resolution=config.image_size,
                    files={},
                )
                dataset.write_sample(out_root, record, dataset.quadruple_images(quad))
                report.samples_written += 1

    manifest = dataset.Manifest.load(out_root)
    if len(manifest.shape_ids()) >= 2:
        manifest = dataset.split_by_shape(manifest, config.test_fraction, config.seed)
    else:
        manifest.train_shapes = manifest.shape_ids()
        manifest.test_shapes = []
    if config.norm_mode == "category":
        manifest.category_stats = {
            cat: json.loads(stats.to_json()) for cat, stats in stats_by_category.items()
        }
    manifest.save()

    report.seconds = time.time() - t_start
    (out_root / "run_report.json").write_text(report.to_json())
    (out_root / "run.json").write_text(json.dumps(asdict(config), indent=2, sort_keys=True))
    return manifest, report
