"""Quadruple persistence: directory layout, manifest, splits, batch loading.

Layout: `<root>/<category>/<shape_id>/<view>/<sample_id>_{x|p|n|y|ms|mp}.png`
with `manifest.json` at the root as the single source of truth. Writers append
under a file lock; finalized manifests are read lock-free.
"""

import json
import logging
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from filelock import FileLock
from PIL import Image

from . import images
from .render import CategoryStats, Quadruple

log = logging.getLogger(__name__)

MANIFEST_VERSION = 1
IMAGE_KEYS = ("x", "p", "n", "y", "ms", "mp")


@dataclass
class SampleRecord:
    sample_id: str
    shape_id: str
    category: str
    azimuth_deg: float
    elevation_deg: float
    force_pixel: tuple[float, float]
    force_location: tuple[float, float, float]
    force_normal: tuple[float, float, float]
    norm_mode: str
    resolution: int
    files: dict[str, str]  # image key -> path relative to the dataset root

    def to_dict(self) -> dict:
        return {
            "sample_id": self.sample_id,
            "shape_id": self.shape_id,
            "category": self.category,
            "azimuth_deg": self.azimuth_deg,
            "elevation_deg": self.elevation_deg,
            "force_pixel": list(self.force_pixel),
            "force_location": list(self.force_location),
            "force_normal": list(self.force_normal),
            "norm_mode": self.norm_mode,
            "resolution": self.resolution,
            "files": dict(sorted(self.files.items())),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SampleRecord":
        return cls(
            sample_id=d["sample_id"],
            shape_id=d["shape_id"],
            category=d["category"],
            azimuth_deg=d["azimuth_deg"],
            elevation_deg=d["elevation_deg"],
            force_pixel=tuple(d["force_pixel"]),
            force_location=tuple(d["force_location"]),
            force_normal=tuple(d["force_normal"]),
            norm_mode=d["norm_mode"],
            resolution=d["resolution"],
            files=dict(d["files"]),
        )


@dataclass
class Manifest:
    root: Path
    version: int = MANIFEST_VERSION
    category_stats: dict[str, dict] = field(default_factory=dict)
    records: list[SampleRecord] = field(default_factory=list)
    train_shapes: list[str] = field(default_factory=list)
    test_shapes: list[str] = field(default_factory=list)

    @property
    def path(self) -> Path:
        return Path(self.root) / "manifest.json"

    @property
    def lock_path(self) -> Path:
        return Path(self.root) / "manifest.lock"

    def to_dict(self) -> dict:
        return {
            "version": self.version,
            "category_stats": self.category_stats,
            "split": {"train": sorted(self.train_shapes), "test": sorted(self.test_shapes)},
            "records": [r.to_dict() for r in self.records],
        }

    def save(self) -> None:
        payload = json.dumps(self.to_dict(), indent=2, sort_keys=True)
        tmp = self.path.with_suffix(".json.tmp")
        tmp.write_text(payload)
        os.replace(tmp, self.path)

    @classmethod
    def load(cls, root) -> "Manifest":
        root = Path(root)
        d = json.loads((root / "manifest.json").read_text())
        m = cls(
            root=root,
            version=d["version"],
            category_stats=d.get("category_stats", {}),
            records=[SampleRecord.from_dict(r) for r in d.get("records", [])],
            train_shapes=list(d.get("split", {}).get("train", [])),
            test_shapes=list(d.get("split", {}).get("test", [])),
        )
        return m

    @classmethod
    def create(cls, root) -> "Manifest":
        root = Path(root)
        root.mkdir(parents=True, exist_ok=True)
        m = cls(root=root)
        m.save()
        return m

    def shape_ids(self) -> list[str]:
        return sorted({r.shape_id for r in self.records})

    def records_for_split(self, split: str) -> list[SampleRecord]:
        if split == "all":
            return list(self.records)
        chosen = set(self.train_shapes if split == "train" else self.test_shapes)
        return [r for r in self.records if r.shape_id in chosen]


def quadruple_images(quad: Quadruple) -> dict[str, np.ndarray]:
    return {
        "x": quad.sketch,
        "p": quad.point,
        "n": quad.normal,
        "y": quad.stress,
        "ms": quad.mask,
        "mp": quad.attention,
    }


def _encode(key: str, img: np.ndarray) -> bytes:
    if key == "n":
        return images.encode_rgb8(img)
    if key in ("y", "mp"):
        return images.encode_gray16(img)
    return images.encode_gray8(img)


def write_sample(root, record: SampleRecord, imgs: dict[str, np.ndarray]) -> str:
    """Atomically write one sample's images and append it to the manifest.

    Image files land via temp-file + rename; the manifest append runs under
    the per-manifest lock so concurrent writers never lose records.
    """
    root = Path(root)
    expected = {k for k in IMAGE_KEYS}
    if set(imgs) != expected:
        raise ValueError(f"expected images {sorted(expected)}, got {sorted(imgs)}")
    res = record.resolution
    for key, img in imgs.items():
        if img.shape[:2] != (res, res):
            raise ValueError(
                f"image '{key}' has resolution {img.shape[:2]}, record declares {res}"
            )

    rel_dir = Path(record.category) / record.shape_id / f"view{int(record.azimuth_deg):03d}"
    (root / rel_dir).mkdir(parents=True, exist_ok=True)
    files = {}
    for key, img in imgs.items():
        rel = rel_dir / f"{record.sample_id}_{key}.png"
        payload = _encode(key, img)
        tmp = root / rel.with_suffix(".png.tmp")
        tmp.write_bytes(payload)
        os.replace(tmp, root / rel)
        files[key] = str(rel)
    record.files = files

    with FileLock(str(Path(root) / "manifest.lock")):
        manifest = Manifest.load(root)
        if any(r.sample_id == record.sample_id for r in manifest.records):
            raise ValueError(f"duplicate sample_id {record.sample_id!r}")
        manifest.records.append(record)
        manifest.save()
    return record.sample_id


def split_by_shape(manifest: Manifest, test_fraction: float, seed: int) -> Manifest:
    """Assign whole shapes to train/test; samples never straddle the split."""
    if not 0 < test_fraction < 1:
        raise ValueError("test_fraction must lie in (0, 1)")
    shapes = manifest.shape_ids()
    if len(shapes) < 2:
        raise ValueError("need at least 2 shapes to split")
    rng = np.random.default_rng(seed)
    order = list(shapes)
    rng.shuffle(order)
    n_test = max(1, round(test_fraction * len(order)))
    n_test = min(n_test, len(order) - 1)
    manifest.test_shapes = sorted(order[:n_test])
    manifest.train_shapes = sorted(order[n_test:])
    return manifest


def _area_resize(img: np.ndarray, size: int) -> np.ndarray:
    if img.shape[0] == size and img.shape[1] == size:
        return img.astype(np.float64)
    if img.ndim == 2:
        pil = Image.fromarray(img.astype(np.float32), mode="F")
        return np.asarray(pil.resize((size, size), Image.BOX), dtype=np.float64)
    chans = [_area_resize(img[:, :, c], size) for c in range(img.shape[2])]
    return np.stack(chans, axis=2)


def flip_horizontal(sample: dict[str, np.ndarray]) -> dict[str, np.ndarray]:
    """Mirror all six images; the normal map's X channel is negated."""
    out = {}
    for key, img in sample.items():
        flipped = img[:, ::-1].copy()
        if key == "n":
            flipped[:, :, 0] = 1.0 - flipped[:, :, 0]
        out[key] = flipped
    return out


def load_sample(root, record: SampleRecord, resolution: int) -> dict[str, np.ndarray]:
    """Load one record's six images at the requested resolution.

    Area-downsampling; masks re-binarized at 0.5, thin binary layers (sketch,
    point map) at coverage > 0 so strokes survive; normals renormalized.
    """
    root = Path(root)
    out = {}
    for key in IMAGE_KEYS:
        img = images.load_image(root / record.files[key])
        img = _area_resize(img, resolution)
        if key == "ms":
            img = (img > 0.5).astype(np.float64)
        elif key in ("x", "p"):
            img = (img > 1e-9).astype(np.float64)
        elif key == "n":
            vec = img * 2.0 - 1.0
            norms = np.linalg.norm(vec, axis=2, keepdims=True)
            vec = np.divide(vec, norms, out=np.zeros_like(vec), where=norms > 1e-9)
            img = (vec + 1.0) / 2.0
        out[key] = img
    return out


def batch_iter(
    manifest: Manifest,
    split: str,
    batch_size: int,
    resolution: int,
    augment: bool = False,
    seed: int = 0,
):
    """One shuffled pass over a split, yielding dicts of float32 (B, C, H, W).

    Corrupt files are skipped with a logged warning; the epoch still covers
    every remaining record.
    """
    records = manifest.records_for_split(split)
    if not records:
        raise ValueError(f"split {split!r} is empty")
    rng = np.random.default_rng(seed)
    order = rng.permutation(len(records))
    batch: list[dict] = []
    for idx in order:
        record = records[idx]
        try:
            sample = load_sample(manifest.root, record, resolution)
        except Exception as exc:  # noqa: BLE001 - any decode failure skips the record
            log.warning("skipping corrupt sample %s: %s", record.sample_id, exc)
            continue
        if augment and rng.random() < 0.5:
            sample = flip_horizontal(sample)
        batch.append(sample)
        if len(batch) == batch_size:
            yield _collate(batch)
            batch = []
    if batch:
        yield _collate(batch)


def _collate(batch: list[dict]) -> dict[str, np.ndarray]:
    out = {}
    for key in IMAGE_KEYS:
        arrs = []
        for sample in batch:
            img = sample[key]
            if img.ndim == 2:
                img = img[None, :, :]
            else:
                img = np.transpose(img, (2, 0, 1))
            arrs.append(img.astype(np.float32))
        out[key] = np.stack(arrs)
    return out
