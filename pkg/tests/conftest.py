"""Shared fixtures. Heavy artifacts (toy dataset, trained toy checkpoint) are
session-scoped; set STRESSPIX_TEST_CACHE=<dir> to reuse them across runs."""

import os
from pathlib import Path

import numpy as np
import pytest

from stresspix import datagen, dataset, shape_prep, toyshapes
from stresspix.model import GeneratorConfig, TrainConfig, save_checkpoint, train
from stresspix.model.discriminator import DiscriminatorBank
from stresspix.model.generator import TwoBranchGenerator

TOY_SEED = 7
TOY_TRAIN_STEPS = 1200
CACHE_VERSION = "v1"


def _cache_root(tmp_path_factory) -> Path:
    env = os.environ.get("STRESSPIX_TEST_CACHE")
    if env:
        root = Path(env) / CACHE_VERSION
        root.mkdir(parents=True, exist_ok=True)
        return root
    return tmp_path_factory.mktemp("artifacts")


@pytest.fixture(scope="session")
def cache_root(tmp_path_factory):
    return _cache_root(tmp_path_factory)


@pytest.fixture(scope="session")
def unit_cube():
    return toyshapes.box((0, 0, 0), (1, 1, 1))


@pytest.fixture(scope="session")
def norm_cube16():
    """Normalized cube with a 16x16 grid per face."""
    return shape_prep.normalize_shape(toyshapes.box((0, 0, 0), (1, 1, 1), subdivide=16))


@pytest.fixture(scope="session")
def norm_sphere():
    return shape_prep.normalize_shape(toyshapes.sphere(refine=3))


@pytest.fixture(scope="session")
def toy_dataset(cache_root) -> dataset.Manifest:
    """The 2-shape, 1-view, 50-quadruple toy dataset at 64^2."""
    root = cache_root / "toyds"
    if not (root / "manifest.json").exists():
        mesh_dir = root / "meshes"
        datagen.write_toy_meshes(mesh_dir)
        config = datagen.toy_config(mesh_dir, root, seed=TOY_SEED)
        datagen.generate_dataset(config)
    return dataset.Manifest.load(root)


@pytest.fixture(scope="session")
def toy_checkpoint(cache_root, toy_dataset) -> Path:
    """Overfit toy checkpoint (the expensive fixture; ~20 min cold)."""
    out = cache_root / "toytrain"
    ckpt = out / "checkpoint.pt"
    if not ckpt.exists():
        gen_cfg = GeneratorConfig(resolution=64, base_channels=32)
        cfg = TrainConfig(
            epochs=10_000,
            seed=0,
            resolution=64,
            augment=False,
            split="all",
            max_steps=TOY_TRAIN_STEPS,
        )
        train(toy_dataset, gen_cfg, cfg, out)
    return ckpt


@pytest.fixture(scope="session")
def tiny_checkpoint(tmp_path_factory) -> Path:
    """Untrained 32^2 checkpoint for contract tests that don't need quality."""
    import torch

    torch.manual_seed(0)
    out = tmp_path_factory.mktemp("tinyckpt")
    gen_cfg = GeneratorConfig(resolution=32, base_channels=8)
    generator = TwoBranchGenerator(gen_cfg)
    bank = DiscriminatorBank(input_size=32, base_channels=8)
    path = out / "checkpoint.pt"
    save_checkpoint(
        path, generator, bank, gen_cfg, TrainConfig(resolution=32), category_stats={}, epoch=0
    )
    return path


def masked_stress_l1(stress_pred: np.ndarray, stress_true: np.ndarray, mask: np.ndarray) -> float:
    m = mask > 0.5
    return float(np.abs(stress_pred - stress_true)[m].mean())


def mask_iou(a: np.ndarray, b: np.ndarray) -> float:
    pa = a > 0.5
    pb = b > 0.5
    union = np.logical_or(pa, pb).sum()
    return float(np.logical_and(pa, pb).sum() / max(union, 1))
