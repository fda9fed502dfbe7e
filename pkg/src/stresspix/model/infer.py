"""Inference entry point: sketch + force pixel -> normal/stress/mask images."""

import time
from dataclasses import dataclass, field

import numpy as np
import torch

from ..render import point_map
from .generator import TwoBranchGenerator


@dataclass
class InferenceResult:
    normal: np.ndarray | None  # (H, W, 3) in [0, 1]
    stress: np.ndarray  # (H, W)
    mask: np.ndarray  # (H, W)
    latency_ms: float
    warnings: list[str] = field(default_factory=list)


def infer(
    generator: TwoBranchGenerator, sketch: np.ndarray, force_pixel: tuple[float, float]
) -> InferenceResult:
    """Run the generator on one sketch with a force at `force_pixel` (x, y).

    The point map is built from the pixel with the resolution-scaled disc
    radius. A force outside the predicted shape mask is flagged as a warning,
    not an error.
    """
    sketch = np.asarray(sketch, dtype=np.float64)
    if sketch.ndim != 2:
        raise ValueError("sketch must be a single-channel image")
    res = generator.config.resolution
    if sketch.shape != (res, res):
        raise ValueError(f"sketch must be {res}x{res} for this checkpoint")
    sketch = (sketch > 0.5).astype(np.float32)
    p = point_map(force_pixel, res).astype(np.float32)

    x_t = torch.from_numpy(sketch)[None, None]
    p_t = torch.from_numpy(p)[None, None]
    start = time.perf_counter()
    generator.eval()
    with torch.no_grad():
        out = generator(x_t, p_t)
    latency_ms = (time.perf_counter() - start) * 1000.0

    stress = out.stress[0, 0].numpy().astype(np.float64)
    mask = out.mask[0, 0].numpy().astype(np.float64)
    normal = None
    if out.normal is not None:
        normal = np.transpose(out.normal[0].numpy(), (1, 2, 0)).astype(np.float64)

    warnings = []
    px, py = int(round(force_pixel[0])), int(round(force_pixel[1]))
    if mask[py, px] < 0.5:
        warnings.append("force point lies outside the predicted shape mask")
    return InferenceResult(
        normal=normal, stress=stress, mask=mask, latency_ms=latency_ms, warnings=warnings
    )
