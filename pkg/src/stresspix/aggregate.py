"""Region-wise multi-force analysis: pick same-normal-direction points in a
user region, infer a stress map per point, and average them."""

from dataclasses import dataclass

import numpy as np

from .model.generator import TwoBranchGenerator
from .model.infer import InferenceResult, infer
from .render import decode_normals

DEFAULT_ANGLE_TOL_DEG = 10.0
DEFAULT_MAX_POINTS = 8


@dataclass(frozen=True)
class RegionSpec:
    center: tuple[int, int]  # pixel (x, y)
    radius: float
    angle_tolerance_deg: float = DEFAULT_ANGLE_TOL_DEG
    max_points: int = DEFAULT_MAX_POINTS

    def __post_init__(self):
        if self.radius < 1:
            raise ValueError("region radius must be >= 1 pixel")
        if not 0 <= self.angle_tolerance_deg <= 90:
            raise ValueError("angle tolerance must lie in [0, 90] degrees")
        if self.max_points < 1:
            raise ValueError("max_points must be >= 1")


def select_aligned_points(
    normal_map: np.ndarray, mask: np.ndarray, region: RegionSpec
) -> list[tuple[int, int]]:
    """Mask pixels within the region whose normals align with the center's.

    Result always contains the center, is capped at `max_points`, and is
    ordered by angular deviation, then distance, then row-major pixel order.
    """
    mask = np.asarray(mask, dtype=np.float64)
    cx, cy = region.center
    h, w = mask.shape
    if not (0 <= cx < w and 0 <= cy < h):
        raise ValueError("region center outside the image")
    if mask[cy, cx] < 0.5:
        raise ValueError("region center lies outside the shape mask")

    normals = decode_normals(normal_map)
    norms = np.linalg.norm(normals, axis=2)
    center_n = normals[cy, cx] / max(norms[cy, cx], 1e-9)

    yy, xx = np.mgrid[0:h, 0:w]
    dist = np.hypot(xx - cx, yy - cy)
    candidates = (dist <= region.radius) & (mask > 0.5) & (norms > 1e-9)
    cos = np.einsum("ijk,k->ij", normals, center_n) / np.maximum(norms, 1e-9)
    deviation = np.degrees(np.arccos(np.clip(cos, -1.0, 1.0)))
    aligned = candidates & (deviation <= region.angle_tolerance_deg + 1e-12)
    aligned[cy, cx] = True  # the center always participates

    ys, xs = np.nonzero(aligned)
    keys = np.stack([deviation[ys, xs], dist[ys, xs], ys, xs], axis=1)
    order = np.lexsort((keys[:, 3], keys[:, 2], keys[:, 1], keys[:, 0]))
    chosen = [(int(xs[i]), int(ys[i])) for i in order[: region.max_points]]
    if (cx, cy) not in chosen:
        chosen = [(cx, cy)] + chosen[: region.max_points - 1]
    return chosen


def aggregate_stress(maps: list[np.ndarray], mode: str = "mean") -> np.ndarray:
    """Pixelwise mean of the per-force stress maps (`mode="sum"` for the raw
    superposed effect)."""
    if not maps:
        raise ValueError("need at least one stress map to aggregate")
    shapes = {m.shape for m in maps}
    if len(shapes) != 1:
        raise ValueError(f"stress maps must share one shape, got {shapes}")
    stack = np.stack([np.asarray(m, dtype=np.float64) for m in maps])
    if mode == "mean":
        return stack.mean(axis=0)
    if mode == "sum":
        return stack.sum(axis=0)
    raise ValueError(f"unknown aggregation mode {mode!r}")


@dataclass
class MultiForceResult:
    aggregated: np.ndarray
    selected_pixels: list[tuple[int, int]]
    per_force: list[np.ndarray]
    base: InferenceResult


def multi_force_query(
    generator: TwoBranchGenerator,
    sketch: np.ndarray,
    region: RegionSpec,
    mode: str = "mean",
) -> MultiForceResult:
    """Infer once for normals/mask, select aligned points, infer per point,
    and average the per-force stress maps."""
    base = infer(generator, sketch, region.center)
    if base.normal is None:
        raise ValueError("checkpoint has no normal branch; cannot select aligned points")
    pixels = select_aligned_points(base.normal, (base.mask > 0.5).astype(float), region)
    per_force: list[np.ndarray] = []
    for px in pixels:
        if px == tuple(region.center):
            per_force.append(base.stress)
        else:
            per_force.append(infer(generator, sketch, px).stress)
    return MultiForceResult(
        aggregated=aggregate_stress(per_force, mode=mode),
        selected_pixels=pixels,
        per_force=per_force,
        base=base,
    )
