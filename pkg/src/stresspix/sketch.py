"""Sketch extraction from rendered normal maps: multi-channel Canny edges
unioned with the silhouette boundary."""

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

# Max Sobel response per axis on a [0, 1] image; used to normalize gradient
# magnitude so hysteresis thresholds live on a [0, 1] scale.
_SOBEL_MAX = 4.0 * np.sqrt(2.0)


@dataclass(frozen=True)
class CannyConfig:
    low: float = 0.1
    high: float = 0.2
    sigma: float = 1.0


def canny_edges(img: np.ndarray, config: CannyConfig = CannyConfig()) -> np.ndarray:
    """Canny on a (H, W) or (H, W, C) float image; returns binary (H, W).

    Gradients are taken per channel; each pixel uses the channel of maximal
    magnitude for non-maximum suppression. Hysteresis keeps weak edges only
    when 8-connected to a strong edge.
    """
    img = np.asarray(img, dtype=np.float64)
    if img.ndim == 2:
        img = img[:, :, None]
    h, w, c = img.shape

    mags = np.empty((h, w, c))
    gxs = np.empty((h, w, c))
    gys = np.empty((h, w, c))
    for ch in range(c):
        smooth = ndimage.gaussian_filter(img[:, :, ch], sigma=config.sigma)
        gx = ndimage.sobel(smooth, axis=1, mode="nearest")
        gy = ndimage.sobel(smooth, axis=0, mode="nearest")
        gxs[:, :, ch] = gx
        gys[:, :, ch] = gy
        mags[:, :, ch] = np.hypot(gx, gy)
    best = np.argmax(mags, axis=2)
    take = (np.arange(h)[:, None], np.arange(w)[None, :], best)
    mag = mags[take] / _SOBEL_MAX
    gx = gxs[take]
    gy = gys[take]

    # Non-maximum suppression over 4 quantized directions.
    angle = np.mod(np.arctan2(gy, gx), np.pi)
    sector = np.floor((angle + np.pi / 8) / (np.pi / 4)).astype(int) % 4
    padded = np.pad(mag, 1, mode="constant")
    offsets = {0: (0, 1), 1: (1, 1), 2: (1, 0), 3: (1, -1)}  # E, SE, S, SW
    nms = np.zeros_like(mag)
    for s, (dy, dx) in offsets.items():
        sel = sector == s
        n1 = padded[1 + dy : 1 + dy + h, 1 + dx : 1 + dx + w]
        n2 = padded[1 - dy : 1 - dy + h, 1 - dx : 1 - dx + w]
        keep = sel & (mag >= n1) & (mag >= n2)
        nms[keep] = mag[keep]

    strong = nms >= config.high
    weak = nms >= config.low
    if not strong.any():
        return np.zeros((h, w))
    labels, n_labels = ndimage.label(weak, structure=np.ones((3, 3)))
    keep_labels = np.unique(labels[strong])
    keep_labels = keep_labels[keep_labels > 0]
    edges = np.isin(labels, keep_labels)
    return edges.astype(np.float64)


def mask_boundary(mask: np.ndarray) -> np.ndarray:
    """One-pixel inner boundary of a binary mask."""
    m = mask > 0.5
    eroded = ndimage.binary_erosion(m, structure=np.ones((3, 3)), border_value=0)
    return (m & ~eroded).astype(np.float64)


def extract_sketch(
    normal_map: np.ndarray,
    mask: np.ndarray | None = None,
    config: CannyConfig = CannyConfig(),
) -> np.ndarray:
    """Binary sketch (strokes = 1) from a normal map.

    Canny edges of the normal map, unioned with the silhouette boundary so
    outlines are always closed, and clipped to a slightly dilated mask.
    """
    normal_map = np.asarray(normal_map, dtype=np.float64)
    if mask is None:
        decoded = normal_map * 2.0 - 1.0
        mask = (np.linalg.norm(decoded, axis=2) > 0.5).astype(np.float64)
    edges = canny_edges(normal_map, config)
    sketch = np.maximum(edges, mask_boundary(mask))
    allowed = ndimage.binary_dilation(mask > 0.5, structure=np.ones((3, 3)), iterations=2)
    return np.where(allowed, sketch, 0.0)
