"""Evaluation metrics over stress-map images: MAE, F-Measure, EMD, and a
pluggable FID with an offline fallback embedder.

MAE and EMD are reported on the 8-bit intensity scale; images are float [0,1]
in memory and scaled by 255 internally.
"""

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.linalg

from . import images

FULL_SCALE = 255.0
DEFAULT_FM_THRESHOLD = 0.1  # fraction of full scale
DEFAULT_EMD_BINS = 256


def mae(a: np.ndarray, b: np.ndarray) -> float:
    """Mean absolute pixel difference on the 8-bit scale."""
    a, b = _check_pair(a, b)
    return float(np.abs(a - b).mean() * FULL_SCALE)


def f_measure(a: np.ndarray, b: np.ndarray, threshold: float = DEFAULT_FM_THRESHOLD) -> float:
    """F-measure of the foregrounds after binarizing both at `threshold`.

    Defined as 1.0 when both binarizations are empty.
    """
    a, b = _check_pair(a, b)
    fa = a > threshold
    fb = b > threshold
    tp = float(np.logical_and(fa, fb).sum())
    pa = float(fa.sum())
    pb = float(fb.sum())
    if pa == 0 and pb == 0:
        return 1.0
    if tp == 0:
        return 0.0
    precision = tp / pa
    recall = tp / pb
    return 2.0 * precision * recall / (precision + recall)


def emd_histograms(ha: np.ndarray, hb: np.ndarray, bin_width: float = 1.0) -> float:
    """1D earth mover's distance between histograms (closed form).

    Histograms are normalized to unit mass; the distance is the L1 difference
    of the cumulative distributions times `bin_width`.
    """
    ha = np.asarray(ha, dtype=np.float64)
    hb = np.asarray(hb, dtype=np.float64)
    if ha.shape != hb.shape:
        raise ValueError("histograms must have equal length")
    if ha.sum() <= 0 or hb.sum() <= 0:
        raise ValueError("histograms must carry positive mass")
    ca = np.cumsum(ha / ha.sum())
    cb = np.cumsum(hb / hb.sum())
    return float(np.abs(ca - cb).sum() * bin_width)


def emd(a: np.ndarray, b: np.ndarray, bins: int = DEFAULT_EMD_BINS) -> float:
    """EMD between the intensity histograms of two images, 8-bit scale.

    One full-range bin step costs 256/bins intensity units, so with the
    default 256 bins adjacent-bin transport costs exactly 1.
    """
    a, b = _check_pair(a, b)
    edges = np.linspace(0.0, 1.0, bins + 1)
    edges[-1] = np.nextafter(1.0, 2.0)  # include the top value
    ha, _ = np.histogram(a.ravel(), bins=edges)
    hb, _ = np.histogram(b.ravel(), bins=edges)
    return emd_histograms(ha, hb, bin_width=256.0 / bins)


def fid(set_a: np.ndarray, set_b: np.ndarray, embedder=None) -> float:
    """Frechet distance between Gaussian fits of image-set embeddings.

    `embedder` maps (N, H, W) -> (N, D); the default is the deterministic
    16x16 area-downsample fallback so evaluation runs offline.
    """
    if embedder is None:
        embedder = downsample_embedder
    ea = np.asarray(embedder(np.asarray(set_a, dtype=np.float64)))
    eb = np.asarray(embedder(np.asarray(set_b, dtype=np.float64)))
    if len(ea) < 2 or len(eb) < 2:
        raise ValueError("need at least 2 images per set for FID")
    mu_a, mu_b = ea.mean(axis=0), eb.mean(axis=0)
    cov_a = np.cov(ea, rowvar=False)
    cov_b = np.cov(eb, rowvar=False)
    return frechet_gaussian(mu_a, cov_a, mu_b, cov_b)


def frechet_gaussian(mu_a, cov_a, mu_b, cov_b) -> float:
    """||mu_a-mu_b||^2 + Tr(cov_a + cov_b - 2 (cov_a cov_b)^(1/2))."""
    mu_a = np.atleast_1d(mu_a)
    mu_b = np.atleast_1d(mu_b)
    cov_a = np.atleast_2d(cov_a)
    cov_b = np.atleast_2d(cov_b)
    diff = mu_a - mu_b
    sqrt_prod, _ = scipy.linalg.sqrtm(cov_a @ cov_b, disp=False)
    if np.iscomplexobj(sqrt_prod):
        sqrt_prod = sqrt_prod.real
    value = diff @ diff + np.trace(cov_a) + np.trace(cov_b) - 2.0 * np.trace(sqrt_prod)
    return float(max(value, 0.0))


def downsample_embedder(batch: np.ndarray, size: int = 16) -> np.ndarray:
    """Deterministic fallback embedding: area-downsample to size^2, flatten."""
    batch = np.asarray(batch, dtype=np.float64)
    n, h, w = batch.shape
    if h % size == 0 and w % size == 0:
        fy, fx = h // size, w // size
        pooled = batch.reshape(n, size, fy, size, fx).mean(axis=(2, 4))
    else:
        ys = (np.arange(size) * h // size).clip(0, h - 1)
        xs = (np.arange(size) * w // size).clip(0, w - 1)
        pooled = batch[:, ys][:, :, xs]
    return pooled.reshape(n, -1)


def _check_pair(a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"image shapes differ: {a.shape} vs {b.shape}")
    return a, b


@dataclass
class MetricReport:
    """Per-category and overall metric values plus the config that made them."""

    overall: dict[str, float]
    per_category: dict[str, dict[str, float]]
    sample_count: int
    config: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(
            {
                "overall": self.overall,
                "per_category": self.per_category,
                "sample_count": self.sample_count,
                "config": self.config,
            },
            indent=2,
            sort_keys=True,
        )

    def to_table(self) -> str:
        headers = ["Category", "MAE", "EMD", "FID", "FM", "N"]
        rows = []
        for cat in sorted(self.per_category):
            m = self.per_category[cat]
            rows.append(
                [
                    cat,
                    f"{m['mae']:.3f}",
                    f"{m['emd']:.3f}",
                    f"{m['fid']:.3f}" if "fid" in m else "-",
                    f"{m['fm']:.3f}",
                    str(int(m["count"])),
                ]
            )
        o = self.overall
        rows.append(
            [
                "overall",
                f"{o['mae']:.3f}",
                f"{o['emd']:.3f}",
                f"{o['fid']:.3f}" if "fid" in o else "-",
                f"{o['fm']:.3f}",
                str(self.sample_count),
            ]
        )
        widths = [max(len(r[i]) for r in rows + [headers]) for i in range(len(headers))]
        lines = ["  ".join(h.ljust(w) for h, w in zip(headers, widths))]
        lines += ["  ".join(c.ljust(w) for c, w in zip(r, widths)) for r in rows]
        return "\n".join(lines)


def evaluate_dirs(
    pred_dir,
    gt_dir,
    fm_threshold: float = DEFAULT_FM_THRESHOLD,
    emd_bins: int = DEFAULT_EMD_BINS,
    with_fid: bool = True,
    embedder=None,
) -> MetricReport:
    """Compare two directories of PNGs matched by filename.

    Files directly inside the directories form one unnamed category; first
    level subdirectories are treated as categories.
    """
    pred_dir = Path(pred_dir)
    gt_dir = Path(gt_dir)
    pairs: dict[str, list[tuple[Path, Path]]] = {}
    for pred in sorted(pred_dir.rglob("*.png")):
        rel = pred.relative_to(pred_dir)
        gt = gt_dir / rel
        if not gt.exists():
            continue
        category = rel.parts[0] if len(rel.parts) > 1 else "default"
        pairs.setdefault(category, []).append((pred, gt))
    if not pairs:
        raise ValueError("no matching PNG filenames between the two directories")

    per_category = {}
    all_maes, all_emds, all_fms = [], [], []
    all_pred, all_gt = [], []
    for category, file_pairs in sorted(pairs.items()):
        maes, emds, fms = [], [], []
        preds, gts = [], []
        for pred_path, gt_path in file_pairs:
            a = _to_gray(images.load_image(pred_path))
            b = _to_gray(images.load_image(gt_path))
            maes.append(mae(a, b))
            emds.append(emd(a, b, bins=emd_bins))
            fms.append(f_measure(a, b, threshold=fm_threshold))
            preds.append(a)
            gts.append(b)
        entry = {
            "mae": float(np.mean(maes)),
            "emd": float(np.mean(emds)),
            "fm": float(np.mean(fms)),
            "count": len(file_pairs),
        }
        if with_fid and len(preds) >= 2:
            entry["fid"] = fid(np.stack(preds), np.stack(gts), embedder=embedder)
        per_category[category] = entry
        all_maes += maes
        all_emds += emds
        all_fms += fms
        all_pred += preds
        all_gt += gts

    overall = {
        "mae": float(np.mean(all_maes)),
        "emd": float(np.mean(all_emds)),
        "fm": float(np.mean(all_fms)),
    }
    if with_fid and len(all_pred) >= 2:
        shapes = {p.shape for p in all_pred}
        if len(shapes) == 1:
            overall["fid"] = fid(np.stack(all_pred), np.stack(all_gt), embedder=embedder)
    return MetricReport(
        overall=overall,
        per_category=per_category,
        sample_count=len(all_maes),
        config={"fm_threshold": fm_threshold, "emd_bins": emd_bins},
    )


def _to_gray(img: np.ndarray) -> np.ndarray:
    if img.ndim == 3:
        return img.mean(axis=2)
    return img
