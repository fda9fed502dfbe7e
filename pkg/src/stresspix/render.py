"""2D training representation: rasterized normal/stress/mask images, point
and attention maps, and the two stress normalization schemes."""

import json
from dataclasses import dataclass

import numpy as np

from .camera import Camera
from .shape_prep import ForceSample, SurfaceMesh
from .sketch import CannyConfig, extract_sketch

POINT_RADIUS_AT_256 = 3.0
BACKGROUND_NORMAL = 0.5  # encodes the zero vector


def per_corner_normals(mesh: SurfaceMesh, crease_deg: float = 30.0) -> np.ndarray:
    """Shading normals per triangle corner (M, 3, 3).

    Smooth vertex normals where the face agrees with them; the face normal at
    sharp creases, so box edges stay crisp in the normal map.
    """
    fn = mesh.face_normals  # (M, 3)
    vn = mesh.vertex_normals[mesh.triangles]  # (M, 3, 3)
    cos_crease = np.cos(np.deg2rad(crease_deg))
    agree = np.einsum("mj,mcj->mc", fn, vn) >= cos_crease
    return np.where(agree[:, :, None], vn, fn[:, None, :])


def rasterize(
    mesh: SurfaceMesh, camera: Camera, corner_attrs: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Depth-tested rasterization with barycentric attribute interpolation.

    `corner_attrs` is (M, 3, K): one attribute row per triangle corner.
    Returns (attrs (H, W, K), mask (H, W), depth buffer).
    """
    size = camera.image_size
    pix, depth = camera.project(mesh.vertices)
    attrs = np.zeros((size, size, corner_attrs.shape[2]))
    zbuf = np.full((size, size), np.inf)
    mask = np.zeros((size, size), dtype=bool)

    tri_pix = pix[mesh.triangles]  # (M, 3, 2)
    tri_depth = depth[mesh.triangles]
    tri_attr = corner_attrs  # (M, 3, K)

    for t in range(len(mesh.triangles)):
        p = tri_pix[t]
        x0 = max(int(np.ceil(p[:, 0].min())), 0)
        x1 = min(int(np.floor(p[:, 0].max())), size - 1)
        y0 = max(int(np.ceil(p[:, 1].min())), 0)
        y1 = min(int(np.floor(p[:, 1].max())), size - 1)
        if x0 > x1 or y0 > y1:
            continue
        ax, ay = p[0]
        bx, by = p[1]
        cx, cy = p[2]
        d = (by - cy) * (ax - cx) + (cx - bx) * (ay - cy)
        if abs(d) < 1e-12:
            continue
        gx, gy = np.meshgrid(np.arange(x0, x1 + 1), np.arange(y0, y1 + 1), indexing="xy")
        w0 = ((by - cy) * (gx - cx) + (cx - bx) * (gy - cy)) / d
        w1 = ((cy - ay) * (gx - cx) + (ax - cx) * (gy - cy)) / d
        w2 = 1.0 - w0 - w1
        inside = (w0 >= 0) & (w1 >= 0) & (w2 >= 0)
        if not inside.any():
            continue
        z = w0 * tri_depth[t, 0] + w1 * tri_depth[t, 1] + w2 * tri_depth[t, 2]
        rows = gy[inside]
        cols = gx[inside]
        zi = z[inside]
        closer = zi < zbuf[rows, cols]
        if not closer.any():
            continue
        rows, cols, zi = rows[closer], cols[closer], zi[closer]
        zbuf[rows, cols] = zi
        mask[rows, cols] = True
        wsel = np.stack([w0[inside][closer], w1[inside][closer], w2[inside][closer]], axis=1)
        attrs[rows, cols] = wsel @ tri_attr[t]
    return attrs, mask.astype(np.float64), zbuf


def render_view(
    mesh: SurfaceMesh, stress: np.ndarray, camera: Camera
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Render one view: (normal map [0,1]^3, shape mask, raw stress image).

    The stress image linearly interpolates the per-vertex values (any units);
    pixels outside the mask are zero. Normal map background is 0.5-gray.
    """
    stress = np.asarray(stress, dtype=np.float64)
    if stress.shape != (len(mesh.vertices),):
        raise ValueError("stress field length must match surface vertex count")
    corner_n = per_corner_normals(mesh)
    cam_normals = camera.camera_space_normals(corner_n.reshape(-1, 3)).reshape(-1, 3, 3)
    corner_stress = stress[mesh.triangles][:, :, None]  # stress stays smooth
    attrs = np.concatenate([cam_normals, corner_stress], axis=2)
    out, mask, _ = rasterize(mesh, camera, attrs)
    if not mask.any():
        raise ValueError("camera misses the shape (empty silhouette)")
    n = out[:, :, :3]
    norms = np.linalg.norm(n, axis=2, keepdims=True)
    n = np.divide(n, norms, out=np.zeros_like(n), where=norms > 1e-12)
    normal_map = np.where(mask[:, :, None] > 0, (n + 1.0) / 2.0, BACKGROUND_NORMAL)
    stress_map = np.where(mask > 0, out[:, :, 3], 0.0)
    return normal_map, mask, stress_map


def decode_normals(normal_map: np.ndarray) -> np.ndarray:
    """Map [0,1]^3 back to unit-ish vectors in [-1,1]^3."""
    return np.asarray(normal_map, dtype=np.float64) * 2.0 - 1.0


def point_radius(image_size: int) -> int:
    """Disc radius scaled proportionally from 3 px at 256^2."""
    return max(1, round(POINT_RADIUS_AT_256 * image_size / 256.0))


def point_map(pixel: tuple[float, float], image_size: int, radius: int | None = None) -> np.ndarray:
    """Binary point map: a filled disc centered at the rounded force pixel."""
    if radius is None:
        radius = point_radius(image_size)
    cx = int(round(pixel[0]))
    cy = int(round(pixel[1]))
    if not (0 <= cx < image_size and 0 <= cy < image_size):
        raise ValueError(f"force pixel {pixel} outside image bounds")
    yy, xx = np.mgrid[0:image_size, 0:image_size]
    disc = (xx - cx) ** 2 + (yy - cy) ** 2 <= radius**2
    return disc.astype(np.float64)


def attention_map(point: np.ndarray, mask: np.ndarray) -> np.ndarray:
    """Force-centered attention: 1 at the force pixel, decaying to 0 at the
    mean in-mask distance, zero outside the mask."""
    point = np.asarray(point, dtype=np.float64)
    mask = np.asarray(mask, dtype=np.float64)
    fg = np.argwhere(point > 0.5)
    if len(fg) == 0:
        raise ValueError("point map has no foreground pixel")
    cy, cx = fg.mean(axis=0)
    if mask[int(round(cy)), int(round(cx))] <= 0.5:
        raise ValueError("force point lies outside the shape mask")
    h, w = mask.shape
    yy, xx = np.mgrid[0:h, 0:w]
    dist = np.hypot(xx - cx, yy - cy)
    inside = mask > 0.5
    mean_dist = dist[inside].mean()
    if mean_dist <= 0:
        return inside.astype(np.float64)
    att = np.maximum(0.0, 1.0 - dist / mean_dist)
    return np.where(inside, att, 0.0)


def normalize_shape_grained(values: np.ndarray) -> np.ndarray:
    """Per-shape normalization: divide by the field maximum."""
    values = np.asarray(values, dtype=np.float64)
    peak = values.max() if values.size else 0.0
    if peak <= 0:
        raise ValueError("cannot normalize an all-zero stress field")
    return values / peak


@dataclass(frozen=True)
class CategoryStats:
    """Persisted category-grained normalization statistics."""

    mean: float
    std: float
    tau: float = 100.0

    @classmethod
    def fit(cls, all_values: np.ndarray, tau: float = 100.0) -> "CategoryStats":
        all_values = np.asarray(all_values, dtype=np.float64).ravel()
        if all_values.size < 2:
            raise ValueError("need at least 2 stress values to fit category statistics")
        std = float(all_values.std())
        if std <= 0:
            raise ValueError("zero standard deviation: category statistics undefined")
        return cls(mean=float(all_values.mean()), std=std, tau=tau)

    def apply(self, values: np.ndarray) -> np.ndarray:
        return (np.asarray(values, dtype=np.float64) - self.mean) / self.std / self.tau

    def to_json(self) -> str:
        return json.dumps({"mean": self.mean, "std": self.std, "tau": self.tau}, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "CategoryStats":
        d = json.loads(text)
        return cls(mean=d["mean"], std=d["std"], tau=d["tau"])


def normalize_category_grained(all_values: np.ndarray, tau: float = 100.0) -> np.ndarray:
    """Category z-score divided by tau; statistics from the given pool."""
    stats = CategoryStats.fit(all_values, tau=tau)
    return stats.apply(all_values)


@dataclass(frozen=True)
class Quadruple:
    """One training record: all images float [0,1], aligned, row 0 at top."""

    sketch: np.ndarray  # x, binary
    point: np.ndarray  # p, binary
    normal: np.ndarray  # n, (H, W, 3)
    stress: np.ndarray  # y, normalized to [0,1]
    mask: np.ndarray  # M_s, binary
    attention: np.ndarray  # M_p
    force_pixel: tuple[float, float]
    view_id: int
    norm_mode: str  # "shape" | "category"


def build_quadruple(
    mesh: SurfaceMesh,
    force: ForceSample,
    stress: np.ndarray,
    camera: Camera,
    norm_mode: str = "shape",
    category_stats: CategoryStats | None = None,
    canny: CannyConfig = CannyConfig(),
) -> Quadruple:
    """Assemble (x, p, n, y) + M_s + M_p for one (shape, view, force) record."""
    if norm_mode == "shape":
        field = normalize_shape_grained(stress)
    elif norm_mode == "category":
        if category_stats is None:
            raise ValueError("category-grained normalization requires fitted statistics")
        field = category_stats.apply(stress)
    else:
        raise ValueError(f"unknown norm_mode {norm_mode!r}")
    normal_map, mask, y = render_view(mesh, field, camera)
    y = np.clip(y, 0.0, 1.0) * (mask > 0.5)
    p = point_map(force.pixel, camera.image_size)
    mp = attention_map(p, mask)
    x = extract_sketch(normal_map, mask=mask, config=canny)
    return Quadruple(
        sketch=x,
        point=p,
        normal=normal_map,
        stress=y,
        mask=mask,
        attention=mp,
        force_pixel=(float(force.pixel[0]), float(force.pixel[1])),
        view_id=camera.view_id,
        norm_mode=norm_mode,
    )


def stress_to_color(y: np.ndarray) -> np.ndarray:
    """Display-only jet-style colormap: blue (low) through green to red (high)."""
    y = np.clip(np.asarray(y, dtype=np.float64), 0.0, 1.0)
    r = np.clip(1.5 - np.abs(4.0 * y - 3.0), 0.0, 1.0)
    g = np.clip(1.5 - np.abs(4.0 * y - 2.0), 0.0, 1.0)
    b = np.clip(1.5 - np.abs(4.0 * y - 1.0), 0.0, 1.0)
    return np.stack([r, g, b], axis=-1)
