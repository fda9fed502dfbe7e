"""Low-level triangle mesh geometry: areas, normals, barycentrics, ray casting."""

import numpy as np


def triangle_areas(vertices: np.ndarray, triangles: np.ndarray) -> np.ndarray:
    """Per-triangle areas, shape (M,)."""
    a = vertices[triangles[:, 0]]
    b = vertices[triangles[:, 1]]
    c = vertices[triangles[:, 2]]
    return 0.5 * np.linalg.norm(np.cross(b - a, c - a), axis=1)


def face_normals(vertices: np.ndarray, triangles: np.ndarray) -> np.ndarray:
    """Unit face normals (M, 3); zero-area faces get a zero normal."""
    a = vertices[triangles[:, 0]]
    b = vertices[triangles[:, 1]]
    c = vertices[triangles[:, 2]]
    n = np.cross(b - a, c - a)
    norm = np.linalg.norm(n, axis=1, keepdims=True)
    return np.divide(n, norm, out=np.zeros_like(n), where=norm > 0)


def vertex_normals(vertices: np.ndarray, triangles: np.ndarray) -> np.ndarray:
    """Area-weighted per-vertex unit normals (N, 3)."""
    a = vertices[triangles[:, 0]]
    b = vertices[triangles[:, 1]]
    c = vertices[triangles[:, 2]]
    weighted = np.cross(b - a, c - a)  # 2 * area * unit normal
    out = np.zeros_like(vertices)
    for k in range(3):
        np.add.at(out, triangles[:, k], weighted)
    norm = np.linalg.norm(out, axis=1, keepdims=True)
    return np.divide(out, norm, out=np.zeros_like(out), where=norm > 0)


def signed_volume(vertices: np.ndarray, triangles: np.ndarray) -> float:
    """Signed enclosed volume; positive for outward-oriented closed surfaces."""
    a = vertices[triangles[:, 0]]
    b = vertices[triangles[:, 1]]
    c = vertices[triangles[:, 2]]
    return float(np.einsum("ij,ij->i", a, np.cross(b, c)).sum() / 6.0)


def barycentric_coords(points: np.ndarray, tri_vertices: np.ndarray) -> np.ndarray:
    """Barycentric coordinates of `points` (K, 3) wrt triangles (K, 3, 3).

    Points are assumed to lie on (or near) the triangle planes; coordinates
    are computed by least squares on the two edge vectors.
    """
    v0 = tri_vertices[:, 1] - tri_vertices[:, 0]
    v1 = tri_vertices[:, 2] - tri_vertices[:, 0]
    v2 = points - tri_vertices[:, 0]
    d00 = np.einsum("ij,ij->i", v0, v0)
    d01 = np.einsum("ij,ij->i", v0, v1)
    d11 = np.einsum("ij,ij->i", v1, v1)
    d20 = np.einsum("ij,ij->i", v2, v0)
    d21 = np.einsum("ij,ij->i", v2, v1)
    denom = d00 * d11 - d01 * d01
    denom = np.where(np.abs(denom) < 1e-300, 1.0, denom)
    v = (d11 * d20 - d01 * d21) / denom
    w = (d00 * d21 - d01 * d20) / denom
    u = 1.0 - v - w
    return np.stack([u, v, w], axis=1)


def sample_on_triangles(
    vertices: np.ndarray,
    triangles: np.ndarray,
    tri_indices: np.ndarray,
    rng: np.random.Generator,
) -> tuple[np.ndarray, np.ndarray]:
    """Uniform random points on the given triangles.

    Returns (points (K, 3), barycentric (K, 3)). The sqrt trick makes the
    density uniform over each triangle's area.
    """
    r1 = np.sqrt(rng.random(len(tri_indices)))
    r2 = rng.random(len(tri_indices))
    u = 1.0 - r1
    v = r1 * (1.0 - r2)
    w = r1 * r2
    bary = np.stack([u, v, w], axis=1)
    tv = vertices[triangles[tri_indices]]  # (K, 3, 3)
    points = np.einsum("kj,kjd->kd", bary, tv)
    return points, bary


def ray_hits(
    origins: np.ndarray,
    direction: np.ndarray,
    vertices: np.ndarray,
    triangles: np.ndarray,
) -> tuple[np.ndarray, np.ndarray]:
    """First intersection of parallel rays with a triangle mesh.

    Moller-Trumbore over all (ray, triangle) pairs; all rays share one
    `direction`. Returns (t (K,), tri_index (K,)) with t = +inf and index -1
    where a ray misses the mesh.
    """
    origins = np.atleast_2d(origins)
    d = np.asarray(direction, dtype=float)
    v0 = vertices[triangles[:, 0]]
    e1 = vertices[triangles[:, 1]] - v0
    e2 = vertices[triangles[:, 2]] - v0
    pvec = np.cross(d, e2)  # (M, 3)
    det = np.einsum("mj,mj->m", e1, pvec)
    eps = 1e-12
    ok_det = np.abs(det) > eps
    inv_det = np.where(ok_det, 1.0 / np.where(ok_det, det, 1.0), 0.0)

    best_t = np.full(len(origins), np.inf)
    best_tri = np.full(len(origins), -1, dtype=np.int64)
    # Process rays in chunks to bound the (K, M) temporaries.
    chunk = max(1, int(4e6) // max(1, len(triangles)))
    for start in range(0, len(origins), chunk):
        o = origins[start : start + chunk]  # (k, 3)
        tvec = o[:, None, :] - v0[None, :, :]  # (k, M, 3)
        u = np.einsum("kmj,mj->km", tvec, pvec) * inv_det
        qvec = np.cross(tvec, e1[None, :, :])
        v = np.einsum("kmj,j->km", qvec, d) * inv_det
        t = np.einsum("kmj,mj->km", qvec, e2) * inv_det
        bary_eps = 1e-9
        valid = (
            ok_det[None, :]
            & (u >= -bary_eps)
            & (v >= -bary_eps)
            & (u + v <= 1.0 + bary_eps)
            & (t > 0)
        )
        t = np.where(valid, t, np.inf)
        idx = np.argmin(t, axis=1)
        tmin = t[np.arange(len(o)), idx]
        best_t[start : start + chunk] = tmin
        best_tri[start : start + chunk] = np.where(np.isfinite(tmin), idx, -1)
    return best_t, best_tri
