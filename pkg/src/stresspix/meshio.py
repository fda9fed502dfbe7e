"""Triangle mesh loading (OBJ, ASCII/binary STL) and watertightness validation."""

import struct
from pathlib import Path

import numpy as np

from . import geometry


class MeshValidationError(ValueError):
    """Raised when a mesh violates the watertight/orientation contract.

    `boundary_edges` lists open edges (vertex index pairs) for diagnostics.
    """

    def __init__(self, message, boundary_edges=None):
        super().__init__(message)
        self.boundary_edges = boundary_edges if boundary_edges is not None else []


def boundary_edges(triangles: np.ndarray) -> np.ndarray:
    """Undirected edges not shared by exactly two triangles, shape (E, 2)."""
    e = np.concatenate([triangles[:, [0, 1]], triangles[:, [1, 2]], triangles[:, [2, 0]]])
    e = np.sort(e, axis=1)
    uniq, counts = np.unique(e, axis=0, return_counts=True)
    return uniq[counts != 2]


def orientation_conflicts(triangles: np.ndarray) -> np.ndarray:
    """Directed edges appearing more than once (inconsistent winding)."""
    e = np.concatenate([triangles[:, [0, 1]], triangles[:, [1, 2]], triangles[:, [2, 0]]])
    uniq, counts = np.unique(e, axis=0, return_counts=True)
    return uniq[counts > 1]


def validate_watertight(vertices: np.ndarray, triangles: np.ndarray) -> None:
    """Check the SurfaceMesh invariants; raise MeshValidationError on failure."""
    if len(triangles) == 0:
        raise MeshValidationError("mesh has no triangles")
    areas = geometry.triangle_areas(vertices, triangles)
    degenerate = np.flatnonzero(areas < 1e-14)
    if len(degenerate):
        raise MeshValidationError(
            f"{len(degenerate)} degenerate (zero-area) triangles, e.g. index {degenerate[0]}"
        )
    open_edges = boundary_edges(triangles)
    if len(open_edges):
        raise MeshValidationError(
            f"mesh is not watertight: {len(open_edges)} open boundary edges",
            boundary_edges=[tuple(map(int, e)) for e in open_edges],
        )
    conflicts = orientation_conflicts(triangles)
    if len(conflicts):
        raise MeshValidationError(
            f"inconsistent triangle orientation on {len(conflicts)} edges"
        )


def weld_vertices(vertices: np.ndarray, triangles: np.ndarray, decimals: int = 8):
    """Merge vertices that coincide after rounding, dropping collapsed triangles."""
    key = np.round(vertices, decimals=decimals)
    _, first, inverse = np.unique(key, axis=0, return_index=True, return_inverse=True)
    welded = vertices[first]
    tri = inverse[triangles]
    keep = (tri[:, 0] != tri[:, 1]) & (tri[:, 1] != tri[:, 2]) & (tri[:, 2] != tri[:, 0])
    return welded, tri[keep]


def load_obj(path) -> tuple[np.ndarray, np.ndarray]:
    """Minimal OBJ reader: `v` and `f` records; polygon faces fan-triangulated."""
    vertices, faces = [], []
    with open(path, "r", errors="replace") as fh:
        for line in fh:
            parts = line.split()
            if not parts:
                continue
            if parts[0] == "v":
                vertices.append([float(x) for x in parts[1:4]])
            elif parts[0] == "f":
                idx = [int(tok.split("/")[0]) for tok in parts[1:]]
                idx = [i - 1 if i > 0 else len(vertices) + i for i in idx]
                for k in range(1, len(idx) - 1):
                    faces.append([idx[0], idx[k], idx[k + 1]])
    if not vertices or not faces:
        raise MeshValidationError(f"no geometry found in OBJ file {path}")
    return np.asarray(vertices, dtype=np.float64), np.asarray(faces, dtype=np.int64)


def save_obj(path, vertices: np.ndarray, triangles: np.ndarray) -> None:
    with open(path, "w") as fh:
        for v in vertices:
            fh.write(f"v {v[0]:.9g} {v[1]:.9g} {v[2]:.9g}\n")
        for t in triangles:
            fh.write(f"f {t[0] + 1} {t[1] + 1} {t[2] + 1}\n")


def load_stl(path) -> tuple[np.ndarray, np.ndarray]:
    """STL reader (auto-detects ASCII vs binary); vertices welded afterwards."""
    raw = Path(path).read_bytes()
    is_ascii = raw[:5] == b"solid" and b"facet" in raw[:2000]
    if is_ascii:
        tris = []
        current = []
        for line in raw.decode(errors="replace").splitlines():
            parts = line.split()
            if parts[:1] == ["vertex"]:
                current.append([float(x) for x in parts[1:4]])
                if len(current) == 3:
                    tris.append(current)
                    current = []
        tri_pts = np.asarray(tris, dtype=np.float64)
    else:
        if len(raw) < 84:
            raise MeshValidationError(f"truncated binary STL file {path}")
        (count,) = struct.unpack_from("<I", raw, 80)
        need = 84 + count * 50
        if len(raw) < need:
            raise MeshValidationError(f"binary STL truncated: {len(raw)} < {need} bytes")
        rec = np.frombuffer(raw, dtype=np.uint8, count=count * 50, offset=84)
        rec = rec.reshape(count, 50)
        tri_pts = rec[:, 12:48].copy().view("<f4").reshape(count, 3, 3).astype(np.float64)
    if len(tri_pts) == 0:
        raise MeshValidationError(f"no facets found in STL file {path}")
    vertices = tri_pts.reshape(-1, 3)
    triangles = np.arange(len(vertices), dtype=np.int64).reshape(-1, 3)
    return weld_vertices(vertices, triangles)


def load_mesh_arrays(path) -> tuple[np.ndarray, np.ndarray]:
    """Dispatching loader; returns raw (vertices, triangles) without validation."""
    suffix = Path(path).suffix.lower()
    if suffix == ".obj":
        return load_obj(path)
    if suffix == ".stl":
        return load_stl(path)
    raise MeshValidationError(f"unsupported mesh format '{suffix}' (expected .obj or .stl)")
