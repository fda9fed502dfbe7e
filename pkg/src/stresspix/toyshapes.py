"""Procedural watertight fixtures: boxes, spheres, and box-built furniture."""

import numpy as np

from .shape_prep import SurfaceMesh

# Corners of the unit cube, indexed by (x, y, z) bits.
_BOX_CORNERS = np.array(
    [[x, y, z] for x in (0, 1) for y in (0, 1) for z in (0, 1)], dtype=np.float64
)
# Two triangles per face, wound outward (CCW seen from outside).
_BOX_TRIS = np.array(
    [
        [0, 1, 3], [0, 3, 2],  # -x
        [4, 6, 7], [4, 7, 5],  # +x
        [0, 4, 5], [0, 5, 1],  # -y
        [2, 3, 7], [2, 7, 6],  # +y
        [0, 2, 6], [0, 6, 4],  # -z
        [1, 5, 7], [1, 7, 3],  # +z
    ],
    dtype=np.int64,
)


def box_arrays(lo, hi) -> tuple[np.ndarray, np.ndarray]:
    lo = np.asarray(lo, dtype=np.float64)
    hi = np.asarray(hi, dtype=np.float64)
    return lo + _BOX_CORNERS * (hi - lo), _BOX_TRIS.copy()


def box(lo, hi, subdivide: int = 1) -> SurfaceMesh:
    """Axis-aligned box; `subdivide` splits each face into a grid of quads."""
    if subdivide <= 1:
        v, t = box_arrays(lo, hi)
        return SurfaceMesh.from_arrays(v, t)
    lo = np.asarray(lo, dtype=np.float64)
    hi = np.asarray(hi, dtype=np.float64)
    n = subdivide
    verts: list = []
    tris: list = []
    index: dict = {}

    def vid(p):
        key = (round(p[0], 9), round(p[1], 9), round(p[2], 9))
        if key not in index:
            index[key] = len(verts)
            verts.append(p)
        return index[key]

    # Each face: fixed axis at lo/hi, grid over the two free axes.
    for axis in range(3):
        u_axis, v_axis = (axis + 1) % 3, (axis + 2) % 3
        for side, value in ((0, lo[axis]), (1, hi[axis])):
            for i in range(n):
                for j in range(n):
                    corners = []
                    for di, dj in ((0, 0), (1, 0), (1, 1), (0, 1)):
                        p = np.empty(3)
                        p[axis] = value
                        p[u_axis] = lo[u_axis] + (hi[u_axis] - lo[u_axis]) * (i + di) / n
                        p[v_axis] = lo[v_axis] + (hi[v_axis] - lo[v_axis]) * (j + dj) / n
                        corners.append(vid(p))
                    a, b, c, d = corners
                    if side == 1:
                        tris += [[a, b, c], [a, c, d]]
                    else:
                        tris += [[a, c, b], [a, d, c]]
    return SurfaceMesh.from_arrays(np.asarray(verts), np.asarray(tris, dtype=np.int64))


def sphere(radius: float = 1.0, center=(0.0, 0.0, 0.0), refine: int = 3) -> SurfaceMesh:
    """Icosphere by repeated 1-to-4 subdivision of an icosahedron."""
    phi = (1.0 + np.sqrt(5.0)) / 2.0
    v = np.array(
        [
            [-1, phi, 0], [1, phi, 0], [-1, -phi, 0], [1, -phi, 0],
            [0, -1, phi], [0, 1, phi], [0, -1, -phi], [0, 1, -phi],
            [phi, 0, -1], [phi, 0, 1], [-phi, 0, -1], [-phi, 0, 1],
        ],
        dtype=np.float64,
    )
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    t = np.array(
        [
            [0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
            [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
            [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
            [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1],
        ],
        dtype=np.int64,
    )
    for _ in range(refine):
        cache: dict = {}
        verts = list(v)

        def midpoint(a, b):
            key = (min(a, b), max(a, b))
            if key not in cache:
                m = verts[a] + verts[b]
                m /= np.linalg.norm(m)
                cache[key] = len(verts)
                verts.append(m)
            return cache[key]

        new_t = []
        for a, b, c in t:
            ab, bc, ca = midpoint(a, b), midpoint(b, c), midpoint(c, a)
            new_t += [[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]
        v = np.asarray(verts)
        t = np.asarray(new_t, dtype=np.int64)
    return SurfaceMesh.from_arrays(v * radius + np.asarray(center, dtype=np.float64), t)


def _union_boxes(parts: list[tuple], subdivide: int = 2) -> SurfaceMesh:
    """Concatenate closed box shells (overlaps allowed; interior fill uses
    winding numbers, so nested/overlapping shells stay solid)."""
    verts = []
    tris = []
    offset = 0
    for lo, hi in parts:
        m = box(lo, hi, subdivide=subdivide)
        verts.append(m.vertices)
        tris.append(m.triangles + offset)
        offset += len(m.vertices)
    return SurfaceMesh.from_arrays(np.concatenate(verts), np.concatenate(tris))


def table(subdivide: int = 2) -> SurfaceMesh:
    """A four-legged table; legs overlap slightly into the top slab."""
    top = ((-0.6, 0.66, -0.4), (0.6, 0.74, 0.4))
    legs = []
    for sx in (-1, 1):
        for sz in (-1, 1):
            x = sx * 0.5
            z = sz * 0.3
            legs.append(((x - 0.05, 0.0, z - 0.05), (x + 0.05, 0.68, z + 0.05)))
    return _union_boxes([top] + legs, subdivide=subdivide)


def chair(subdivide: int = 2) -> SurfaceMesh:
    """A chair: seat, four legs, and a backrest panel."""
    seat = ((-0.35, 0.38, -0.35), (0.35, 0.46, 0.35))
    back = ((-0.35, 0.44, -0.35), (-0.25, 1.05, 0.35))
    legs = []
    for sx in (-1, 1):
        for sz in (-1, 1):
            x = sx * 0.29
            z = sz * 0.29
            legs.append(((x - 0.04, 0.0, z - 0.04), (x + 0.04, 0.4, z + 0.04)))
    return _union_boxes([seat, back] + legs, subdivide=subdivide)


def cantilever_bar(length=1.0, width=0.1, height=0.1, subdivide: int = 4) -> SurfaceMesh:
    """Bar along +X with its root face at x=0, centered on Y/Z around the axis."""
    return box(
        (0.0, -height / 2.0, -width / 2.0),
        (length, height / 2.0, width / 2.0),
        subdivide=subdivide,
    )
