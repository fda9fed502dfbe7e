"""Linear-elastic FEM oracle on voxel-derived tetrahedral meshes.

Pipeline: watertight surface -> interior voxelization (winding-number column
fill) -> 5-tets-per-voxel volume mesh -> sparse stiffness solve with fixed
(Dirichlet) nodes -> per-surface-vertex von Mises stress.
"""

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.spatial import cKDTree

from . import geometry, meshio
from .shape_prep import ForceSample, RegionLabels, SurfaceMesh

DEFAULT_RESOLUTION = 32

# StressField: per-surface-vertex von Mises stress in Pa, numpy (N,) >= 0.
StressField = np.ndarray


@dataclass(frozen=True)
class Material:
    """Linear isotropic material (small deformations)."""

    young_modulus: float = 1e9  # Pa
    poisson_ratio: float = 0.3

    def __post_init__(self):
        if self.young_modulus <= 0:
            raise ValueError("young_modulus must be positive")
        if not 0 <= self.poisson_ratio < 0.5:
            raise ValueError("poisson_ratio must lie in [0, 0.5)")

    def elasticity_matrix(self) -> np.ndarray:
        """6x6 stiffness in Voigt order (xx, yy, zz, xy, yz, zx), engineering shear."""
        e, nu = self.young_modulus, self.poisson_ratio
        lam = e * nu / ((1 + nu) * (1 - 2 * nu))
        mu = e / (2 * (1 + nu))
        c = np.zeros((6, 6))
        c[:3, :3] = lam
        c[np.diag_indices(3)] += 2 * mu
        c[3, 3] = c[4, 4] = c[5, 5] = mu
        return c


@dataclass(frozen=True)
class VolumeMesh:
    """Tetrahedral discretization of a surface mesh interior."""

    nodes: np.ndarray  # (P, 3)
    tets: np.ndarray  # (T, 4), positively oriented
    surface_map: np.ndarray  # surface vertex -> nearest volume node
    surface: SurfaceMesh
    cell: np.ndarray  # (3,) voxel edge lengths


def von_mises(sigma: np.ndarray) -> np.ndarray:
    """Von Mises equivalent stress of symmetric 3x3 tensors (leading dims kept)."""
    s = np.asarray(sigma, dtype=float)
    sxx, syy, szz = s[..., 0, 0], s[..., 1, 1], s[..., 2, 2]
    sxy, syz, szx = s[..., 0, 1], s[..., 1, 2], s[..., 2, 0]
    return _von_mises_components(sxx, syy, szz, sxy, syz, szx)


def von_mises_voigt(sigma: np.ndarray) -> np.ndarray:
    """Von Mises from Voigt stress vectors (..., 6) ordered (xx,yy,zz,xy,yz,zx)."""
    s = np.asarray(sigma, dtype=float)
    return _von_mises_components(s[..., 0], s[..., 1], s[..., 2], s[..., 3], s[..., 4], s[..., 5])


def _von_mises_components(sxx, syy, szz, sxy, syz, szx):
    return np.sqrt(
        0.5 * ((sxx - syy) ** 2 + (syy - szz) ** 2 + (szz - sxx) ** 2)
        + 3.0 * (sxy**2 + syz**2 + szx**2)
    )


def _column_fill(mesh: SurfaceMesh, origin, cell, ncells) -> np.ndarray:
    """Occupancy grid by winding number along +Z columns through cell centers.

    Winding (not parity) keeps unions of closed shells solid even when they
    touch or overlap.
    """
    nx, ny, nz = ncells
    # Tiny irrational offset avoids rays through triangle edges/vertices.
    jitter = (np.sqrt(2.0) - 1.0) * 1e-4
    cx = origin[0] + (np.arange(nx) + 0.5 + jitter) * cell[0]
    cy = origin[1] + (np.arange(ny) + 0.5 + jitter * 1.7) * cell[1]
    cz = origin[2] + (np.arange(nz) + 0.5) * cell[2]

    crossings_z: list[list[float]] = [[] for _ in range(nx * ny)]
    crossings_s: list[list[int]] = [[] for _ in range(nx * ny)]

    tv = mesh.vertices[mesh.triangles]  # (M, 3, 3)
    normals = geometry.face_normals(mesh.vertices, mesh.triangles)
    for t in range(len(tv)):
        nz_comp = normals[t, 2]
        if abs(nz_comp) < 1e-12:
            continue  # parallel to the ray; adjacent faces carry the winding
        p = tv[t]
        x0, x1 = p[:, 0].min(), p[:, 0].max()
        y0, y1 = p[:, 1].min(), p[:, 1].max()
        i0 = int(np.searchsorted(cx, x0, side="left"))
        i1 = int(np.searchsorted(cx, x1, side="right"))
        j0 = int(np.searchsorted(cy, y0, side="left"))
        j1 = int(np.searchsorted(cy, y1, side="right"))
        if i0 >= i1 or j0 >= j1:
            continue
        gx, gy = np.meshgrid(cx[i0:i1], cy[j0:j1], indexing="ij")
        # 2D barycentric test in the XY projection.
        ax, ay = p[0, 0], p[0, 1]
        bx, by = p[1, 0], p[1, 1]
        qx, qy = p[2, 0], p[2, 1]
        d = (by - qy) * (ax - qx) + (qx - bx) * (ay - qy)
        if abs(d) < 1e-300:
            continue
        w0 = ((by - qy) * (gx - qx) + (qx - bx) * (gy - qy)) / d
        w1 = ((qy - ay) * (gx - qx) + (ax - qx) * (gy - qy)) / d
        w2 = 1.0 - w0 - w1
        inside = (w0 >= 0) & (w1 >= 0) & (w2 >= 0)
        if not inside.any():
            continue
        zhit = w0 * p[0, 2] + w1 * p[1, 2] + w2 * p[2, 2]
        sign = 1 if nz_comp < 0 else -1  # entering solid when normal faces -z
        ii, jj = np.nonzero(inside)
        for a, b in zip(ii, jj):
            col = (i0 + a) * ny + (j0 + b)
            crossings_z[col].append(float(zhit[a, b]))
            crossings_s[col].append(sign)

    occ = np.zeros((nx, ny, nz), dtype=bool)
    for i in range(nx):
        for j in range(ny):
            col = i * ny + j
            zs = crossings_z[col]
            if not zs:
                continue
            order = np.argsort(zs)
            z_sorted = np.asarray(zs)[order]
            s_sorted = np.asarray(crossings_s[col])[order]
            winding = np.cumsum(s_sorted)
            # Inside where the winding after the last crossing below z is >= 1.
            pos = np.searchsorted(z_sorted, cz, side="right")
            inside = np.where(pos > 0, winding[np.maximum(pos - 1, 0)] >= 1, False)
            occ[i, j, :] = inside
    return occ


# 5-tet decompositions of a cube; corners indexed by bits (x<<2 | y<<1 | z).
_TETS_EVEN = np.array(
    [[4, 2, 1, 7], [0, 4, 2, 1], [6, 2, 4, 7], [5, 4, 1, 7], [3, 1, 2, 7]], dtype=np.int64
)
# Mirror image, used on odd-parity cells so face diagonals match neighbors.
_TETS_ODD = np.array(
    [[0, 6, 5, 3], [4, 0, 6, 5], [2, 6, 0, 3], [1, 0, 5, 3], [7, 5, 6, 3]], dtype=np.int64
)


def discretize(mesh: SurfaceMesh, resolution: int = DEFAULT_RESOLUTION) -> VolumeMesh:
    """Voxelize the watertight interior and split each cell into 5 tetrahedra.

    `resolution` is in voxels per unit length; the grid exactly spans the
    bounding box (cells per axis = round(extent * resolution), at least 1), so
    box-like shapes discretize without geometric error.
    """
    if resolution < 8:
        raise ValueError("resolution must be >= 8 voxels per unit")
    meshio.validate_watertight(mesh.vertices, mesh.triangles)
    lo, hi = mesh.bbox()
    extent = hi - lo
    ncells = np.maximum(1, np.round(extent * resolution).astype(int))
    cell = extent / ncells
    if np.any(cell <= 0):
        raise ValueError("degenerate (flat) mesh cannot be voxelized")

    occ = _column_fill(mesh, lo, cell, tuple(ncells))
    filled = np.argwhere(occ)
    if len(filled) == 0:
        raise ValueError(
            "empty interior at this resolution (thin shell?); try a higher resolution"
        )

    nx, ny, nz = ncells
    # Compact node numbering over the corners of filled cells.
    node_ids = -np.ones((nx + 1, ny + 1, nz + 1), dtype=np.int64)
    corners = np.array(
        [[x, y, z] for x in (0, 1) for y in (0, 1) for z in (0, 1)], dtype=np.int64
    )
    all_corners = (filled[:, None, :] + corners[None, :, :]).reshape(-1, 3)
    uniq = np.unique(all_corners, axis=0)
    node_ids[uniq[:, 0], uniq[:, 1], uniq[:, 2]] = np.arange(len(uniq))
    nodes = lo + uniq * cell

    parity = filled.sum(axis=1) % 2
    cell_corner_ids = node_ids[
        all_corners[:, 0], all_corners[:, 1], all_corners[:, 2]
    ].reshape(len(filled), 8)
    tets = np.empty((len(filled), 5, 4), dtype=np.int64)
    even = parity == 0
    tets[even] = cell_corner_ids[even][:, _TETS_EVEN]
    tets[~even] = cell_corner_ids[~even][:, _TETS_ODD]
    tets = tets.reshape(-1, 4)

    # Enforce positive orientation.
    d = nodes[tets]
    vol6 = np.einsum(
        "ij,ij->i",
        d[:, 1] - d[:, 0],
        np.cross(d[:, 2] - d[:, 0], d[:, 3] - d[:, 0]),
    )
    flip = vol6 < 0
    tets[flip] = tets[flip][:, [0, 1, 3, 2]]

    tree = cKDTree(nodes)
    _, surface_map = tree.query(mesh.vertices)
    return VolumeMesh(
        nodes=nodes,
        tets=tets,
        surface_map=surface_map.astype(np.int64),
        surface=mesh,
        cell=cell,
    )


def tet_volumes(volume: VolumeMesh) -> np.ndarray:
    d = volume.nodes[volume.tets]
    return (
        np.einsum(
            "ij,ij->i",
            d[:, 1] - d[:, 0],
            np.cross(d[:, 2] - d[:, 0], d[:, 3] - d[:, 0]),
        )
        / 6.0
    )


def _barycentric_gradients(volume: VolumeMesh) -> tuple[np.ndarray, np.ndarray]:
    """Per-tet gradients of the barycentric coordinates (T, 4, 3) and volumes."""
    d = volume.nodes[volume.tets]
    e = np.stack([d[:, 1] - d[:, 0], d[:, 2] - d[:, 0], d[:, 3] - d[:, 0]], axis=1)
    vol = np.linalg.det(e) / 6.0
    inv = np.linalg.inv(e)  # rows of inv.T are grad(lambda_1..3)
    g123 = np.transpose(inv, (0, 2, 1))
    g0 = -g123.sum(axis=1, keepdims=True)
    return np.concatenate([g0, g123], axis=1), vol


# Local edges of the quadratic tet, in connectivity order after the 4 corners.
_TET_EDGES = np.array([[0, 1], [0, 2], [0, 3], [1, 2], [1, 3], [2, 3]], dtype=np.int64)

# 4-point Gauss rule on the tet (degree-2 exact), rows are barycentric coords.
_QA = 0.5854101966249685
_QB = 0.1381966011250105
_QUAD_POINTS = np.full((4, 4), _QB)
np.fill_diagonal(_QUAD_POINTS, _QA)

# Corners in barycentric coords, where recovered stresses are evaluated.
_CORNER_POINTS = np.eye(4)


def _quadratic_shape_gradients(lam: np.ndarray, grads: np.ndarray) -> np.ndarray:
    """Gradients of the 10 quadratic tet shape functions at barycentric `lam`.

    `grads` is (T, 4, 3); returns (T, 10, 3). Corner functions come first,
    then midside functions in `_TET_EDGES` order.
    """
    t = len(grads)
    out = np.empty((t, 10, 3))
    for i in range(4):
        out[:, i] = (4.0 * lam[i] - 1.0) * grads[:, i]
    for k, (i, j) in enumerate(_TET_EDGES):
        out[:, 4 + k] = 4.0 * (lam[i] * grads[:, j] + lam[j] * grads[:, i])
    return out


def _strain_matrices(shape_grads: np.ndarray) -> np.ndarray:
    """B matrices (T, 6, 3*n) mapping nodal displacements to Voigt strain."""
    t, n, _ = shape_grads.shape
    b = np.zeros((t, 6, 3 * n))
    for a in range(n):
        gx, gy, gz = shape_grads[:, a, 0], shape_grads[:, a, 1], shape_grads[:, a, 2]
        c = 3 * a
        b[:, 0, c + 0] = gx
        b[:, 1, c + 1] = gy
        b[:, 2, c + 2] = gz
        b[:, 3, c + 0] = gy
        b[:, 3, c + 1] = gx
        b[:, 4, c + 1] = gz
        b[:, 4, c + 2] = gy
        b[:, 5, c + 0] = gz
        b[:, 5, c + 2] = gx
    return b


def _edge_nodes(volume: VolumeMesh) -> tuple[np.ndarray, np.ndarray]:
    """Unique midside edges: returns (edges (E, 2), per-tet edge ids (T, 6))."""
    pairs = volume.tets[:, _TET_EDGES]  # (T, 6, 2)
    pairs = np.sort(pairs.reshape(-1, 2), axis=1)
    edges, inverse = np.unique(pairs, axis=0, return_inverse=True)
    return edges, inverse.reshape(len(volume.tets), 6)


def _point_triangle_distances(points: np.ndarray, tri: np.ndarray) -> np.ndarray:
    """Distances from `points` (K, 3) to one triangle (3, 3) (Ericson-style)."""
    a, b, c = tri
    ab = b - a
    ac = c - a
    ap = points - a
    d1 = ap @ ab
    d2 = ap @ ac
    bp = points - b
    d3 = bp @ ab
    d4 = bp @ ac
    cp = points - c
    d5 = cp @ ab
    d6 = cp @ ac
    closest = np.empty_like(points)

    vc = d1 * d4 - d3 * d2
    vb = d5 * d2 - d1 * d6
    va = d3 * d6 - d5 * d4
    denom = va + vb + vc
    denom = np.where(np.abs(denom) < 1e-300, 1.0, denom)
    v = vb / denom
    w = vc / denom
    closest[:] = a + v[:, None] * ab + w[:, None] * ac  # interior projection

    # Edge AB region
    t_ab = np.clip(np.divide(d1, d1 - d3, out=np.zeros_like(d1), where=(d1 - d3) != 0), 0, 1)
    on_ab = (vc <= 0) & (d1 >= 0) & (d3 <= 0)
    closest[on_ab] = a + t_ab[on_ab, None] * ab
    # Edge AC region
    t_ac = np.clip(np.divide(d2, d2 - d6, out=np.zeros_like(d2), where=(d2 - d6) != 0), 0, 1)
    on_ac = (vb <= 0) & (d2 >= 0) & (d6 <= 0)
    closest[on_ac] = a + t_ac[on_ac, None] * ac
    # Edge BC region
    t_bc = np.clip(
        np.divide(d4 - d3, (d4 - d3) + (d5 - d6), out=np.zeros_like(d4), where=((d4 - d3) + (d5 - d6)) != 0),
        0,
        1,
    )
    on_bc = (va <= 0) & (d4 - d3 >= 0) & (d5 - d6 >= 0)
    closest[on_bc] = b + t_bc[on_bc, None] * (c - b)
    # Vertex regions
    at_a = (d1 <= 0) & (d2 <= 0)
    closest[at_a] = a
    at_b = (d3 >= 0) & (d4 <= d3)
    closest[at_b] = b
    at_c = (d6 >= 0) & (d5 <= d6)
    closest[at_c] = c
    return np.linalg.norm(points - closest, axis=1)


def fixed_volume_nodes(
    volume: VolumeMesh, labels: RegionLabels, tolerance: float | None = None
) -> np.ndarray:
    """Volume nodes constrained by the fixed surface region.

    Union of (a) nearest nodes of fixed surface vertices and (b) nodes within
    `tolerance` of any triangle whose vertices are all fixed. (b) keeps the
    clamp surface-resolution independent: every grid node lying on the fixed
    patch is constrained even when grid nodes outnumber surface vertices.
    """
    fixed_nodes = set(int(n) for n in np.unique(volume.surface_map[labels.fixed]))
    is_fixed_vert = np.zeros(len(volume.surface.vertices), dtype=bool)
    is_fixed_vert[labels.fixed] = True
    patch = np.flatnonzero(is_fixed_vert[volume.surface.triangles].all(axis=1))
    if len(patch):
        if tolerance is None:
            # Strictly under one grid spacing so only on-patch nodes qualify.
            tolerance = 0.75 * float(np.min(volume.cell))
        tree = cKDTree(volume.nodes)
        tv = volume.surface.vertices[volume.surface.triangles[patch]]
        for tri in tv:
            centroid = tri.mean(axis=0)
            radius = np.linalg.norm(tri - centroid, axis=1).max() + tolerance
            cand = tree.query_ball_point(centroid, radius)
            if not cand:
                continue
            cand = np.asarray(cand)
            dist = _point_triangle_distances(volume.nodes[cand], tri)
            fixed_nodes.update(int(n) for n in cand[dist <= tolerance])
    return np.fromiter(sorted(fixed_nodes), dtype=np.int64)


def locate_triangle(mesh: SurfaceMesh, point: np.ndarray) -> int:
    """Triangle whose plane-projected barycentric fit comes closest to `point`."""
    tv = mesh.vertices[mesh.triangles]
    k = len(tv)
    bary = geometry.barycentric_coords(np.broadcast_to(point, (k, 3)).copy(), tv)
    clipped = np.clip(bary, 0.0, 1.0)
    clipped /= clipped.sum(axis=1, keepdims=True)
    nearest = np.einsum("kj,kjd->kd", clipped, tv)
    return int(np.argmin(np.linalg.norm(nearest - point, axis=1)))


class StressSolver:
    """Assembles and factorizes the constrained stiffness system once per
    (volume, material, labels); solves per force sample.

    Elements are quadratic (10-node) tetrahedra on the voxel-derived tet mesh;
    midside nodes are internal to the solver. Fixed surface vertices constrain
    their mapped corner nodes plus midside nodes between two fixed corners.
    """

    def __init__(self, volume: VolumeMesh, material: Material, labels: RegionLabels):
        self.volume = volume
        self.material = material
        self.labels = labels
        self._c = material.elasticity_matrix()
        self._grads, self._vol = _barycentric_gradients(volume)
        if np.any(self._vol <= 0):
            raise ValueError("volume mesh contains non-positive tetrahedra")

        n_corner = len(volume.nodes)
        self._edges, edge_ids = _edge_nodes(volume)
        self._conn = np.concatenate([volume.tets, n_corner + edge_ids], axis=1)  # (T, 10)
        self._n_nodes = n_corner + len(self._edges)

        fixed_corners = fixed_volume_nodes(volume, labels)
        if len(fixed_corners) == 0:
            raise ValueError("fixed node set is empty; system would be singular")
        self._fixed_corners = set(int(n) for n in np.unique(volume.surface_map[labels.fixed]))
        is_fixed = np.zeros(n_corner, dtype=bool)
        is_fixed[fixed_corners] = True
        fixed_edges = np.flatnonzero(is_fixed[self._edges].all(axis=1)) + n_corner
        fixed_nodes = np.concatenate([fixed_corners, fixed_edges])

        n_dof = 3 * self._n_nodes
        fixed_dofs = (3 * fixed_nodes[:, None] + np.arange(3)[None, :]).ravel()
        free_mask = np.ones(n_dof, dtype=bool)
        free_mask[fixed_dofs] = False
        self._free = np.flatnonzero(free_mask)

        k = self._assemble(n_dof)
        k_ff = k[self._free][:, self._free].tocsc()
        try:
            # Symmetric-friendly ordering; noticeably faster than COLAMD here.
            self._lu = spla.splu(k_ff, permc_spec="MMD_AT_PLUS_A")
        except RuntimeError as exc:
            raise ValueError(f"singular system (insufficient constraints): {exc}") from exc

    def _assemble(self, n_dof: int) -> sp.csr_matrix:
        t = len(self._conn)
        dofs = (3 * self._conn[:, :, None] + np.arange(3)[None, None, :]).reshape(t, 30)
        acc = sp.csr_matrix((n_dof, n_dof))
        chunk = max(1, 6_000_000 // 900)
        for start in range(0, t, chunk):
            sl = slice(start, min(start + chunk, t))
            ke = np.zeros((dofs[sl].shape[0], 30, 30))
            for q in range(len(_QUAD_POINTS)):
                sg = _quadratic_shape_gradients(_QUAD_POINTS[q], self._grads[sl])
                b = _strain_matrices(sg)
                ke += np.einsum(
                    "tia,ij,tjb->tab", b, self._c, b, optimize=True
                ) * (self._vol[sl] / 4.0)[:, None, None]
            d = dofs[sl]
            rows = np.repeat(d, 30, axis=1).ravel()
            cols = np.tile(d, (1, 30)).ravel()
            acc = acc + sp.coo_matrix(
                (ke.ravel(), (rows, cols)), shape=(n_dof, n_dof)
            ).tocsr()
        return acc

    def _load_vector(self, force: ForceSample) -> np.ndarray:
        mesh = self.volume.surface
        tri = force.triangle
        if tri < 0:
            tri = locate_triangle(mesh, force.location)
        tri_verts = mesh.triangles[tri]
        mapped = self.volume.surface_map[tri_verts]
        if any(int(n) in self._fixed_corners for n in mapped):
            raise ValueError("force acts on the fixed region")
        bary = geometry.barycentric_coords(
            force.location[None, :], mesh.vertices[tri_verts][None, :, :]
        )[0]
        f = np.zeros(3 * self._n_nodes)
        load = force.magnitude * force.direction
        for w, node in zip(bary, mapped):
            f[3 * node : 3 * node + 3] += w * load
        return f

    def displacements(self, force: ForceSample) -> np.ndarray:
        """Displacements (corner + midside nodes, 3) for a single force sample."""
        f = self._load_vector(force)
        u = np.zeros_like(f)
        u[self._free] = self._lu.solve(f[self._free])
        if not np.all(np.isfinite(u)):
            raise ValueError("singular system (insufficient constraints): non-finite solution")
        return u.reshape(-1, 3)

    def element_stresses(self, u: np.ndarray) -> np.ndarray:
        """Per-element Voigt stress (T, 4, 6) evaluated at the corner nodes."""
        t = len(self._conn)
        ue = u[self._conn].reshape(t, 30)
        out = np.empty((t, 4, 6))
        for c in range(4):
            sg = _quadratic_shape_gradients(_CORNER_POINTS[c], self._grads)
            b = _strain_matrices(sg)
            eps = np.einsum("tij,tj->ti", b, ue)
            out[:, c] = eps @ self._c.T
        return out

    def vertex_von_mises(self, element_sigma: np.ndarray) -> StressField:
        """Average per-element corner von Mises onto mapped surface vertices."""
        vm = von_mises_voigt(element_sigma)  # (T, 4)
        nodal = np.zeros(len(self.volume.nodes))
        counts = np.zeros(len(self.volume.nodes))
        np.add.at(nodal, self.volume.tets.ravel(), vm.ravel())
        np.add.at(counts, self.volume.tets.ravel(), 1.0)
        nodal = np.divide(nodal, counts, out=np.zeros_like(nodal), where=counts > 0)
        return nodal[self.volume.surface_map]

    def solve(self, force: ForceSample) -> StressField:
        u = self.displacements(force)
        return self.vertex_von_mises(self.element_stresses(u))

    def solve_many(self, forces: list[ForceSample]) -> list[StressField]:
        return [self.solve(f) for f in forces]


def solve(
    volume: VolumeMesh, material: Material, labels: RegionLabels, force: ForceSample
) -> StressField:
    """Single-force linear-elastic solve; see StressSolver for the batched path."""
    return StressSolver(volume, material, labels).solve(force)


def batch_solve(
    volume: VolumeMesh, material: Material, labels: RegionLabels, forces: list[ForceSample]
) -> list[StressField]:
    """Solve many force samples sharing one stiffness factorization."""
    if not forces:
        return []
    return StressSolver(volume, material, labels).solve_many(forces)


def save_stress_field(path_prefix, stress: StressField) -> None:
    """Binary array + JSON header, vertex order matching the surface mesh."""
    import json
    from pathlib import Path

    prefix = Path(path_prefix)
    values = np.asarray(stress, dtype=np.float64)
    values.tofile(prefix.with_suffix(".f64"))
    header = {"count": int(values.size), "dtype": "float64", "units": "Pa"}
    prefix.with_suffix(".json").write_text(json.dumps(header, indent=2))


def load_stress_field(path_prefix) -> StressField:
    import json
    from pathlib import Path

    prefix = Path(path_prefix)
    header = json.loads(prefix.with_suffix(".json").read_text())
    values = np.fromfile(prefix.with_suffix(".f64"), dtype=header["dtype"])
    if len(values) != header["count"]:
        raise ValueError("stress field payload does not match its header")
    return values
