"""Shape ingestion: normalization, fixed/contact regions, force-location sampling.

Conventions: +Y is up; meshes are normalized to a unit bounding sphere resting
on the ground plane (min-Y = 0, bounding-box center at X = Z = 0).
"""

import json
from dataclasses import dataclass

import numpy as np

from . import geometry, meshio
from .camera import Camera

DEFAULT_FORCE_NEWTONS = 100.0
DEFAULT_FIXED_RATIO = 0.03


@dataclass(frozen=True)
class SurfaceMesh:
    """Watertight triangle surface with outward per-vertex unit normals."""

    vertices: np.ndarray  # (N, 3) float64
    triangles: np.ndarray  # (M, 3) int64
    vertex_normals: np.ndarray  # (N, 3) float64

    @classmethod
    def from_arrays(cls, vertices, triangles, validate: bool = True) -> "SurfaceMesh":
        vertices = np.ascontiguousarray(vertices, dtype=np.float64)
        triangles = np.ascontiguousarray(triangles, dtype=np.int64)
        if validate:
            meshio.validate_watertight(vertices, triangles)
            # Winding is consistent at this point; flip globally if it encloses
            # negative volume so normals point outward.
            if geometry.signed_volume(vertices, triangles) < 0:
                triangles = triangles[:, [0, 2, 1]]
        normals = geometry.vertex_normals(vertices, triangles)
        return cls(vertices=vertices, triangles=triangles, vertex_normals=normals)

    @classmethod
    def load(cls, path, validate: bool = True) -> "SurfaceMesh":
        vertices, triangles = meshio.load_mesh_arrays(path)
        return cls.from_arrays(vertices, triangles, validate=validate)

    @property
    def face_normals(self) -> np.ndarray:
        return geometry.face_normals(self.vertices, self.triangles)

    def bbox(self) -> tuple[np.ndarray, np.ndarray]:
        return self.vertices.min(axis=0), self.vertices.max(axis=0)


@dataclass(frozen=True)
class RegionLabels:
    """Partition of surface vertices into Dirichlet (fixed) and force-admissible
    (contact) sets."""

    fixed: np.ndarray  # sorted vertex indices
    contact: np.ndarray

    def __post_init__(self):
        fixed = np.unique(np.asarray(self.fixed, dtype=np.int64))
        contact = np.unique(np.asarray(self.contact, dtype=np.int64))
        object.__setattr__(self, "fixed", fixed)
        object.__setattr__(self, "contact", contact)
        if len(np.intersect1d(fixed, contact)):
            raise ValueError("fixed and contact regions must be disjoint")
        if len(fixed) == 0:
            raise ValueError("fixed region must be nonempty")

    def covers(self, n_vertices: int) -> bool:
        return len(self.fixed) + len(self.contact) == n_vertices


@dataclass(frozen=True)
class ForceSample:
    """A surface force: applied at `location` along the inward `direction`."""

    location: np.ndarray  # (3,)
    normal: np.ndarray  # outward unit normal at location
    magnitude: float = DEFAULT_FORCE_NEWTONS
    view_id: int = 0
    pixel: tuple[float, float] = (0.0, 0.0)  # continuous image coords (x, y)
    triangle: int = -1  # containing surface triangle

    def __post_init__(self):
        object.__setattr__(self, "location", np.asarray(self.location, dtype=np.float64))
        n = np.asarray(self.normal, dtype=np.float64)
        norm = np.linalg.norm(n)
        if not np.isfinite(norm) or abs(norm - 1.0) > 1e-6:
            raise ValueError(f"normal must be a unit vector, got norm {norm}")
        object.__setattr__(self, "normal", n)
        # Zero is allowed so the solver's homogeneous case stays expressible;
        # sampled forces are always strictly positive.
        if self.magnitude < 0:
            raise ValueError("force magnitude must be nonnegative")

    @property
    def direction(self) -> np.ndarray:
        """Inward force direction (opposite the surface normal)."""
        return -self.normal


def normalize_shape(mesh: SurfaceMesh) -> SurfaceMesh:
    """Scale to a unit bounding sphere and rest the shape on the ground plane.

    The bounding sphere is centered at the axis-aligned bounding-box center,
    which makes the operation exactly idempotent and scale-invariant.
    """
    lo, hi = mesh.bbox()
    center = 0.5 * (lo + hi)
    radius = np.linalg.norm(mesh.vertices - center, axis=1).max()
    if radius <= 0:
        raise meshio.MeshValidationError("degenerate mesh: zero bounding sphere radius")
    v = (mesh.vertices - center) / radius
    # Re-anchor: min-Y on the ground, bbox center on the Y axis.
    lo2 = v.min(axis=0)
    hi2 = v.max(axis=0)
    shift = np.array([0.5 * (lo2[0] + hi2[0]), lo2[1], 0.5 * (lo2[2] + hi2[2])])
    v = v - shift
    return SurfaceMesh(vertices=v, triangles=mesh.triangles, vertex_normals=mesh.vertex_normals)


def assign_regions(mesh: SurfaceMesh, ratio: float = DEFAULT_FIXED_RATIO) -> RegionLabels:
    """Label vertices with height <= ratio * max-Y as fixed, the rest as contact."""
    if not 0 < ratio < 1:
        raise ValueError(f"ratio must be in (0, 1), got {ratio}")
    y = mesh.vertices[:, 1]
    if y.min() < -1e-6:
        raise ValueError("mesh must be normalized before region assignment (min-Y = 0)")
    threshold = ratio * y.max()
    fixed = np.flatnonzero(y <= threshold)
    contact = np.flatnonzero(y > threshold)
    if len(fixed) == 0:
        raise ValueError("no ground contact: no vertex at or below the fixed-height threshold")
    return RegionLabels(fixed=fixed, contact=contact)


def contact_triangles(mesh: SurfaceMesh, labels: RegionLabels) -> np.ndarray:
    """Indices of triangles whose three vertices all lie in the contact region."""
    is_contact = np.zeros(len(mesh.vertices), dtype=bool)
    is_contact[labels.contact] = True
    return np.flatnonzero(is_contact[mesh.triangles].all(axis=1))


def sample_forces(
    mesh: SurfaceMesh,
    labels: RegionLabels,
    camera: Camera,
    count: int,
    seed: int,
    magnitude: float = DEFAULT_FORCE_NEWTONS,
) -> list[ForceSample]:
    """Draw `count` force locations, area-uniform over the visible contact surface.

    Candidates are sampled area-weighted on front-facing contact triangles and
    kept only if unoccluded (the orthographic ray through the candidate hits
    the mesh first at the candidate itself).
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    tri_idx = contact_triangles(mesh, labels)
    if len(tri_idx) == 0:
        raise ValueError("contact region contains no triangles")
    _, _, forward = camera.basis()
    front = mesh.face_normals[tri_idx] @ forward < -1e-9
    tri_idx = tri_idx[front]
    if len(tri_idx) == 0:
        raise ValueError("no visible contact area under this camera")
    areas = geometry.triangle_areas(mesh.vertices, mesh.triangles)[tri_idx]
    weights = areas / areas.sum()

    rng = np.random.default_rng(seed)
    samples: list[ForceSample] = []
    attempts = 0
    while len(samples) < count:
        attempts += 1
        if attempts > 200:
            raise ValueError("visible contact area appears empty (rejection sampling stalled)")
        k = max(count - len(samples), 16) * 2
        chosen = tri_idx[rng.choice(len(tri_idx), size=k, p=weights)]
        points, bary = geometry.sample_on_triangles(mesh.vertices, mesh.triangles, chosen, rng)
        # Occlusion: cast the view ray back through each candidate.
        span = float(np.linalg.norm(mesh.bbox()[1] - mesh.bbox()[0])) + 1.0
        origins = points - forward * (2.0 * span)
        t_hit, hit_tri = geometry.ray_hits(origins, forward, mesh.vertices, mesh.triangles)
        t_self = 2.0 * span
        visible = (hit_tri == chosen) | (t_hit >= t_self - 1e-6 * span)
        pix = camera.project(points)[0]
        inside = (
            (pix[:, 0] > -0.5)
            & (pix[:, 0] < camera.image_size - 0.5)
            & (pix[:, 1] > -0.5)
            & (pix[:, 1] < camera.image_size - 0.5)
        )
        # The rounded pixel must itself be covered by the mesh (its center ray
        # hits something), so the point map stays inside the rendered mask.
        rounded = np.round(pix)
        centers = np.stack(
            [camera.unproject_pixel(px, py)[0] for px, py in rounded], axis=0
        )
        _, center_tri = geometry.ray_hits(centers, forward, mesh.vertices, mesh.triangles)
        covered = center_tri >= 0
        for j in np.flatnonzero(visible & inside & covered):
            if len(samples) == count:
                break
            tri = mesh.triangles[chosen[j]]
            normal = bary[j] @ mesh.vertex_normals[tri]
            nn = np.linalg.norm(normal)
            if nn == 0:
                continue
            samples.append(
                ForceSample(
                    location=points[j],
                    normal=normal / nn,
                    magnitude=magnitude,
                    view_id=camera.view_id,
                    pixel=(float(pix[j, 0]), float(pix[j, 1])),
                    triangle=int(chosen[j]),
                )
            )
    return samples


def regions_to_json(labels: RegionLabels, forces: list[ForceSample], seed: int) -> str:
    """Serialize region labels plus force records as the per-shape JSON sidecar."""
    payload = {
        "fixed": labels.fixed.tolist(),
        "contact": labels.contact.tolist(),
        "seed": seed,
        "forces": [
            {
                "location": f.location.tolist(),
                "normal": f.normal.tolist(),
                "magnitude": f.magnitude,
                "view_id": f.view_id,
                "pixel": list(f.pixel),
                "triangle": f.triangle,
            }
            for f in forces
        ],
    }
    return json.dumps(payload, indent=2, sort_keys=True)


def regions_from_json(text: str) -> tuple[RegionLabels, list[ForceSample], int]:
    payload = json.loads(text)
    labels = RegionLabels(fixed=np.asarray(payload["fixed"]), contact=np.asarray(payload["contact"]))
    forces = [
        ForceSample(
            location=np.asarray(f["location"]),
            normal=np.asarray(f["normal"]),
            magnitude=f["magnitude"],
            view_id=f["view_id"],
            pixel=tuple(f["pixel"]),
            triangle=f.get("triangle", -1),
        )
        for f in payload["forces"]
    ]
    return labels, forces, payload["seed"]
