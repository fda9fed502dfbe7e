"""Orthographic view camera: azimuth/elevation placement and image projection."""

from dataclasses import dataclass

import numpy as np

DEFAULT_AZIMUTHS = (0.0, 45.0, 90.0)
DEFAULT_ELEVATION = 10.0
DEFAULT_IMAGE_SIZE = 256
DEFAULT_HALF_EXTENT = 1.2  # covers a unit bounding sphere with margin

WORLD_UP = np.array([0.0, 1.0, 0.0])


@dataclass(frozen=True)
class Camera:
    """Orthographic camera on the view sphere, looking at `target`.

    Azimuth rotates about +Y starting from +Z; elevation lifts the eye above
    the horizon. The image window is a square of half-width `half_extent`
    world units centered on the target, mapped to `image_size`^2 pixels with
    pixel centers at integer coordinates and row 0 at the top.
    """

    azimuth_deg: float
    elevation_deg: float = DEFAULT_ELEVATION
    image_size: int = DEFAULT_IMAGE_SIZE
    half_extent: float = DEFAULT_HALF_EXTENT
    target: tuple[float, float, float] = (0.0, 0.5, 0.0)
    view_id: int = 0

    @classmethod
    def for_mesh(cls, mesh, azimuth_deg, elevation_deg=DEFAULT_ELEVATION, **kwargs) -> "Camera":
        lo, hi = mesh.bbox()
        center = 0.5 * (lo + hi)
        return cls(
            azimuth_deg=azimuth_deg,
            elevation_deg=elevation_deg,
            target=(float(center[0]), float(center[1]), float(center[2])),
            **kwargs,
        )

    def basis(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Right, up, and forward unit vectors (forward points into the scene)."""
        az = np.deg2rad(self.azimuth_deg)
        el = np.deg2rad(self.elevation_deg)
        eye_dir = np.array([np.sin(az) * np.cos(el), np.sin(el), np.cos(az) * np.cos(el)])
        forward = -eye_dir
        right = np.cross(forward, WORLD_UP)
        right /= np.linalg.norm(right)
        up = np.cross(right, forward)
        return right, up, forward

    def project(self, points: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """World points (N, 3) -> continuous pixel coords (N, 2) and depths (N,).

        Depth grows away from the camera; smaller is closer.
        """
        right, up, forward = self.basis()
        rel = np.atleast_2d(points) - np.asarray(self.target)
        x = rel @ right
        y = rel @ up
        depth = rel @ forward
        s = self.half_extent
        px = (x + s) / (2.0 * s) * self.image_size - 0.5
        py = (s - y) / (2.0 * s) * self.image_size - 0.5
        return np.stack([px, py], axis=1), depth

    def unproject_pixel(self, px: float, py: float) -> tuple[np.ndarray, np.ndarray]:
        """Orthographic ray (origin, direction) through a continuous pixel coord."""
        right, up, forward = self.basis()
        s = self.half_extent
        x = (px + 0.5) / self.image_size * 2.0 * s - s
        y = s - (py + 0.5) / self.image_size * 2.0 * s
        origin = np.asarray(self.target) + right * x + up * y - forward * (4.0 * s)
        return origin, forward

    def camera_space_normals(self, normals: np.ndarray) -> np.ndarray:
        """World normals -> camera space, z positive toward the camera."""
        right, up, forward = self.basis()
        n = np.atleast_2d(normals)
        return np.stack([n @ right, n @ up, -(n @ forward)], axis=-1)
