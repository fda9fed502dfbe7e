import numpy as np
import pytest

from stresspix.aggregate import RegionSpec, aggregate_stress, multi_force_query, select_aligned_points
from stresspix.model.train import load_checkpoint


def hemisphere_fixture(size: int = 48):
    """Normal map of a hemisphere bulging toward the camera, on a disc mask."""
    yy, xx = np.mgrid[0:size, 0:size]
    cx = cy = size / 2 - 0.5
    r = size * 0.4
    d2 = (xx - cx) ** 2 + (yy - cy) ** 2
    mask = (d2 <= r * r).astype(float)
    nx = (xx - cx) / r
    ny = -(yy - cy) / r
    nz = np.sqrt(np.clip(1.0 - nx**2 - ny**2, 0.0, 1.0))
    normals = np.stack([nx, ny, nz], axis=2)
    normals /= np.maximum(np.linalg.norm(normals, axis=2, keepdims=True), 1e-9)
    normal_map = np.where(mask[:, :, None] > 0, (normals + 1) / 2, 0.5)
    return normal_map, mask


class TestSelectAlignedPoints:
    def test_uniform_normals_cap_and_center(self):
        size = 32
        normal_map = np.full((size, size, 3), 0.5)
        normal_map[:, :, 2] = 1.0  # all normals point at the camera
        mask = np.ones((size, size))
        region = RegionSpec(center=(16, 16), radius=5, angle_tolerance_deg=10, max_points=8)
        pts = select_aligned_points(normal_map, mask, region)
        assert len(pts) == 8
        assert pts[0] == (16, 16)
        # the 7 nearest in-mask pixels follow (deviation ties -> distance)
        dists = [np.hypot(x - 16, y - 16) for x, y in pts]
        assert dists == sorted(dists)
        assert max(dists) <= np.hypot(1, 1) + 1e-9

    def test_zero_tolerance_exact_match_only(self):
        normal_map = np.full((8, 8, 3), 0.5)
        normal_map[:, :, 2] = 1.0
        normal_map[4, 5] = [1.0, 0.5, 0.5]  # different direction
        mask = np.ones((8, 8))
        region = RegionSpec(center=(4, 4), radius=2, angle_tolerance_deg=0, max_points=50)
        pts = select_aligned_points(normal_map, mask, region)
        assert (5, 4) not in pts
        assert (4, 4) in pts
        assert len(pts) > 1  # neighbors with identical normals qualify

    def test_matches_bruteforce_oracle_on_hemisphere(self):
        normal_map, mask = hemisphere_fixture()
        region = RegionSpec(center=(24, 24), radius=10, angle_tolerance_deg=10, max_points=10_000)
        pts = select_aligned_points(normal_map, mask, region)

        # Exhaustive oracle: scan every pixel, apply the angular filter.
        decoded = normal_map * 2 - 1
        center_n = decoded[24, 24] / np.linalg.norm(decoded[24, 24])
        expected = set()
        for y in range(mask.shape[0]):
            for x in range(mask.shape[1]):
                if mask[y, x] <= 0.5:
                    continue
                if np.hypot(x - 24, y - 24) > 10:
                    continue
                v = decoded[y, x]
                nv = np.linalg.norm(v)
                if nv <= 1e-9:
                    continue
                cos = np.clip(v @ center_n / nv, -1, 1)
                if np.degrees(np.arccos(cos)) <= 10:
                    expected.add((x, y))
        expected.add((24, 24))
        assert set(pts) == expected

    def test_center_outside_mask_error(self):
        normal_map, mask = hemisphere_fixture()
        with pytest.raises(ValueError, match="outside"):
            select_aligned_points(normal_map, mask, RegionSpec(center=(0, 0), radius=4))

    def test_region_spec_validation(self):
        with pytest.raises(ValueError):
            RegionSpec(center=(1, 1), radius=0)
        with pytest.raises(ValueError):
            RegionSpec(center=(1, 1), radius=3, angle_tolerance_deg=120)
        with pytest.raises(ValueError):
            RegionSpec(center=(1, 1), radius=3, max_points=0)


class TestAggregateStress:
    def test_single_map_identity(self):
        m = np.random.default_rng(0).random((8, 8))
        out = aggregate_stress([m])
        np.testing.assert_array_equal(out, m)

    def test_two_identical(self):
        m = np.random.default_rng(1).random((8, 8))
        np.testing.assert_allclose(aggregate_stress([m, m.copy()]), m)

    def test_constants(self):
        maps = [np.full((4, 4), v) for v in (0.2, 0.4, 0.6)]
        np.testing.assert_allclose(aggregate_stress(maps), 0.4)

    def test_permutation_invariant(self):
        rng = np.random.default_rng(2)
        maps = [rng.random((6, 6)) for _ in range(4)]
        a = aggregate_stress(maps)
        b = aggregate_stress(maps[::-1])
        np.testing.assert_allclose(a, b, atol=1e-15)

    def test_bounded_by_min_max(self):
        rng = np.random.default_rng(3)
        maps = [rng.random((6, 6)) for _ in range(5)]
        agg = aggregate_stress(maps)
        stack = np.stack(maps)
        assert (agg <= stack.max(axis=0) + 1e-12).all()
        assert (agg >= stack.min(axis=0) - 1e-12).all()

    def test_sum_mode(self):
        maps = [np.full((2, 2), 0.1), np.full((2, 2), 0.3)]
        np.testing.assert_allclose(aggregate_stress(maps, mode="sum"), 0.4)

    def test_empty_error(self):
        with pytest.raises(ValueError):
            aggregate_stress([])

    def test_shape_mismatch_error(self):
        with pytest.raises(ValueError):
            aggregate_stress([np.zeros((2, 2)), np.zeros((3, 3))])


class TestMultiForceQuery:
    @pytest.fixture()
    def generator(self, tiny_checkpoint):
        return load_checkpoint(tiny_checkpoint)["generator"]

    @pytest.fixture()
    def sketch_and_center(self, generator):
        """A sketch plus a pixel inside the predicted mask of the tiny model."""
        rng = np.random.default_rng(4)
        sketch = (rng.random((32, 32)) > 0.8).astype(float)
        from stresspix.model.infer import infer

        result = infer(generator, sketch, (16, 16))
        ys, xs = np.nonzero(result.mask > 0.5)
        assert len(ys) > 0, "tiny model should predict some mask pixels"
        return sketch, (int(xs[0]), int(ys[0]))

    def test_single_point_region_equals_infer(self, generator, sketch_and_center):
        from stresspix.model.infer import infer

        sketch, center = sketch_and_center
        region = RegionSpec(center=center, radius=1, angle_tolerance_deg=0, max_points=1)
        out = multi_force_query(generator, sketch, region)
        assert len(out.per_force) == 1
        base = infer(generator, sketch, center)
        np.testing.assert_array_equal(out.aggregated, base.stress)

    def test_aggregate_is_mean_of_per_force(self, generator, sketch_and_center):
        sketch, center = sketch_and_center
        region = RegionSpec(center=center, radius=6, angle_tolerance_deg=45, max_points=4)
        out = multi_force_query(generator, sketch, region)
        assert 1 <= len(out.selected_pixels) <= 4
        np.testing.assert_allclose(
            out.aggregated, np.mean(out.per_force, axis=0), atol=1e-6
        )

    def test_aggregated_bounded_by_per_force_max(self, generator, sketch_and_center):
        sketch, center = sketch_and_center
        region = RegionSpec(center=center, radius=6, angle_tolerance_deg=45, max_points=4)
        out = multi_force_query(generator, sketch, region)
        stack = np.stack(out.per_force)
        assert (out.aggregated <= stack.max(axis=0) + 1e-9).all()
