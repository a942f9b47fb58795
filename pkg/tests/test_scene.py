import numpy as np
import pytest

from depthnav import (
    Box,
    Configuration,
    Scene,
    Sphere,
    Wall,
    camera_to_world,
    project,
    read_pfm,
    render_robot_footprint,
    render_scene_depth,
    world_to_camera,
    write_pfm,
)
from depthnav.scene import RobotModel, _pixel_rays
from depthnav.frames import world_to_camera_rotation


Q0 = Configuration(0.0, 0.0, 0.0)


class TestPrimitives:
    def test_box_rejects_inverted_corners(self):
        with pytest.raises(ValueError):
            Box((1.0, 0.0, 0.0), (0.0, 1.0, 1.0))

    def test_sphere_rejects_nonpositive_radius(self):
        with pytest.raises(ValueError):
            Sphere((0.0, 0.0, 0.0), 0.0)

    def test_wall_rejects_non_unit_normal(self):
        with pytest.raises(ValueError):
            Wall((0.0, 0.0, 0.0), (2.0, 0.0, 0.0), (1.0, 1.0))

    def test_box_distance(self):
        box = Box((0.0, 0.0, 0.0), (1.0, 1.0, 1.0))
        assert box.distance([0.5, 0.5, 0.5]) == 0.0
        assert box.distance([2.0, 0.5, 0.5]) == pytest.approx(1.0)

    def test_sphere_distance(self):
        s = Sphere((0.0, 0.0, 0.0), 1.0)
        assert s.distance([3.0, 0.0, 0.0]) == pytest.approx(2.0)
        assert s.distance([0.5, 0.0, 0.0]) == 0.0

    def test_wall_distance(self):
        w = Wall((5.0, 0.0, 0.0), (-1.0, 0.0, 0.0), (2.0, 2.0))
        assert w.distance([3.0, 0.0, 0.0]) == pytest.approx(2.0)
        # beyond the rectangle edge, distance goes to the edge, not the plane
        assert w.distance([5.0, 4.0, 0.0]) == pytest.approx(2.0)


class TestRenderSceneDepth:
    def test_empty_scene_fills_max_depth(self, intr_small):
        depth = render_scene_depth(Scene(), Q0, intr_small)
        assert depth.values.shape == (120, 160)
        assert depth.values.dtype == np.float32
        assert np.all(depth.values == np.float32(intr_small.max_depth))

    def test_frontoparallel_wall_constant_depth(self, intr_small):
        wall = Wall((4.0, 0.0, 0.0), (-1.0, 0.0, 0.0), (50.0, 50.0))
        depth = render_scene_depth(Scene((wall,)), Q0, intr_small)
        assert np.allclose(depth.values, 4.0, atol=1e-5)

    def test_box_occludes_wall(self, intr_small):
        # box face at camera depth 2 in front of a wall at depth 5
        box = Box((2.0, -0.5, -0.5), (3.0, 0.5, 0.5))
        wall = Wall((5.0, 0.0, 0.0), (-1.0, 0.0, 0.0), (50.0, 50.0))
        depth = render_scene_depth(Scene((box, wall)), Q0, intr_small)
        cx, cy = int(intr_small.cx), int(intr_small.cy)
        assert depth.values[cy, cx] == pytest.approx(2.0, abs=1e-5)
        assert depth.values[0, 0] == pytest.approx(5.0, abs=1e-4)

    def test_occlusion_monotonicity(self, intr_small):
        rng = np.random.default_rng(10)
        for _ in range(5):
            prims = _random_primitives(rng, 3)
            base = render_scene_depth(Scene(tuple(prims)), Q0, intr_small)
            extra = prims + _random_primitives(rng, 1)
            more = render_scene_depth(Scene(tuple(extra)), Q0, intr_small)
            assert np.all(more.values <= base.values + 1e-6)

    def test_deterministic(self, intr_small):
        scene = Scene((Sphere((4.0, 0.5, 0.0), 1.0), Box((6.0, -2.0, -1.0), (7.0, 2.0, 1.0))))
        a = render_scene_depth(scene, Q0, intr_small)
        b = render_scene_depth(scene, Q0, intr_small)
        assert np.array_equal(a.values, b.values)

    def test_agrees_with_ray_march_oracle(self, intr_small):
        """Independent 1 mm ray-march: inside/outside sign change along the ray."""
        rng = np.random.default_rng(11)
        step = 1e-3
        ts = np.arange(intr_small.z_near, intr_small.max_depth + step, step)
        rays = _pixel_rays(intr_small)
        n_scenes, n_pixels = 20, 50
        for _ in range(n_scenes):
            prims = _random_primitives(rng, rng.integers(1, 4))
            scene = Scene(tuple(prims))
            depth = render_scene_depth(scene, Q0, intr_small)
            R_ws = world_to_camera_rotation(Q0)
            for _ in range(n_pixels):
                ix = int(rng.integers(0, intr_small.width))
                iy = int(rng.integers(0, intr_small.height))
                d_world = rays[iy, ix] @ R_ws
                pts = ts[:, None] * d_world[None, :]
                inside = np.zeros(len(ts), dtype=bool)
                for prim in prims:
                    if isinstance(prim, Box):
                        lo, hi = np.asarray(prim.min_corner), np.asarray(prim.max_corner)
                        inside |= np.all((pts >= lo) & (pts <= hi), axis=1)
                    else:
                        c = np.asarray(prim.center)
                        inside |= np.linalg.norm(pts - c, axis=1) <= prim.radius
                hits = np.flatnonzero(inside)
                expected = ts[hits[0]] if hits.size else intr_small.max_depth
                assert abs(float(depth.values[iy, ix]) - expected) < 2e-3


def _random_primitives(rng, n):
    prims = []
    for _ in range(int(n)):
        if rng.random() < 0.5:
            c = np.array([rng.uniform(2.0, 8.0), rng.uniform(-3.0, 3.0), rng.uniform(-2.0, 2.0)])
            prims.append(Sphere(tuple(c), float(rng.uniform(0.3, 1.2))))
        else:
            lo = np.array([rng.uniform(2.0, 8.0), rng.uniform(-3.0, 2.0), rng.uniform(-2.0, 1.0)])
            hi = lo + rng.uniform(0.4, 2.0, 3)
            prims.append(Box(tuple(lo), tuple(hi)))
    return prims


class TestRobotFootprint:
    def test_on_axis_sphere(self, intr):
        robot = RobotModel(rho=0.3)
        p = camera_to_world([0.0, 0.0, 3.0], Q0)
        fp = render_robot_footprint(p, Q0, robot, intr)
        assert fp.fully_in_view
        assert fp.farthest_depth == pytest.approx(3.3)
        assert fp.center_pixel == pytest.approx((intr.cx, intr.cy))
        assert fp.pixels.shape[0] > 0

    def test_near_plane_violation(self, intr):
        robot = RobotModel(rho=0.3)
        p = camera_to_world([0.0, 0.0, 0.4], Q0)
        fp = render_robot_footprint(p, Q0, robot, intr)
        assert not fp.fully_in_view

    def test_disc_exceeding_bounds(self, intr):
        robot = RobotModel(rho=0.3)
        # center near the image border with a large disc
        p = camera_to_world([2.3, 0.0, 3.0], Q0)
        fp = render_robot_footprint(p, Q0, robot, intr)
        assert not fp.fully_in_view

    def test_conservative_covers_all_surface_points(self, intr):
        """Every true sphere-surface projection lies inside the pixel disc."""
        rng = np.random.default_rng(12)
        robot = RobotModel(rho=0.35)
        dirs = rng.normal(size=(10_000, 3))
        dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
        for center_s in ([0.0, 0.0, 3.0], [1.2, -0.8, 4.0], [-1.5, 0.9, 6.0]):
            p = camera_to_world(center_s, Q0)
            fp = render_robot_footprint(p, Q0, robot, intr)
            assert fp.fully_in_view
            surface = np.asarray(center_s) + robot.rho * dirs
            zs = surface[:, 2]
            # farthest-depth correctness: bound holds, tight at the far pole
            assert np.all(fp.farthest_depth >= zs - 1e-12)
            far_pole = np.asarray(center_s) + [0.0, 0.0, robot.rho]
            assert fp.farthest_depth == pytest.approx(far_pole[2], abs=1e-12)
            visible = surface[zs >= intr.z_near]
            rx = intr.fsx * visible[:, 0] / visible[:, 2] + intr.cx
            ry = intr.fsy * visible[:, 1] / visible[:, 2] + intr.cy
            dist = np.hypot(rx - fp.center_pixel[0], ry - fp.center_pixel[1])
            assert np.all(dist <= fp.pixel_radius + 1e-9)

    def test_subpixel_disc_keeps_center_pixel(self, intr):
        robot = RobotModel(rho=0.001)
        p = camera_to_world([0.0, 0.0, 9.0], Q0)
        fp = render_robot_footprint(p, Q0, robot, intr)
        assert fp.pixels.shape[0] >= 1


class TestPfm:
    def test_round_trip_bit_exact(self, intr_small, tmp_path):
        scene = Scene((Sphere((4.0, 0.0, 0.0), 1.0),))
        depth = render_scene_depth(scene, Q0, intr_small)
        path = tmp_path / "depth.pfm"
        write_pfm(path, depth)
        back = read_pfm(path)
        assert back.width == depth.width and back.height == depth.height
        assert np.array_equal(back.values, depth.values)
        assert back.values.dtype == np.float32

    def test_header_format(self, intr_small, tmp_path):
        depth = render_scene_depth(Scene(), Q0, intr_small)
        path = tmp_path / "depth.pfm"
        write_pfm(path, depth)
        with open(path, "rb") as f:
            assert f.readline().strip() == b"Pf"
            assert f.readline().split() == [b"160", b"120"]
            assert float(f.readline()) == -1.0

    def test_read_rejects_non_pfm(self, tmp_path):
        path = tmp_path / "bad.pfm"
        path.write_bytes(b"P6\n1 1\n255\n")
        with pytest.raises(ValueError):
            read_pfm(path)
