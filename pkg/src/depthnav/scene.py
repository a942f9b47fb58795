"""Analytic scene primitives, the synthetic depth camera, and the
hallucinated-robot footprint renderer.

Depth semantics: every stored value is the z-coordinate of the nearest
surface in the camera frame (stereo-camera convention), not the Euclidean
ray length. Pixels with no hit hold exactly max_depth.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .frames import (
    CameraIntrinsics,
    Configuration,
    camera_center,
    project,
    world_to_camera,
    world_to_camera_rotation,
)

__all__ = [
    "Box",
    "Sphere",
    "Wall",
    "Scene",
    "DepthImage",
    "RobotModel",
    "RobotFootprint",
    "render_scene_depth",
    "render_robot_footprint",
    "write_pfm",
    "read_pfm",
]


@dataclass(frozen=True)
class Box:
    """Axis-aligned box given by min/max corners (meters, world frame)."""

    min_corner: tuple
    max_corner: tuple

    def __post_init__(self):
        lo, hi = np.asarray(self.min_corner, float), np.asarray(self.max_corner, float)
        if not np.all(lo < hi):
            raise ValueError("box min corner must be strictly below max corner")

    def distance(self, p) -> float:
        lo = np.asarray(self.min_corner, float)
        hi = np.asarray(self.max_corner, float)
        closest = np.clip(np.asarray(p, float), lo, hi)
        return float(np.linalg.norm(closest - p))


@dataclass(frozen=True)
class Sphere:
    """Sphere obstacle (center meters, world frame)."""

    center: tuple
    radius: float

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("sphere radius must be positive")

    def distance(self, p) -> float:
        d = float(np.linalg.norm(np.asarray(p, float) - np.asarray(self.center, float)))
        return max(d - self.radius, 0.0)


@dataclass(frozen=True)
class Wall:
    """Finite rectangular wall: plane point, outward unit normal, half-extents.

    The two in-plane axes are derived deterministically from the normal.
    """

    point: tuple
    normal: tuple
    half_extents: tuple  # (hu, hv), meters

    def __post_init__(self):
        n = np.asarray(self.normal, float)
        if abs(np.linalg.norm(n) - 1.0) > 1e-9:
            raise ValueError("wall normal must be unit length")
        hu, hv = self.half_extents
        if hu <= 0 or hv <= 0:
            raise ValueError("wall half extents must be positive")

    def axes(self):
        n = np.asarray(self.normal, float)
        ref = np.array([0.0, 0.0, 1.0]) if abs(n[2]) < 0.9 else np.array([1.0, 0.0, 0.0])
        u = np.cross(ref, n)
        u /= np.linalg.norm(u)
        v = np.cross(n, u)
        return u, v

    def distance(self, p) -> float:
        p = np.asarray(p, float)
        p0 = np.asarray(self.point, float)
        n = np.asarray(self.normal, float)
        u, v = self.axes()
        rel = p - p0
        cu = np.clip(rel @ u, -self.half_extents[0], self.half_extents[0])
        cv = np.clip(rel @ v, -self.half_extents[1], self.half_extents[1])
        closest = p0 + cu * u + cv * v
        return float(np.linalg.norm(p - closest))

    def intersect(self, origins: np.ndarray, dirs: np.ndarray) -> np.ndarray:
        p0 = np.asarray(self.point, float)
        n = np.asarray(self.normal, float)
        u, v = self.axes()
        denom = dirs @ n
        with np.errstate(divide="ignore", invalid="ignore"):
            t = ((p0 - origins) @ n) / denom
        hit_pt = origins + t[..., None] * dirs
        rel = hit_pt - p0
        in_rect = (np.abs(rel @ u) <= self.half_extents[0]) & (
            np.abs(rel @ v) <= self.half_extents[1]
        )
        ok = (np.abs(denom) > 1e-15) & (t >= 0.0) & in_rect
        return np.where(ok, t, np.inf)


Primitive = Box | Sphere | Wall


@dataclass(frozen=True)
class Scene:
    """Immutable list of obstacle primitives inside compact world bounds."""

    primitives: tuple = ()
    bounds: Box = Box((-50.0, -50.0, -50.0), (50.0, 50.0, 50.0))


@dataclass
class DepthImage:
    """Per-pixel z-depth of the scene, row-major float32, meters."""

    width: int
    height: int
    values: np.ndarray  # shape (height, width), float32

    def __post_init__(self):
        self.values = np.ascontiguousarray(self.values, dtype=np.float32)
        if self.values.shape != (self.height, self.width):
            raise ValueError("depth buffer shape mismatch")


@dataclass(frozen=True)
class RobotModel:
    """Pessimistic bounding sphere of the vehicle over all allowed tilts."""

    rho: float = 0.35

    def __post_init__(self):
        if self.rho <= 0:
            raise ValueError("rho must be positive")


@dataclass
class RobotFootprint:
    """Conservative pixel disc of a hallucinated robot plus its farthest depth.

    pixels is an (N, 2) int array of (ix, iy) image indices; every listed
    pixel carries the same farthest-depth value (sphere model).
    """

    pixels: np.ndarray
    farthest_depth: float
    fully_in_view: bool
    center_pixel: tuple | None = None
    pixel_radius: float = 0.0


_ray_cache: dict = {}
_dir_cache: dict = {}
_DIR_CACHE_MAX = 8


def _pixel_rays(intr: CameraIntrinsics) -> np.ndarray:
    """Camera-frame ray directions through pixel centers, unit z component."""
    key = intr
    rays = _ray_cache.get(key)
    if rays is None:
        xs = (np.arange(intr.width) + 0.5 - intr.cx) / intr.fsx
        ys = (np.arange(intr.height) + 0.5 - intr.cy) / intr.fsy
        gx, gy = np.meshgrid(xs, ys)
        rays = np.stack([gx, gy, np.ones_like(gx)], axis=-1)
        _ray_cache[key] = rays
    return rays


def _world_rays(intr: CameraIntrinsics, R_ws: np.ndarray):
    """World-frame ray grid plus derived per-pixel constants, cached per
    (intrinsics, orientation): the grid is reused across renders and its
    reciprocal / squared norm across primitives."""
    key = (intr, R_ws.tobytes())
    entry = _dir_cache.get(key)
    if entry is None:
        dirs = _pixel_rays(intr) @ R_ws  # camera->world: R_ws.T applied per ray
        with np.errstate(divide="ignore"):
            inv_dirs = 1.0 / dirs
        dir_sq = np.einsum("...i,...i->...", dirs, dirs)
        if len(_dir_cache) >= _DIR_CACHE_MAX:
            _dir_cache.clear()
        entry = (dirs, inv_dirs, dir_sq)
        _dir_cache[key] = entry
    return entry


def render_scene_depth(scene: Scene, q: Configuration, intr: CameraIntrinsics) -> DepthImage:
    """Ray-cast the scene from configuration q into a depth image.

    Depth is the smallest camera-frame z >= z_near over all primitive
    intersections along each pixel ray, clamped to max_depth; max_depth
    where nothing is hit. Deterministic.
    """
    R_ws = world_to_camera_rotation(q)
    dirs, inv_dirs, dir_sq = _world_rays(intr, R_ws)
    origin = camera_center(q)
    depth = np.full(dirs.shape[:2], np.inf)
    for prim in scene.primitives:
        t = _first_hit(prim, origin, dirs, inv_dirs, dir_sq, intr.z_near)
        np.minimum(depth, t, out=depth)
    depth = np.where(np.isfinite(depth), np.minimum(depth, intr.max_depth), intr.max_depth)
    return DepthImage(intr.width, intr.height, depth.astype(np.float32))


def _first_hit(
    prim: Primitive,
    origin: np.ndarray,
    dirs: np.ndarray,
    inv_dirs: np.ndarray,
    dir_sq: np.ndarray,
    z_near: float,
) -> np.ndarray:
    """Nearest surface crossing with t >= z_near, inf when none."""
    if isinstance(prim, Box):
        lo = np.asarray(prim.min_corner, float)
        hi = np.asarray(prim.max_corner, float)
        with np.errstate(invalid="ignore"):
            t1 = (lo - origin) * inv_dirs
            t2 = (hi - origin) * inv_dirs
            lo_t = np.minimum(t1, t2)
            hi_t = np.maximum(t1, t2)
        # 0 * inf slab degeneracies (ray origin on a slab plane) become NaN;
        # fmax/fmin ignore NaN, matching the unbounded-slab convention
        t_near = np.fmax(np.fmax(lo_t[..., 0], lo_t[..., 1]), lo_t[..., 2])
        t_far = np.fmin(np.fmin(hi_t[..., 0], hi_t[..., 1]), hi_t[..., 2])
        hit = t_near <= t_far
        first = np.where(t_near >= z_near, t_near, t_far)
        return np.where(hit & (first >= z_near), first, np.inf)
    if isinstance(prim, Sphere):
        c = np.asarray(prim.center, float)
        oc = origin - c
        b = 2.0 * (dirs @ oc)
        cc = float(oc @ oc) - prim.radius**2
        disc = b * b - 4.0 * dir_sq * cc
        sq = np.sqrt(np.maximum(disc, 0.0))
        t1 = (-b - sq) / (2.0 * dir_sq)
        t2 = (-b + sq) / (2.0 * dir_sq)
        first = np.where(t1 >= z_near, t1, t2)
        return np.where((disc >= 0.0) & (first >= z_near), first, np.inf)
    if isinstance(prim, Wall):
        t = prim.intersect(origin[None, None, :], dirs)
        return np.where(t >= z_near, t, np.inf)
    raise TypeError(f"unknown primitive {type(prim)!r}")


def render_robot_footprint(
    p, q_c: Configuration, robot: RobotModel, intr: CameraIntrinsics
) -> RobotFootprint:
    """Conservative pixel disc of the robot bounding sphere centered at p.

    The disc radius divides by (zc - rho), the nearest sphere depth, and is
    scaled by the view-ray secant so that every sphere surface point projects
    inside the disc even off-axis. farthest depth is zc + rho for all pixels.
    """
    center_s = world_to_camera(p, q_c)
    zc = float(center_s[2])
    rho = robot.rho
    far = zc + rho
    if zc - rho < intr.z_near:
        return RobotFootprint(np.empty((0, 2), dtype=int), far, False)
    r = project(center_s, intr)
    secant = float(np.linalg.norm(center_s)) / zc
    pr = max(intr.fsx, intr.fsy) * rho / (zc - rho) * secant
    rx, ry = r
    in_view = (rx - pr >= 0.0) and (rx + pr < intr.width) and (ry - pr >= 0.0) and (ry + pr < intr.height)
    ix_lo = max(int(np.floor(rx - pr)), 0)
    ix_hi = min(int(np.ceil(rx + pr)), intr.width - 1)
    iy_lo = max(int(np.floor(ry - pr)), 0)
    iy_hi = min(int(np.ceil(ry + pr)), intr.height - 1)
    gx, gy = np.meshgrid(np.arange(ix_lo, ix_hi + 1), np.arange(iy_lo, iy_hi + 1))
    mask = (gx + 0.5 - rx) ** 2 + (gy + 0.5 - ry) ** 2 <= pr * pr
    pix = np.stack([gx[mask], gy[mask]], axis=-1)
    if pix.shape[0] == 0:
        # sub-pixel disc: keep the pixel containing the center
        cx_i = min(max(int(rx), 0), intr.width - 1)
        cy_i = min(max(int(ry), 0), intr.height - 1)
        pix = np.array([[cx_i, cy_i]], dtype=int)
    return RobotFootprint(pix, far, bool(in_view), (rx, ry), pr)


def write_pfm(path, depth: DepthImage) -> None:
    """Write a grayscale PFM: 'Pf', width height, scale -1.0, rows bottom-up."""
    with open(path, "wb") as f:
        f.write(b"Pf\n")
        f.write(f"{depth.width} {depth.height}\n".encode("ascii"))
        f.write(b"-1.0\n")
        f.write(np.flipud(depth.values).astype("<f4").tobytes())


def read_pfm(path) -> DepthImage:
    """Read a grayscale little-endian PFM written by :func:`write_pfm`."""
    with open(path, "rb") as f:
        if f.readline().strip() != b"Pf":
            raise ValueError("not a grayscale PFM file")
        w, h = (int(v) for v in f.readline().split())
        scale = float(f.readline())
        data = np.frombuffer(f.read(w * h * 4), dtype="<f4" if scale < 0 else ">f4")
    values = np.flipud(data.reshape(h, w)).copy()
    return DepthImage(w, h, values)
