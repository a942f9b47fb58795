"""Depth-image-space collision classification and escape search.

A hallucinated robot position is compared against the scene depth image
rendered from the checking configuration: the robot is free only when its
farthest-point footprint is strictly in front of the scene at every pixel
it covers.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .frames import CameraIntrinsics, Configuration, world_to_camera_rotation
from .scene import DepthImage, RobotModel, render_robot_footprint

__all__ = [
    "Verdict",
    "EscapeResult",
    "check_configuration",
    "waypoints2collision",
    "find_escape",
]


class Verdict(Enum):
    FREE = "free"
    COLLISION = "collision"
    OUT_OF_VIEW = "out_of_view"


@dataclass(frozen=True)
class EscapeResult:
    """Outcome of the escape search: a free world position, or stuck."""

    position: np.ndarray | None

    @property
    def stuck(self) -> bool:
        return self.position is None


def check_configuration(
    p,
    depth: DepthImage,
    q_c: Configuration,
    robot: RobotModel,
    intr: CameraIntrinsics,
) -> Verdict:
    """Classify a hallucinated robot position against a scene depth image.

    The depth image must have been rendered from q_c with the same
    intrinsics. Free requires the footprint farthest depth to be strictly
    less than the scene depth at every covered pixel.
    """
    fp = render_robot_footprint(p, q_c, robot, intr)
    if not fp.fully_in_view:
        return Verdict.OUT_OF_VIEW
    ix = fp.pixels[:, 0]
    iy = fp.pixels[:, 1]
    if np.all(fp.farthest_depth < depth.values[iy, ix]):
        return Verdict.FREE
    return Verdict.COLLISION


def waypoints2collision(
    samples,
    depth: DepthImage,
    q_c: Configuration,
    robot: RobotModel,
    intr: CameraIntrinsics,
):
    """Check time-ordered positions; return (verdict, index of first non-free).

    Returns (FREE, None) when every sample is free. Raises ValueError on an
    empty sample list (degenerate trajectory).
    """
    samples = list(samples)
    if not samples:
        raise ValueError("degenerate trajectory: no samples to check")
    for i, p in enumerate(samples):
        v = check_configuration(p, depth, q_c, robot, intr)
        if v is not Verdict.FREE:
            return v, i
    return Verdict.FREE, None


# camera-frame displacement directions, checked in this fixed order
_DIRECTIONS = (
    ("up", np.array([0.0, -1.0, 0.0])),
    ("down", np.array([0.0, 1.0, 0.0])),
    ("left", np.array([-1.0, 0.0, 0.0])),
    ("right", np.array([1.0, 0.0, 0.0])),
)


def find_escape(
    p_hit,
    depth: DepthImage,
    q_c: Configuration,
    d_l: float,
    max_rings: int,
    robot: RobotModel,
    intr: CameraIntrinsics,
) -> EscapeResult:
    """Ring search for a free position around an under-collision one.

    Candidates are placed at k*d_l (k = 1, 2, ...) along the camera-frame
    up, down, left and right directions mapped to the world frame (parallel
    to the image plane), checked in that fixed order. A direction is
    abandoned once its candidate leaves the field of view; the search is
    stuck when all four are abandoned or k exceeds max_rings.
    """
    if d_l <= 0:
        raise ValueError("d_l must be positive")
    if max_rings < 1:
        raise ValueError("max_rings must be at least 1")
    p_hit = np.asarray(p_hit, dtype=float)
    if check_configuration(p_hit, depth, q_c, robot, intr) is Verdict.FREE:
        return EscapeResult(p_hit)
    R_sw = world_to_camera_rotation(q_c).T
    world_dirs = [(name, R_sw @ d) for name, d in _DIRECTIONS]
    alive = {name: True for name, _ in world_dirs}
    for k in range(1, max_rings + 1):
        if not any(alive.values()):
            break
        for name, d in world_dirs:
            if not alive[name]:
                continue
            cand = p_hit + k * d_l * d
            v = check_configuration(cand, depth, q_c, robot, intr)
            if v is Verdict.FREE:
                return EscapeResult(cand)
            if v is Verdict.OUT_OF_VIEW:
                alive[name] = False
    return EscapeResult(None)
