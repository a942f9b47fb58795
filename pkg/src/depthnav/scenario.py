"""Scenario files: JSON configuration for missions, with field-path
validation errors.

All units are SI, all angles radians. Unspecified sections fall back to the
defaults below (640x480 camera with 10 m range, rho = 0.35 m sphere, planner
timings tau = 0.8 s / ts = 0.2 s).
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .frames import CameraIntrinsics
from .lqr import ModeWeights, StateVec
from .planner import GoalRegion, PlannerConfig
from .scene import Box, RobotModel, Scene, Sphere, Wall

__all__ = ["ScenarioConfig", "ScenarioError", "load_scenario", "parse_scenario"]


class ScenarioError(ValueError):
    """Scenario parse/validation failure; message names the offending field."""


@dataclass
class ScenarioConfig:
    intrinsics: CameraIntrinsics
    robot: RobotModel
    planner: PlannerConfig
    x0: StateVec
    goal: GoalRegion
    scene: Scene
    seed: int = 0


_DEFAULT_INTR = dict(
    fsx=385.0, fsy=385.0, cx=320.0, cy=240.0, width=640, height=480,
    z_near=0.3, max_depth=10.0,
)


def _get(d: dict, key: str, default, path: str):
    v = d.get(key, default)
    if v is None:
        raise ScenarioError(f"missing required field {path}.{key}")
    return v


def _weights(d, path):
    try:
        return ModeWeights(float(d["qp"]), float(d["qv"]), float(d["r"]))
    except (KeyError, TypeError, ValueError) as e:
        raise ScenarioError(f"invalid weights at {path}: {e}") from e


def _primitive(d: dict, path: str):
    kind = _get(d, "type", None, path)
    try:
        if kind == "box":
            return Box(tuple(d["min"]), tuple(d["max"]))
        if kind == "sphere":
            return Sphere(tuple(d["center"]), float(d["radius"]))
        if kind == "wall":
            return Wall(tuple(d["point"]), tuple(d["normal"]), tuple(d["half_extents"]))
    except (KeyError, TypeError, ValueError) as e:
        raise ScenarioError(f"invalid primitive at {path}: {e}") from e
    raise ScenarioError(f"unknown primitive type {kind!r} at {path}.type")


def parse_scenario(data: dict) -> ScenarioConfig:
    """Validate a parsed scenario dict; raises ScenarioError naming the field."""
    intr_d = {**_DEFAULT_INTR, **data.get("intrinsics", {})}
    try:
        intr = CameraIntrinsics(
            fsx=float(intr_d["fsx"]), fsy=float(intr_d["fsy"]),
            cx=float(intr_d["cx"]), cy=float(intr_d["cy"]),
            width=int(intr_d["width"]), height=int(intr_d["height"]),
            z_near=float(intr_d["z_near"]), max_depth=float(intr_d["max_depth"]),
        )
    except ValueError as e:
        raise ScenarioError(f"invalid intrinsics: {e}") from e

    try:
        robot = RobotModel(float(data.get("robot", {}).get("rho", 0.35)))
    except ValueError as e:
        raise ScenarioError(f"invalid robot.rho: {e}") from e

    pl = data.get("planner", {})
    for key in ("tau", "ts", "d_l", "eps_reach", "mission_timeout"):
        if key in pl and (not isinstance(pl[key], (int, float)) or pl[key] <= 0):
            raise ScenarioError(f"validation error at planner.{key}: must be > 0")
    try:
        planner = PlannerConfig(
            tau=float(pl.get("tau", 0.8)),
            ts=float(pl.get("ts", 0.2)),
            d_l=float(pl.get("d_l", 0.5)),
            eps_reach=float(pl.get("eps_reach", 0.15)),
            max_rings=int(pl.get("max_rings", 20)),
            mission_timeout=float(pl.get("mission_timeout", 60.0)),
            weights_l0=_weights(pl.get("weights_l0", {"qp": 1, "qv": 0.1, "r": 3}), "planner.weights_l0"),
            weights_l1=_weights(pl.get("weights_l1", {"qp": 1, "qv": 0.1, "r": 0.1}), "planner.weights_l1"),
            u_max=pl.get("u_max"),
        )
    except ValueError as e:
        raise ScenarioError(f"validation error at planner: {e}") from e

    start = data.get("start", {})
    p0 = np.asarray(_get(start, "p", None, "start"), dtype=float)
    v0 = np.asarray(start.get("v", [0.0, 0.0, 0.0]), dtype=float)
    if p0.shape != (3,) or v0.shape != (3,):
        raise ScenarioError("validation error at start.p/start.v: need 3 components")
    x0 = StateVec(p0, v0)

    goal_d = _get(data, "goal", None, "")
    goal = GoalRegion(
        x_goal=float(_get(goal_d, "x_goal", None, "goal")),
        y_ref=float(goal_d.get("y_ref", p0[1])),
        z_ref=float(goal_d.get("z_ref", p0[2])),
    )

    bounds_d = data.get("world_bounds", {"min": [-50, -50, -50], "max": [50, 50, 50]})
    try:
        bounds = Box(tuple(bounds_d["min"]), tuple(bounds_d["max"]))
    except (KeyError, ValueError) as e:
        raise ScenarioError(f"invalid world_bounds: {e}") from e

    prims = []
    for i, pd in enumerate(data.get("scene", [])):
        prim = _primitive(pd, f"scene[{i}]")
        if not _inside_bounds(prim, bounds):
            raise ScenarioError(f"scene[{i}] lies outside world_bounds")
        prims.append(prim)
    scene = Scene(tuple(prims), bounds)

    lo = np.asarray(bounds.min_corner)
    hi = np.asarray(bounds.max_corner)
    if not (np.all(p0 >= lo) & np.all(p0 <= hi)):
        raise ScenarioError("validation error at start.p: outside world_bounds")

    return ScenarioConfig(
        intrinsics=intr, robot=robot, planner=planner, x0=x0, goal=goal,
        scene=scene, seed=int(data.get("seed", 0)),
    )


def _inside_bounds(prim, bounds: Box) -> bool:
    lo = np.asarray(bounds.min_corner)
    hi = np.asarray(bounds.max_corner)
    if isinstance(prim, Box):
        return bool(np.all(np.asarray(prim.min_corner) >= lo) and np.all(np.asarray(prim.max_corner) <= hi))
    if isinstance(prim, Sphere):
        c = np.asarray(prim.center)
        return bool(np.all(c - prim.radius >= lo) and np.all(c + prim.radius <= hi))
    # wall: conservative check on its corner points
    u, v = prim.axes()
    p0 = np.asarray(prim.point)
    hu, hv = prim.half_extents
    corners = [p0 + su * hu * u + sv * hv * v for su in (-1, 1) for sv in (-1, 1)]
    return all(np.all(c >= lo) and np.all(c <= hi) for c in corners)


def load_scenario(path) -> ScenarioConfig:
    """Load and validate a scenario JSON file."""
    try:
        with open(path) as f:
            data = json.load(f)
    except OSError as e:
        raise ScenarioError(f"cannot read scenario file: {e}") from e
    except json.JSONDecodeError as e:
        raise ScenarioError(f"scenario parse error: {e}") from e
    if not isinstance(data, dict):
        raise ScenarioError("scenario root must be a JSON object")
    return parse_scenario(data)
