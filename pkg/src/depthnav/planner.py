"""Hybrid automaton (Go-To-Goal / Escape) with the receding-horizon
generate/check/append loop and a deterministic simulated executor.

The original two-thread design (generation + execution) is restated as a
single deterministic timeline: the executor advances one sample every ts of
simulated time and generation happens instantaneously at tick boundaries.
Generation keeps at most one full horizon of unexecuted samples buffered
ahead of the executor; if the buffer empties the executor holds position
and a starvation event is logged.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .collision import Verdict, find_escape, waypoints2collision
from .frames import CameraIntrinsics, Configuration
from .lqr import AxisGain, LookAheadTrajectory, ModeWeights, StateVec, are_residual, rollout, solve_are_axis
from .oracle import brute_force_collision
from .scene import RobotModel, Scene, render_scene_depth

__all__ = [
    "Mode",
    "GoalRegion",
    "PlannerConfig",
    "PlannerState",
    "MissionOutcome",
    "guard_l0_to_l1",
    "guard_l1_to_l0",
    "step_planner",
    "run_mission",
    "EVENT_PRIORITY",
]


class Mode(Enum):
    GO_TO_GOAL = "l0"
    ESCAPE = "l1"


@dataclass(frozen=True)
class GoalRegion:
    """Goal half-space x >= x_goal, plus the reference point l0 regulates to."""

    x_goal: float
    y_ref: float = 0.0
    z_ref: float = 0.0

    def contains(self, p) -> bool:
        return float(p[0]) >= self.x_goal

    def reference(self) -> StateVec:
        return StateVec.rest([self.x_goal, self.y_ref, self.z_ref])


@dataclass(frozen=True)
class PlannerConfig:
    tau: float = 0.8
    ts: float = 0.2
    d_l: float = 0.5
    eps_reach: float = 0.15
    max_rings: int = 20
    mission_timeout: float = 60.0
    weights_l0: ModeWeights = ModeWeights(1.0, 0.1, 3.0)
    weights_l1: ModeWeights = ModeWeights(1.0, 0.1, 0.1)
    u_max: float | None = None
    blind_radius: float | None = None  # None: derived from intrinsics and rho

    def __post_init__(self):
        if min(self.tau, self.ts, self.d_l, self.eps_reach, self.mission_timeout) <= 0:
            raise ValueError("planner times and tolerances must be positive")
        if self.max_rings < 1:
            raise ValueError("max_rings must be at least 1")
        n = round(self.tau / self.ts)
        if abs(n * self.ts - self.tau) > 1e-9:
            raise ValueError("tau must be an integral multiple of ts")

    @property
    def horizon_samples(self) -> int:
        return round(self.tau / self.ts)


# event vocabulary for log rows, most significant first
EVENT_PRIORITY = (
    "goal",
    "stuck",
    "escape_reached",
    "escape_found",
    "collision_predicted",
    "deferred",
    "starvation",
    "none",
)


@dataclass
class PlannerState:
    mode: Mode
    appended: list  # list[(StateVec, u ndarray, mode label)]
    exec_idx: int = 0
    tick: int = 0
    x_esc: StateVec | None = None
    deferred: LookAheadTrajectory | None = None
    events: list = field(default_factory=list)
    stuck: bool = False

    @property
    def exec_sample(self):
        return self.appended[self.exec_idx]

    def log(self, event: str, **info):
        self.events.append({"tick": self.tick, "event": event, "mode": self.mode.value, **info})


@dataclass
class MissionOutcome:
    """Terminal mission status with the executed trajectory and event log."""

    status: str  # reached_goal | stuck | timed_out
    time: float
    rows: list  # executed trajectory rows (dicts, one per tick)
    appended: list  # full feasible trajectory samples
    events: list

    @property
    def reached_goal(self) -> bool:
        return self.status == "reached_goal"


def guard_l0_to_l1(lookahead: LookAheadTrajectory, verdict: Verdict, index) -> bool:
    """Fires when any sampled state of the lookahead is under collision."""
    return verdict is Verdict.COLLISION


def guard_l1_to_l0(x: StateVec, x_esc: StateVec, eps_reach: float) -> bool:
    """Fires once the escape point is physically reached."""
    return float(np.linalg.norm(x.p - x_esc.p)) <= eps_reach


def _blind_radius(intr: CameraIntrinsics, robot: RobotModel) -> float:
    """Distance below which an on-axis robot footprint cannot fit the image."""
    margin = min(intr.cx, intr.cy, intr.width - intr.cx, intr.height - intr.cy)
    return intr.z_near + robot.rho + robot.rho * max(intr.fsx, intr.fsy) / margin


def _config_at(p) -> Configuration:
    # heading held toward +x; the planner does not plan yaw
    return Configuration(float(p[0]), float(p[1]), float(p[2]))


def step_planner(
    scene: Scene,
    state: PlannerState,
    cfg: PlannerConfig,
    goal: GoalRegion,
    intr: CameraIntrinsics,
    robot: RobotModel,
    gains: dict,
) -> PlannerState:
    """One planning tick at the executor's current time.

    Renders a fresh depth image from the current configuration, generates or
    re-checks one candidate lookahead, and appends / defers / replans per the
    automaton guards.
    """
    exec_state = state.exec_sample[0]

    # l1 -> l0: escape physically reached; resume toward goal from the actual state
    if state.mode is Mode.ESCAPE and state.x_esc is not None and guard_l1_to_l0(
        exec_state, state.x_esc, cfg.eps_reach
    ):
        state.log("escape_reached")
        del state.appended[state.exec_idx + 1 :]
        state.deferred = None
        state.mode = Mode.GO_TO_GOAL
        state.x_esc = None

    unexecuted = len(state.appended) - 1 - state.exec_idx
    if state.deferred is None and unexecuted > cfg.horizon_samples:
        return state  # buffer holds a full horizon; nothing to generate

    q_c = _config_at(exec_state.p)
    # escape-mode lookaheads are not image-checked, so skip the render there
    depth = None if state.mode is Mode.ESCAPE else render_scene_depth(scene, q_c, intr)

    if state.deferred is not None:
        la = state.deferred
    else:
        x_start = state.appended[-1][0]
        if state.mode is Mode.GO_TO_GOAL:
            x_ref, gain = goal.reference(), gains["l0"]
        else:
            x_ref, gain = state.x_esc, gains["l1"]
        la = rollout(
            x_start,
            x_ref,
            gain,
            cfg.tau,
            cfg.ts,
            start_time=(len(state.appended) - 1) * cfg.ts,
            mode=state.mode.value,
            u_max=cfg.u_max,
        )

    # the junction sample and samples inside the robot's current blind zone
    # (too close to the camera for their footprint disc to fit the image)
    # are not re-checked
    positions = la.positions()
    blind = cfg.blind_radius if cfg.blind_radius is not None else _blind_radius(intr, robot)
    cam = q_c.position
    check_idx = [
        i for i in range(1, len(positions)) if np.linalg.norm(positions[i] - cam) > blind
    ]
    if not check_idx or state.mode is Mode.ESCAPE:
        # escape maneuvers head to an already-verified free point while
        # cutting across the view cone; they are executed without image
        # re-checks (end-to-end safety is covered by the 3D oracle sweep)
        verdict, hit_idx = Verdict.FREE, None
    else:
        verdict, j = waypoints2collision(
            [positions[i] for i in check_idx], depth, q_c, robot, intr
        )
        hit_idx = check_idx[j] if j is not None else None

    if verdict is Verdict.FREE:
        state.appended.extend((s, u, la.mode) for s, u in la.samples[1:])
        state.deferred = None
    elif verdict is Verdict.OUT_OF_VIEW:
        state.deferred = la
        state.log("deferred", sample=hit_idx)
    else:  # collision predicted somewhere in [k*tau, (k+1)*tau]
        state.deferred = None
        state.log("collision_predicted", sample=hit_idx)
        esc = find_escape(
            positions[hit_idx], depth, q_c, cfg.d_l, cfg.max_rings, robot, intr
        )
        if esc.stuck:
            state.stuck = True
            state.log("stuck")
        else:
            state.mode = Mode.ESCAPE
            state.x_esc = StateVec.rest(esc.position)
            state.log("escape_found", position=[float(v) for v in esc.position])
    return state


def _row(t: float, mode_label: str, s: StateVec, u, event: str) -> dict:
    return {
        "t": round(t, 9),
        "mode": mode_label,
        "px": float(s.p[0]),
        "py": float(s.p[1]),
        "pz": float(s.p[2]),
        "vx": float(s.v[0]),
        "vy": float(s.v[1]),
        "vz": float(s.v[2]),
        "ux": float(u[0]),
        "uy": float(u[1]),
        "uz": float(u[2]),
        "event": event,
    }


def solve_gains(cfg: PlannerConfig) -> dict:
    """Per-mode axis gains, solved once prior to the mission."""
    return {"l0": solve_are_axis(cfg.weights_l0), "l1": solve_are_axis(cfg.weights_l1)}


def run_mission(
    scene: Scene,
    x0: StateVec,
    goal: GoalRegion,
    cfg: PlannerConfig,
    intr: CameraIntrinsics,
    robot: RobotModel,
) -> MissionOutcome:
    """Interleave planning ticks with the simulated executor until terminal.

    The executor moves to the next appended sample every ts of simulated
    time (perfect tracking); if no unexecuted sample exists it holds
    position and logs starvation.
    """
    if brute_force_collision(scene, x0.p, robot.rho):
        raise ValueError("initial state is in collision per the 3D oracle")
    gains = solve_gains(cfg)
    for label, w in (("l0", cfg.weights_l0), ("l1", cfg.weights_l1)):
        res = are_residual(gains[label], w)
        if res >= 1e-9:
            raise RuntimeError(f"Riccati residual {res:.3e} too large for mode {label}")

    state = PlannerState(
        mode=Mode.GO_TO_GOAL,
        appended=[(x0, np.zeros(3), Mode.GO_TO_GOAL.value)],
    )
    rows: list = []
    pending = []  # events to attach to the current tick's row
    while True:
        t = state.tick * cfg.ts
        n_before = len(state.events)
        step_planner(scene, state, cfg, goal, intr, robot, gains)
        tick_events = pending + [e["event"] for e in state.events[n_before:]]
        pending = []
        s, u, mode_label = state.exec_sample

        status = None
        if state.stuck:
            tick_events.append("stuck")
            status = "stuck"
        elif goal.contains(s.p):
            tick_events.append("goal")
            status = "reached_goal"
        elif t >= cfg.mission_timeout:
            status = "timed_out"

        event = min(tick_events, key=EVENT_PRIORITY.index) if tick_events else "none"
        rows.append(_row(t, mode_label, s, u, event))
        if status is not None:
            return MissionOutcome(
                status=status,
                time=t,
                rows=rows,
                appended=list(state.appended),
                events=list(state.events),
            )

        if state.exec_idx < len(state.appended) - 1:
            state.exec_idx += 1
        else:
            pending.append("starvation")
        state.tick += 1
