"""Infinite-horizon LQR for the flat double-integrator model.

Differential flatness decouples the three position axes, so each axis is
the 2x2 system A = [[0, 1], [0, 0]], B = [0, 1]^T and the algebraic
Riccati equation has a closed-form positive-definite solution.
"""

from __future__ import annotations

from dataclasses import dataclass
import math

import numpy as np

__all__ = [
    "StateVec",
    "ModeWeights",
    "AxisGain",
    "LookAheadTrajectory",
    "solve_are_axis",
    "are_residual",
    "control",
    "rollout",
]


@dataclass(frozen=True)
class StateVec:
    """Flat-output state: 3D position and velocity."""

    p: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "p", np.asarray(self.p, dtype=float))
        object.__setattr__(self, "v", np.asarray(self.v, dtype=float))
        if not (np.all(np.isfinite(self.p)) and np.all(np.isfinite(self.v))):
            raise ValueError("state components must be finite")

    @staticmethod
    def rest(p) -> "StateVec":
        return StateVec(np.asarray(p, dtype=float), np.zeros(3))


@dataclass(frozen=True)
class ModeWeights:
    """Per-axis LQR weights: qp on position, qv on velocity, r on input."""

    qp: float
    qv: float
    r: float

    def __post_init__(self):
        if self.qp <= 0 or self.qv < 0 or self.r <= 0:
            raise ValueError("need qp > 0, qv >= 0, r > 0")


@dataclass(frozen=True)
class AxisGain:
    """Riccati solution entries and the resulting feedback gains for one axis."""

    s11: float
    s12: float
    s22: float
    kp: float
    kv: float


@dataclass
class LookAheadTrajectory:
    """One horizon of closed-loop samples: (state, input) every ts seconds."""

    start_time: float
    ts: float
    samples: list  # list[(StateVec, np.ndarray)]
    mode: str

    def positions(self) -> np.ndarray:
        return np.array([s.p for s, _ in self.samples])


def solve_are_axis(w: ModeWeights) -> AxisGain:
    """Closed-form stabilizing Riccati solution for one double-integrator axis.

    s12 = sqrt(qp * r), s22 = sqrt(r * (qv + 2 * s12)), s11 = s12 * s22 / r,
    gains kp = s12 / r, kv = s22 / r.
    """
    s12 = math.sqrt(w.qp * w.r)
    s22 = math.sqrt(w.r * (w.qv + 2.0 * s12))
    s11 = s12 * s22 / w.r
    return AxisGain(s11=s11, s12=s12, s22=s22, kp=s12 / w.r, kv=s22 / w.r)


def are_residual(g: AxisGain, w: ModeWeights) -> float:
    """Max-abs entry of S A + A^T S + Q - S B R^-1 B^T S for one axis."""
    A = np.array([[0.0, 1.0], [0.0, 0.0]])
    B = np.array([[0.0], [1.0]])
    Q = np.diag([w.qp, w.qv])
    S = np.array([[g.s11, g.s12], [g.s12, g.s22]])
    res = S @ A + A.T @ S + Q - S @ B @ B.T @ S / w.r
    return float(np.abs(res).max())


def control(x: StateVec, x_ref: StateVec, g: AxisGain) -> np.ndarray:
    """State-feedback acceleration command, identical gains on each axis."""
    return -g.kp * (x.p - x_ref.p) - g.kv * (x.v - x_ref.v)


def _deriv(p, v, x_ref: StateVec, g: AxisGain):
    u = -g.kp * (p - x_ref.p) - g.kv * (v - x_ref.v)
    return v, u


def rollout(
    x0: StateVec,
    x_ref: StateVec,
    g: AxisGain,
    tau: float,
    ts: float,
    start_time: float = 0.0,
    mode: str = "l0",
    u_max: float | None = None,
) -> LookAheadTrajectory:
    """Integrate the closed loop over one horizon, sampling every ts seconds.

    Uses fixed-substep RK4 with substep ts/10. The first sample equals x0
    exactly (no hover assumption). u_max optionally clamps each input axis.
    """
    if tau <= 0 or ts <= 0:
        raise ValueError("tau and ts must be positive")
    n_steps = round(tau / ts)
    if abs(n_steps * ts - tau) > 1e-9:
        raise ValueError("tau must be an integral multiple of ts")

    def clamp(u):
        if u_max is None:
            return u
        return np.clip(u, -u_max, u_max)

    samples = []
    p = x0.p.copy()
    v = x0.v.copy()
    h = ts / 10.0
    for _ in range(n_steps + 1):
        u = clamp(-g.kp * (p - x_ref.p) - g.kv * (v - x_ref.v))
        samples.append((StateVec(p.copy(), v.copy()), u))
        for _ in range(10):
            k1p, k1v = v, clamp(-g.kp * (p - x_ref.p) - g.kv * (v - x_ref.v))
            p2, v2 = p + 0.5 * h * k1p, v + 0.5 * h * k1v
            k2p, k2v = v2, clamp(-g.kp * (p2 - x_ref.p) - g.kv * (v2 - x_ref.v))
            p3, v3 = p + 0.5 * h * k2p, v + 0.5 * h * k2v
            k3p, k3v = v3, clamp(-g.kp * (p3 - x_ref.p) - g.kv * (v3 - x_ref.v))
            p4, v4 = p + h * k3p, v + h * k3v
            k4p, k4v = v4, clamp(-g.kp * (p4 - x_ref.p) - g.kv * (v4 - x_ref.v))
            p = p + (h / 6.0) * (k1p + 2 * k2p + 2 * k3p + k4p)
            v = v + (h / 6.0) * (k1v + 2 * k2v + 2 * k3v + k4v)
    return LookAheadTrajectory(start_time=start_time, ts=ts, samples=samples[: n_steps + 1], mode=mode)
