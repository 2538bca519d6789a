"""Simulated patient-side arm: a rate-limited, pose-goal-seeking tip.

The tip moves toward its active goal along the straight line (and along the
orientation geodesic) at bounded rates, stopping exactly on the goal. Goals
pass through a latency queue; when several goals have been released, only
the newest is pursued. Sampling discrete position goals through this
controller reproduces the stop-and-go staircase seen on real hardware.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .geometry import Pose, UnitQuat, Vec3
from .teleop import TipCommand

__all__ = ["SimConfig", "SimulatedPsm"]


@dataclass(frozen=True)
class SimConfig:
    v_max: float = 0.15  # m/s translational speed limit
    w_max: float = 2.0  # rad/s rotational speed limit
    jaw_rate: float = 4.0  # rad/s jaw speed limit
    tick_rate: float = 500.0  # Hz
    latency: float = 0.0  # injected goal-delivery latency, seconds

    def __post_init__(self):
        if min(self.v_max, self.w_max, self.jaw_rate, self.tick_rate) <= 0.0:
            raise ValueError("rates must be > 0")
        if self.latency < 0.0:
            raise ValueError("latency must be >= 0")


class SimulatedPsm:
    """Single-owner simulated arm state; submit goals and tick it forward."""

    def __init__(self, cfg: SimConfig = SimConfig(),
                 initial_tip: Pose = Pose.identity(), initial_jaw: float = 0.0,
                 start_time: float = 0.0):
        self.cfg = cfg
        self.tip = initial_tip
        self.jaw = initial_jaw
        self.goal: TipCommand | None = None
        self._pending: list[tuple[float, TipCommand]] = []  # (release time, cmd)
        self._now = start_time

    @property
    def now(self) -> float:
        return self._now

    @property
    def at_goal(self) -> bool:
        if self.goal is None:
            return True
        return (self.tip.position == self.goal.goal.position
                and self.tip.orientation == self.goal.goal.orientation)

    def submit_goal(self, cmd: TipCommand, now: float) -> None:
        self._pending.append((now + self.cfg.latency, cmd))

    def _release_goals(self) -> None:
        due = [(t, c) for t, c in self._pending if t <= self._now]
        if due:
            # newest released goal supersedes all older ones; _pending is in
            # submission order, so the last due entry wins release-time ties
            self.goal = max(enumerate(due), key=lambda ic: (ic[1][0], ic[0]))[1][1]
            self._pending = [(t, c) for t, c in self._pending if t > self._now]

    def tick(self, dt: float) -> None:
        if dt <= 0.0:
            raise ValueError("dt must be > 0")
        self._now += dt
        self._release_goals()
        if self.goal is None:
            return
        target = self.goal.goal

        dp = target.position - self.tip.position
        dist = dp.norm()
        step = self.cfg.v_max * dt
        if dist <= step or dist == 0.0:
            pos = target.position
        else:
            pos = self.tip.position + dp * (step / dist)

        ori = self.tip.orientation.slerp_towards(target.orientation,
                                                 self.cfg.w_max * dt)

        dj = self.goal.jaw - self.jaw
        max_dj = self.cfg.jaw_rate * dt
        if abs(dj) <= max_dj:
            self.jaw = self.goal.jaw
        else:
            self.jaw += max_dj if dj > 0 else -max_dj

        self.tip = Pose(pos, ori)
