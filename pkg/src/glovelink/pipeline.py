"""The control pipeline shared by the live gateway and batch replay:
classify -> stabilize -> teleop step -> simulated arm.

`ControlPipeline.process` handles one hand sample; `run_trace` replays a
recorded input trace through the full stack deterministically.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .geometry import Pose
from .gesture import GestureMlp, PredictionWindow
from .handmodel import GestureLabel, HandFrame, feature_vector, finger_distance
from .sessionio import (EventRecord, HandSample, SimState, StabilizedGesture,
                        TipGoal, TraceRecord)
from .simpsm import SimConfig, SimulatedPsm
from .teleop import ControlConfig, TeleopController, TeleopEvent, TipCommand

__all__ = ["ControlPipeline", "run_trace"]


class ControlPipeline:
    """Single-owner stack: one controller, one simulated arm, one stabilizer.

    When a classifier model is attached, each hand sample is classified and
    pushed through the sliding window; otherwise the externally supplied
    gesture label (e.g. an operator override) is used directly.
    """

    def __init__(self, control_cfg: ControlConfig = ControlConfig(),
                 sim_cfg: SimConfig = SimConfig(),
                 model: GestureMlp | None = None,
                 initial_tip: Pose = Pose.identity(),
                 start_time: float = 0.0,
                 auto_track: bool = False):
        self.control_cfg = control_cfg
        self.sim_cfg = sim_cfg
        self.model = model
        self.controller = TeleopController(control_cfg, initial_tip)
        self.sim = SimulatedPsm(sim_cfg, initial_tip, start_time=start_time)
        self.window = PredictionWindow()
        self.override_gesture = GestureLabel.NONE
        self._auto_track = auto_track
        self._started = False

    @property
    def now(self) -> float:
        return self.sim.now

    def advance_to(self, t: float) -> list[SimState]:
        """Tick the simulated arm up to time t, returning state snapshots."""
        dt = 1.0 / self.sim_cfg.tick_rate
        states = []
        while self.sim.now + dt <= t + 1e-12:
            self.sim.tick(dt)
            states.append(SimState(self.sim.now, self.sim.tip, self.sim.jaw,
                                   self.sim.at_goal))
        return states

    def classify(self, frame: HandFrame) -> GestureLabel:
        if self.model is None:
            return self.override_gesture
        probs = self.model.predict_proba(feature_vector(frame))[0]
        return self.window.push(probs)

    def process(self, frame: HandFrame, finger_dist: float | None = None
                ) -> tuple[GestureLabel, TipCommand | None, list[TeleopEvent]]:
        """Classify one hand sample, step the controller, submit the goal."""
        if self._auto_track and not self._started:
            self.controller.tracking = True
            self.controller.glove_ref = frame.hand_pose
            self._started = True
        gesture = self.classify(frame)
        cmd, events = self.controller.step(frame, gesture, frame.timestamp,
                                           finger_dist=finger_dist)
        if cmd is not None:
            self.sim.submit_goal(cmd, frame.timestamp)
        return gesture, cmd, events

    def state_snapshot(self) -> SimState:
        return SimState(self.sim.now, self.sim.tip, self.sim.jaw, self.sim.at_goal)


def run_trace(records: list[TraceRecord],
              control_cfg: ControlConfig = ControlConfig(),
              sim_cfg: SimConfig = SimConfig(),
              model: GestureMlp | None = None,
              initial_tip: Pose = Pose.identity(),
              auto_track: bool = True,
              settle_time: float = 0.5) -> list[TraceRecord]:
    """Batch replay of an input trace through the full stack.

    Input HandSample records drive the pipeline; StabilizedGesture records
    (when no model is attached) set the gesture label. The output trace
    contains the input records plus emitted goals, events, and simulated
    arm states on the tick grid. Deterministic for fixed inputs and config.
    """
    hands = sorted((r for r in records if isinstance(r, HandSample)), key=lambda r: r.t)
    gestures = sorted((r for r in records if isinstance(r, StabilizedGesture)),
                      key=lambda r: r.t)
    if not hands:
        return []
    pipe = ControlPipeline(control_cfg, sim_cfg, model=model,
                           initial_tip=initial_tip, start_time=hands[0].t,
                           auto_track=auto_track)
    out: list[TraceRecord] = []
    gi = 0
    for hs in hands:
        out.extend(pipe.advance_to(hs.t))
        while gi < len(gestures) and gestures[gi].t <= hs.t:
            pipe.override_gesture = gestures[gi].label
            gi += 1
        frame = hs.to_frame()
        gesture, cmd, events = pipe.process(frame, finger_dist=hs.finger_dist)
        out.append(hs)
        out.append(StabilizedGesture(hs.t, gesture))
        for ev in events:
            out.append(EventRecord(hs.t, ev))
        if cmd is not None:
            out.append(TipGoal(hs.t, cmd.goal, cmd.jaw))
    out.extend(pipe.advance_to(hands[-1].t + sim_cfg.latency + settle_time))
    return sorted(out, key=lambda r: r.t)
