import math

import numpy as np
import pytest

from glovelink.geometry import Pose, UnitQuat, Vec3
from glovelink.gesture import TrainConfig, train
from glovelink.handmodel import (GestureLabel, finger_distance, synth_dataset,
                                 synth_frame)
from glovelink.pipeline import ControlPipeline, run_trace
from glovelink.sessionio import (EventRecord, HandSample, SimState,
                                 StabilizedGesture, TipGoal)
from glovelink.simpsm import SimConfig
from glovelink.teleop import ControlConfig, TeleopEvent


def hand_records(duration=2.0, rate=120.0, amp=0.05):
    """Sinusoidal open-hand input trace."""
    base = synth_frame(GestureLabel.NONE, 0)
    fd = finger_distance(base)
    recs = []
    for i in range(int(duration * rate)):
        t = i / rate
        pos = Vec3(amp * math.sin(2 * math.pi * 0.5 * t), 0, 0)
        recs.append(HandSample(t, Pose(pos), base.landmarks, fd))
    return recs


class TestControlPipeline:
    def test_auto_track_first_sample(self):
        pipe = ControlPipeline(auto_track=True)
        base = synth_frame(GestureLabel.NONE, 0)
        g, cmd, _ = pipe.process(base, finger_dist=0.1)
        assert cmd is not None
        assert cmd.goal.position == Vec3()  # aligned at first sample

    def test_override_gesture_without_model(self):
        pipe = ControlPipeline(auto_track=True)
        base = synth_frame(GestureLabel.NONE, 0)
        pipe.override_gesture = GestureLabel.FIST
        g, _, events = pipe.process(base, finger_dist=0.1)
        assert g == GestureLabel.FIST
        assert TeleopEvent.CLUTCH_ENGAGED in events

    def test_model_drives_classification(self):
        model = train(synth_dataset({g: 60 for g in GestureLabel}, seed=1),
                      TrainConfig(max_epochs=40))
        pipe = ControlPipeline(model=model, auto_track=True)
        for i in range(7):
            frame = synth_frame(GestureLabel.FIST, i, timestamp=i / 120)
            g, _, _ = pipe.process(frame, finger_dist=0.01)
        assert g == GestureLabel.FIST

    def test_advance_to_tick_grid(self):
        pipe = ControlPipeline()
        states = pipe.advance_to(0.01)
        assert len(states) == 5  # 500 Hz ticks in 10 ms
        assert states[-1].t == pytest.approx(0.01, abs=1e-9)


class TestRunTrace:
    def test_empty(self):
        assert run_trace([]) == []

    def test_deterministic(self):
        recs = hand_records()
        a = run_trace(recs)
        b = run_trace(recs)
        assert a == b

    def test_output_contains_all_record_kinds(self):
        recs = hand_records()
        out = run_trace(recs)
        kinds = {type(r) for r in out}
        assert {HandSample, StabilizedGesture, TipGoal, SimState} <= kinds

    def test_timestamps_sorted(self):
        out = run_trace(hand_records())
        ts = [r.t for r in out]
        assert ts == sorted(ts)

    def test_gesture_records_drive_controller(self):
        recs = hand_records(duration=1.0)
        recs.append(StabilizedGesture(0.5, GestureLabel.FIST))
        out = run_trace(recs)
        engaged = [r for r in out if isinstance(r, EventRecord)
                   and r.event == TeleopEvent.CLUTCH_ENGAGED]
        assert len(engaged) == 1
        assert engaged[0].t >= 0.5

    def test_settle_covers_latency(self):
        recs = hand_records(duration=1.0)
        out = run_trace(recs, sim_cfg=SimConfig(latency=0.3))
        sims = [r for r in out if isinstance(r, SimState)]
        assert sims[-1].t >= recs[-1].t + 0.3
        assert sims[-1].at_goal
