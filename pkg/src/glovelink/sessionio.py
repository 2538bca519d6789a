"""Persistence: newline-delimited JSON traces, dataset CSV, and the model
text format. Traces are diffable and replayable; every numeric field round
trips losslessly.
"""

from __future__ import annotations

import csv
import io
import json
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Union

import numpy as np

from .geometry import Pose, UnitQuat, Vec3
from .gesture import GestureMlp
from .handmodel import (GestureLabel, HandFrame, LabeledSample, N_FEATURES,
                        N_LANDMARKS)
from .teleop import TeleopEvent, TipCommand

__all__ = [
    "HandSample",
    "StabilizedGesture",
    "TipGoal",
    "SimState",
    "EventRecord",
    "TraceRecord",
    "TRACE_FORMAT",
    "TRACE_VERSION",
    "SchemaVersionError",
    "MalformedLineError",
    "write_trace",
    "read_trace",
    "replay",
    "write_dataset_csv",
    "read_dataset_csv",
    "write_model",
    "read_model",
]

TRACE_FORMAT = "glovelink-trace"
TRACE_VERSION = 1

MODEL_MAGIC = "glovelink-mlp v1"


class SchemaVersionError(ValueError):
    """Trace file declares an unsupported schema version."""


class MalformedLineError(ValueError):
    def __init__(self, line_no: int, reason: str):
        super().__init__(f"line {line_no}: {reason}")
        self.line_no = line_no


# --- trace records ---

def _pose_to_json(p: Pose) -> dict:
    return {"pos": list(p.position.as_tuple()), "quat": list(p.orientation.as_tuple())}


def _pose_from_json(d: dict) -> Pose:
    return Pose(Vec3(*d["pos"]), UnitQuat(*d["quat"]))


@dataclass(frozen=True)
class HandSample:
    t: float
    hand_pose: Pose
    landmarks: tuple[Pose, ...]
    finger_dist: float

    @staticmethod
    def from_frame(frame: HandFrame, finger_dist: float) -> "HandSample":
        return HandSample(frame.timestamp, frame.hand_pose, frame.landmarks, finger_dist)

    def to_frame(self) -> HandFrame:
        return HandFrame(self.t, self.hand_pose, self.landmarks)


@dataclass(frozen=True)
class StabilizedGesture:
    t: float
    label: GestureLabel


@dataclass(frozen=True)
class TipGoal:
    t: float
    pose: Pose
    jaw: float


@dataclass(frozen=True)
class SimState:
    t: float
    pose: Pose
    jaw: float
    at_goal: bool


@dataclass(frozen=True)
class EventRecord:
    t: float
    event: TeleopEvent


TraceRecord = Union[HandSample, StabilizedGesture, TipGoal, SimState, EventRecord]


def _record_to_json(r: TraceRecord) -> dict:
    if isinstance(r, HandSample):
        return {"type": "hand", "t": r.t, "pose": _pose_to_json(r.hand_pose),
                "landmarks": [_pose_to_json(p) for p in r.landmarks],
                "finger_dist": r.finger_dist}
    if isinstance(r, StabilizedGesture):
        return {"type": "gesture", "t": r.t, "label": int(r.label)}
    if isinstance(r, TipGoal):
        return {"type": "goal", "t": r.t, "pose": _pose_to_json(r.pose), "jaw": r.jaw}
    if isinstance(r, SimState):
        return {"type": "sim", "t": r.t, "pose": _pose_to_json(r.pose),
                "jaw": r.jaw, "at_goal": r.at_goal}
    if isinstance(r, EventRecord):
        return {"type": "event", "t": r.t, "event": r.event.value}
    raise TypeError(f"unknown record {type(r).__name__}")


def _record_from_json(d: dict) -> TraceRecord:
    kind = d.get("type")
    if kind == "hand":
        return HandSample(d["t"], _pose_from_json(d["pose"]),
                          tuple(_pose_from_json(p) for p in d["landmarks"]),
                          d["finger_dist"])
    if kind == "gesture":
        return StabilizedGesture(d["t"], GestureLabel(d["label"]))
    if kind == "goal":
        return TipGoal(d["t"], _pose_from_json(d["pose"]), d["jaw"])
    if kind == "sim":
        return SimState(d["t"], _pose_from_json(d["pose"]), d["jaw"], bool(d["at_goal"]))
    if kind == "event":
        return EventRecord(d["t"], TeleopEvent(d["event"]))
    raise ValueError(f"unknown record type {kind!r}")


def write_trace(path, records: Iterable[TraceRecord], config: dict | None = None) -> None:
    header = {"format": TRACE_FORMAT, "version": TRACE_VERSION,
              "config": config or {}}
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(json.dumps(header) + "\n")
        for r in records:
            f.write(json.dumps(_record_to_json(r)) + "\n")


def read_trace(path) -> tuple[list[TraceRecord], dict]:
    records: list[TraceRecord] = []
    with open(path, "r", encoding="utf-8") as f:
        try:
            header = json.loads(f.readline())
        except json.JSONDecodeError as e:
            raise MalformedLineError(1, str(e)) from e
        if header.get("format") != TRACE_FORMAT:
            raise MalformedLineError(1, f"not a {TRACE_FORMAT} file")
        if header.get("version") != TRACE_VERSION:
            raise SchemaVersionError(
                f"unsupported trace version {header.get('version')!r}")
        for line_no, line in enumerate(f, start=2):
            if not line.strip():
                continue
            try:
                records.append(_record_from_json(json.loads(line)))
            except (json.JSONDecodeError, KeyError, ValueError, TypeError) as e:
                raise MalformedLineError(line_no, str(e)) from e
    return records, header.get("config", {})


def replay(records: list[TraceRecord], sink: Callable[[TraceRecord], None],
           speed: float = 0.0) -> int:
    """Deliver records in timestamp order; speed 0 means as fast as possible.

    Returns the number of records delivered. With speed > 0, pacing follows
    the recorded timeline scaled by 1/speed against the wall clock.
    """
    ordered = sorted(records, key=lambda r: r.t)
    if speed > 0 and ordered:
        start_wall = time.perf_counter()
        start_t = ordered[0].t
        for r in ordered:
            due = start_wall + (r.t - start_t) / speed
            while True:
                remaining = due - time.perf_counter()
                if remaining <= 0:
                    break
                time.sleep(min(remaining, 0.01))
            sink(r)
    else:
        for r in ordered:
            sink(r)
    return len(ordered)


# --- dataset CSV ---

def write_dataset_csv(path, samples: list[LabeledSample]) -> None:
    """Feature columns f000..f146 followed by one-hot columns g0..g4."""
    header = [f"f{i:03d}" for i in range(N_FEATURES)] + [f"g{i}" for i in range(5)]
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(header)
        for s in samples:
            onehot = [0] * 5
            onehot[int(s.label)] = 1
            w.writerow([repr(float(v)) for v in s.features] + onehot)


def read_dataset_csv(path) -> list[LabeledSample]:
    samples: list[LabeledSample] = []
    with open(path, "r", encoding="utf-8") as f:
        r = csv.reader(f)
        header = next(r)
        if len(header) != N_FEATURES + 5:
            raise ValueError(f"expected {N_FEATURES + 5} columns, got {len(header)}")
        for row in r:
            feats = np.array([float(v) for v in row[:N_FEATURES]])
            onehot = [int(v) for v in row[N_FEATURES:]]
            samples.append(LabeledSample(feats, GestureLabel(onehot.index(1))))
    return samples


# --- model text format ---

def write_model(path, model: GestureMlp) -> None:
    """Versioned textual weight dump; round-trips exactly."""
    model._check_fitted()
    lines = [MODEL_MAGIC, " ".join(str(d) for d in model.dims_)]
    for W, b in zip(model.weights_, model.biases_):
        for row in W:
            lines.append(" ".join(repr(float(v)) for v in row))
        lines.append(" ".join(repr(float(v)) for v in b))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def read_model(path) -> GestureMlp:
    text = Path(path).read_text(encoding="utf-8").splitlines()
    if not text or text[0] != MODEL_MAGIC:
        raise ValueError("not a glovelink-mlp v1 model file")
    dims = [int(v) for v in text[1].split()]
    model = GestureMlp(hidden=tuple(dims[1:-1]), n_classes=dims[-1])
    model.n_features_in_ = dims[0]
    weights, biases = [], []
    line = 2
    for fan_in, fan_out in zip(dims[:-1], dims[1:]):
        W = np.array([[float(v) for v in text[line + i].split()]
                      for i in range(fan_out)])
        if W.shape != (fan_out, fan_in):
            raise ValueError(f"bad weight block at line {line + 1}")
        line += fan_out
        b = np.array([float(v) for v in text[line].split()])
        if b.shape != (fan_out,):
            raise ValueError(f"bad bias row at line {line + 1}")
        line += 1
        weights.append(W)
        biases.append(b)
    model.weights_ = weights
    model.biases_ = biases
    return model
