"""Wire protocol v1: JSON text frames exchanged between gateway and clients.

Every frame carries "type" and "v". Serialization is canonical (sorted keys,
compact separators) so parse∘serialize is the identity on canonical frames.
"""

from __future__ import annotations

import json

__all__ = [
    "PROTOCOL_VERSION",
    "MESSAGE_TYPES",
    "ProtocolError",
    "parse",
    "serialize",
    "hello",
    "hand_input",
    "gesture_override",
    "robot_state",
    "event_msg",
    "set_config",
    "ack",
    "error_msg",
]

PROTOCOL_VERSION = 1

MESSAGE_TYPES = frozenset({
    "hello", "hand_input", "gesture_override", "robot_state",
    "event", "set_config", "ack", "error",
})

_REQUIRED: dict[str, tuple[str, ...]] = {
    "hello": (),
    "hand_input": ("t", "pos", "quat", "finger_dist"),
    "gesture_override": ("label",),
    "robot_state": ("t", "pos", "quat", "jaw", "clutch", "tracking",
                    "haptic", "at_goal"),
    "event": ("t", "name"),
    "set_config": (),
    "ack": (),
    "error": ("code",),
}

_CONFIG_KEYS = frozenset({"eta", "L_h", "L_t", "latency"})


class ProtocolError(ValueError):
    def __init__(self, code: str, message: str):
        super().__init__(f"{code}: {message}")
        self.code = code
        self.message = message


def parse(text: str) -> dict:
    try:
        msg = json.loads(text)
    except json.JSONDecodeError as e:
        raise ProtocolError("bad_json", str(e)) from e
    if not isinstance(msg, dict):
        raise ProtocolError("bad_frame", "frame must be a JSON object")
    if msg.get("v") != PROTOCOL_VERSION:
        raise ProtocolError("bad_version", f"unsupported version {msg.get('v')!r}")
    mtype = msg.get("type")
    if mtype not in MESSAGE_TYPES:
        raise ProtocolError("unknown_type", f"unknown message type {mtype!r}")
    for key in _REQUIRED[mtype]:
        if key not in msg:
            raise ProtocolError("missing_field", f"{mtype} requires {key!r}")
    if mtype == "hand_input":
        if len(msg["pos"]) != 3 or len(msg["quat"]) != 4:
            raise ProtocolError("bad_field", "pos must be [3], quat must be [4] wxyz")
        if "landmarks" in msg and len(msg["landmarks"]) != 21:
            raise ProtocolError("bad_field", "landmarks must have 21 entries")
    if mtype == "set_config":
        unknown = set(msg) - {"type", "v"} - _CONFIG_KEYS
        if unknown:
            raise ProtocolError("bad_field", f"unknown config keys {sorted(unknown)}")
    return msg


def serialize(msg: dict) -> str:
    return json.dumps(msg, sort_keys=True, separators=(",", ":"))


def _base(mtype: str, **fields) -> dict:
    return {"type": mtype, "v": PROTOCOL_VERSION, **fields}


def hello(role: str = "operator") -> dict:
    return _base("hello", role=role)


def hand_input(t: float, pos, quat, finger_dist: float, landmarks=None) -> dict:
    msg = _base("hand_input", t=t, pos=list(pos), quat=list(quat),
                finger_dist=finger_dist)
    if landmarks is not None:
        msg["landmarks"] = [list(lm) for lm in landmarks]
    return msg


def gesture_override(label: int, t: float | None = None) -> dict:
    msg = _base("gesture_override", label=int(label))
    if t is not None:
        msg["t"] = t
    return msg


def robot_state(t, pos, quat, jaw, clutch, tracking, haptic, at_goal) -> dict:
    return _base("robot_state", t=t, pos=list(pos), quat=list(quat), jaw=jaw,
                 clutch=bool(clutch), tracking=bool(tracking),
                 haptic=bool(haptic), at_goal=bool(at_goal))


def event_msg(t: float, name: str) -> dict:
    return _base("event", t=t, name=name)


def set_config(**kwargs) -> dict:
    unknown = set(kwargs) - _CONFIG_KEYS
    if unknown:
        raise ValueError(f"unknown config keys {sorted(unknown)}")
    return _base("set_config", **kwargs)


def ack(**fields) -> dict:
    return _base("ack", **fields)


def error_msg(code: str, message: str = "") -> dict:
    return _base("error", code=code, message=message)
