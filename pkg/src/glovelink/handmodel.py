"""Hand representation, featurization, and the synthetic gesture generator.

A hand frame carries 21 landmark poses expressed relative to the wrist
(wrist = 0; thumb 1-4; index 5-8; middle 9-12; ring 13-16; pinky 17-20)
plus the global hand pose. The generator replaces a physical sensor glove:
each gesture has a hand-authored landmark template that is perturbed by
per-bone angular jitter and positional noise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import IntEnum

import numpy as np

from .geometry import Pose, UnitQuat, Vec3

__all__ = [
    "GestureLabel",
    "HandFrame",
    "LabeledSample",
    "SynthParams",
    "N_LANDMARKS",
    "N_FEATURES",
    "THUMB_TIP",
    "INDEX_TIP",
    "OPEN_PINCH_MIN",
    "feature_vector",
    "finger_distance",
    "synth_frame",
    "synth_dataset",
    "gesture_predicate",
    "DEFAULT_TRAIN_COUNTS",
    "DEFAULT_TEST_COUNTS",
]

N_LANDMARKS = 21
N_FEATURES = 7 * N_LANDMARKS

# landmark indices of the fingertips
THUMB_TIP = 4
INDEX_TIP = 8
MIDDLE_TIP = 12
RING_TIP = 16
PINKY_TIP = 20

# the open-hand template keeps thumb and index at least this far apart
OPEN_PINCH_MIN = 0.07

# interior reference point used by the curled-finger predicates
_PALM_CENTER = Vec3(0.0, 0.06, -0.01)
_CURL_RADIUS = 0.06  # fingertip-to-palm bound for curled fingers
_TOUCH_RADIUS = 0.02  # tip-to-tip bound for contact gestures


class GestureLabel(IntEnum):
    NONE = 0
    PINKY = 1
    RING = 2
    FIST = 3
    THUMBS_UP = 4


# per-class counts of the reference dataset, scaled to desk size (÷10)
DEFAULT_TRAIN_COUNTS = {
    GestureLabel.NONE: 2074,
    GestureLabel.PINKY: 1283,
    GestureLabel.RING: 2501,
    GestureLabel.FIST: 1674,
    GestureLabel.THUMBS_UP: 1945,
}
DEFAULT_TEST_COUNTS = {
    GestureLabel.NONE: 417,
    GestureLabel.PINKY: 249,
    GestureLabel.RING: 508,
    GestureLabel.FIST: 344,
    GestureLabel.THUMBS_UP: 378,
}


@dataclass(frozen=True)
class HandFrame:
    timestamp: float
    hand_pose: Pose
    landmarks: tuple[Pose, ...]

    def __post_init__(self):
        if len(self.landmarks) != N_LANDMARKS:
            raise ValueError(f"expected {N_LANDMARKS} landmarks, got {len(self.landmarks)}")


@dataclass(frozen=True)
class LabeledSample:
    features: np.ndarray
    label: GestureLabel


@dataclass(frozen=True)
class SynthParams:
    angle_sigma_deg: float = 4.0  # per-bone angular jitter, glove-accuracy order
    pos_sigma: float = 0.002  # per-landmark positional noise, meters


def feature_vector(h: HandFrame) -> np.ndarray:
    """Flatten the 21 wrist-relative landmark poses into 147 features.

    Landmark k occupies slice [7k, 7k+7) as (px, py, pz, qw, qx, qy, qz).
    The global hand pose is deliberately excluded.
    """
    out = np.empty(N_FEATURES, dtype=np.float64)
    for k, lm in enumerate(h.landmarks):
        out[7 * k : 7 * k + 3] = lm.position.as_tuple()
        out[7 * k + 3 : 7 * k + 7] = lm.orientation.as_tuple()
    return out


def finger_distance(h: HandFrame) -> float:
    """Euclidean distance between thumb tip and index tip, meters."""
    return (h.landmarks[THUMB_TIP].position - h.landmarks[INDEX_TIP].position).norm()


# ---------------------------------------------------------------------------
# synthetic templates
#
# Each finger is a chain: a fixed knuckle point plus three bone vectors.
# Finger bones point along +y when extended and curl towards -z (palm).
# The thumb root sits at (0.025, 0.025, 0) with a 0.09 m reach.
# ---------------------------------------------------------------------------

_THUMB_ROOT = Vec3(0.025, 0.025, 0.0)
_KNUCKLES = {
    "index": Vec3(0.028, 0.095, 0.0),
    "middle": Vec3(0.009, 0.100, 0.0),
    "ring": Vec3(-0.009, 0.095, 0.0),
    "pinky": Vec3(-0.027, 0.085, 0.0),
}
_BONE_LENGTHS = {
    "thumb": (0.035, 0.030, 0.025),
    "index": (0.040, 0.025, 0.022),
    "middle": (0.044, 0.028, 0.023),
    "ring": (0.040, 0.026, 0.022),
    "pinky": (0.032, 0.020, 0.019),
}
_FINGER_ORDER = ("thumb", "index", "middle", "ring", "pinky")
_TIP_INDEX = {"thumb": THUMB_TIP, "index": INDEX_TIP, "middle": MIDDLE_TIP,
              "ring": RING_TIP, "pinky": PINKY_TIP}


def _curl_dirs(flex_deg: tuple[float, float, float]) -> list[Vec3]:
    """Bone directions for cumulative flexion angles (degrees) about the knuckle axis."""
    dirs = []
    for phi in flex_deg:
        a = math.radians(phi)
        dirs.append(Vec3(0.0, math.cos(a), -math.sin(a)))
    return dirs


def _chain_points(root: Vec3, lengths, dirs) -> list[Vec3]:
    pts = [root]
    for ln, d in zip(lengths, dirs):
        pts.append(pts[-1] + d * ln)
    return pts


def _thumb_to(target: Vec3) -> list[Vec3]:
    """Thumb chain reaching the target point exactly, with a slight bow."""
    v = target - _THUMB_ROOT
    lens = _BONE_LENGTHS["thumb"]
    total = sum(lens)
    # perpendicular bow direction, away from the palm
    try:
        bow = v.cross(Vec3(0.0, 0.0, 1.0)).normalized()
    except ValueError:
        bow = Vec3(1.0, 0.0, 0.0)
    pts = [_THUMB_ROOT]
    acc = 0.0
    for ln in lens[:-1]:
        acc += ln
        f = acc / total
        pts.append(_THUMB_ROOT + v * f + bow * (0.008 * math.sin(math.pi * f)))
    pts.append(target)
    return pts


_EXTENDED = (8.0, 14.0, 20.0)
_CURLED = (70.0, 160.0, 230.0)
_HALF_CURLED = (50.0, 110.0, 160.0)

_THUMB_OPEN_DIR = Vec3(0.85, 0.53, 0.0).normalized()
_THUMB_UP_DIR = Vec3(0.97, 0.24, 0.0).normalized()


def _straight_thumb(direction: Vec3) -> list[Vec3]:
    return _chain_points(_THUMB_ROOT, _BONE_LENGTHS["thumb"], [direction] * 3)


def _template_points(g: GestureLabel) -> dict[str, list[Vec3]]:
    """Chain points (root + 3 joints) per finger for the gesture template."""
    fingers: dict[str, list[Vec3]] = {}
    if g == GestureLabel.NONE:
        for name in ("index", "middle", "ring", "pinky"):
            fingers[name] = _chain_points(_KNUCKLES[name], _BONE_LENGTHS[name],
                                          _curl_dirs(_EXTENDED))
        fingers["thumb"] = _straight_thumb(_THUMB_OPEN_DIR)
    elif g == GestureLabel.PINKY:
        for name in ("index", "middle", "ring"):
            fingers[name] = _chain_points(_KNUCKLES[name], _BONE_LENGTHS[name],
                                          _curl_dirs(_EXTENDED))
        fingers["pinky"] = _chain_points(_KNUCKLES["pinky"], _BONE_LENGTHS["pinky"],
                                         _curl_dirs(_HALF_CURLED))
        fingers["thumb"] = _thumb_to(fingers["pinky"][-1] + Vec3(0.0, 0.0, -0.003))
    elif g == GestureLabel.RING:
        for name in ("index", "middle", "pinky"):
            fingers[name] = _chain_points(_KNUCKLES[name], _BONE_LENGTHS[name],
                                          _curl_dirs(_EXTENDED))
        fingers["ring"] = _chain_points(_KNUCKLES["ring"], _BONE_LENGTHS["ring"],
                                        _curl_dirs(_HALF_CURLED))
        fingers["thumb"] = _thumb_to(fingers["ring"][-1] + Vec3(0.0, 0.0, -0.003))
    elif g == GestureLabel.FIST:
        for name in ("index", "middle", "ring", "pinky"):
            fingers[name] = _chain_points(_KNUCKLES[name], _BONE_LENGTHS[name],
                                          _curl_dirs(_CURLED))
        fingers["thumb"] = _thumb_to(fingers["index"][-1] + Vec3(0.0, -0.003, -0.004))
    elif g == GestureLabel.THUMBS_UP:
        for name in ("index", "middle", "ring", "pinky"):
            fingers[name] = _chain_points(_KNUCKLES[name], _BONE_LENGTHS[name],
                                          _curl_dirs(_CURLED))
        fingers["thumb"] = _straight_thumb(_THUMB_UP_DIR)
    else:
        raise ValueError(f"unknown gesture {g!r}")
    return fingers


def _jitter_dir(d: Vec3, rng: np.random.Generator, sigma_rad: float) -> Vec3:
    axis = rng.standard_normal(3)
    n = float(np.linalg.norm(axis))
    if n < 1e-12:
        return d
    ang = float(rng.normal(0.0, sigma_rad))
    q = UnitQuat.from_axis_angle(Vec3(*(axis / n)), ang)
    return q.rotate(d)


def _as_rng(rng_or_seed) -> np.random.Generator:
    if isinstance(rng_or_seed, np.random.Generator):
        return rng_or_seed
    return np.random.default_rng(rng_or_seed)


def synth_frame(g: GestureLabel, rng_seed=0, params: SynthParams = SynthParams(),
                timestamp: float = 0.0, hand_pose: Pose = Pose.identity()) -> HandFrame:
    """Generate one synthetic hand frame for a gesture.

    Deterministic for a fixed (g, seed, params). Per-bone directions get
    angular jitter in their local frames; every landmark then gets isotropic
    positional noise. Landmark orientations align +y with the outgoing bone.
    """
    rng = _as_rng(rng_seed)
    sigma = math.radians(params.angle_sigma_deg)
    template = _template_points(g)

    positions: dict[int, Vec3] = {0: Vec3()}
    bone_dirs: dict[int, Vec3] = {}
    base = 1
    for name in _FINGER_ORDER:
        pts = template[name]
        # rebuild the chain from jittered bone vectors
        cur = pts[0]
        jittered = [cur]
        for a, b in zip(pts[:-1], pts[1:]):
            bone = b - a
            ln = bone.norm()
            d = _jitter_dir(bone * (1.0 / ln), rng, sigma)
            cur = cur + d * ln
            jittered.append(cur)
        for j, p in enumerate(jittered):
            idx = base + j
            noise = rng.normal(0.0, params.pos_sigma, 3)
            positions[idx] = p + Vec3(*noise)
        # outgoing bone per landmark; tip reuses its incoming bone
        for j in range(4):
            bone = jittered[j + 1] - jittered[j] if j < 3 else jittered[3] - jittered[2]
            bone_dirs[base + j] = bone if bone.norm() > 1e-9 else Vec3(0.0, 1.0, 0.0)
        base += 4

    landmarks = [Pose.identity()]
    for idx in range(1, N_LANDMARKS):
        q = UnitQuat.rotation_between(Vec3(0.0, 1.0, 0.0), bone_dirs[idx])
        landmarks.append(Pose(positions[idx], q))
    return HandFrame(timestamp=timestamp, hand_pose=hand_pose, landmarks=tuple(landmarks))


def gesture_predicate(g: GestureLabel, h: HandFrame) -> bool:
    """Defining geometric predicate of each gesture class."""
    tips = {name: h.landmarks[_TIP_INDEX[name]].position for name in _FINGER_ORDER}
    curled = {name: (tips[name] - _PALM_CENTER).norm() < _CURL_RADIUS
              for name in ("index", "middle", "ring", "pinky")}
    pinch = finger_distance(h)
    if g == GestureLabel.NONE:
        return pinch >= OPEN_PINCH_MIN and not any(curled.values())
    if g == GestureLabel.PINKY:
        return (tips["thumb"] - tips["pinky"]).norm() < _TOUCH_RADIUS
    if g == GestureLabel.RING:
        return (tips["thumb"] - tips["ring"]).norm() < _TOUCH_RADIUS
    if g == GestureLabel.FIST:
        return pinch < 0.035 and all(curled.values())
    if g == GestureLabel.THUMBS_UP:
        return all(curled.values()) and pinch > 0.05 and tips["thumb"].x > 0.06
    raise ValueError(f"unknown gesture {g!r}")


def synth_dataset(counts: dict[GestureLabel, int] | None = None,
                  seed: int = 0,
                  params: SynthParams = SynthParams()) -> list[LabeledSample]:
    """Generate a labeled dataset with exactly the requested per-class counts.

    Samples are shuffled deterministically by the seed.
    """
    if counts is None:
        counts = DEFAULT_TRAIN_COUNTS
    rng = np.random.default_rng(seed)
    samples: list[LabeledSample] = []
    for label in GestureLabel:
        n = int(counts.get(label, 0))
        if n < 0:
            raise ValueError("counts must be >= 0")
        for _ in range(n):
            frame = synth_frame(label, rng, params)
            samples.append(LabeledSample(feature_vector(frame), label))
    order = rng.permutation(len(samples))
    return [samples[i] for i in order]
