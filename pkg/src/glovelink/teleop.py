"""Gesture-driven teleoperation control: workspace clamping, motion scaling,
jaw mapping, and the full-pose clutch state machine.

Hand displacements are measured from the glove reference pose captured at
each alignment event (tracking-on or clutch release), clamped to the hand
cube, scaled by eta = L_t / L_h, and applied relative to the frozen tip
reference. Orientation is mapped 1:1 and clutches together with translation.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace

from .geometry import Pose, UnitQuat, Vec3
from .handmodel import GestureLabel, HandFrame, finger_distance

__all__ = [
    "ControlConfig",
    "ClutchPhase",
    "TeleopEvent",
    "TipCommand",
    "TeleopController",
    "NonMonotoneTimeError",
    "clamp_to_cube",
    "scale",
    "unscale",
    "map_jaw",
]


class NonMonotoneTimeError(ValueError):
    """step() was called with a timestamp earlier than the previous one."""


@dataclass(frozen=True)
class ControlConfig:
    hand_cube: float = 0.40  # L_h, side of the glove workspace cube (m)
    tip_cube: float = 0.08  # L_t, side of the instrument-tip cube (m)
    ring_hold: float = 2.0  # seconds of Ring before tracking toggles
    pinky_debounce: float = 0.1  # seconds of Pinky before energy fires
    finger_open: float = 0.08  # thumb-index distance mapping to jaw_max (m)
    finger_closed: float = 0.0  # distance mapping to jaw_min (m)
    jaw_min: float = -0.35  # fully closed jaw angle (rad, negative)
    jaw_max: float = 1.0  # fully open jaw angle (rad)

    def __post_init__(self):
        if not (self.hand_cube > self.tip_cube > 0.0):
            raise ValueError("need hand_cube > tip_cube > 0")
        if not (self.jaw_min < 0.0 < self.jaw_max):
            raise ValueError("need jaw_min < 0 < jaw_max")
        if not self.finger_open > self.finger_closed:
            raise ValueError("need finger_open > finger_closed")

    @property
    def eta(self) -> float:
        """Scaling factor: tip displacement per hand displacement."""
        return self.tip_cube / self.hand_cube


class ClutchPhase(enum.Enum):
    DISENGAGED = "disengaged"
    ENGAGED = "engaged"


class TeleopEvent(enum.Enum):
    HAPTIC_ON = "haptic_on"
    HAPTIC_OFF = "haptic_off"
    TRACKING_ON = "tracking_on"
    TRACKING_OFF = "tracking_off"
    ENERGY_ON = "energy_on"
    ENERGY_OFF = "energy_off"
    CLUTCH_ENGAGED = "clutch_engaged"
    CLUTCH_RELEASED = "clutch_released"


@dataclass(frozen=True)
class TipCommand:
    goal: Pose
    jaw: float


def clamp_to_cube(d: Vec3, side: float) -> Vec3:
    """Clamp each component to the axis-aligned cube [-side/2, side/2]^3."""
    if side <= 0.0:
        raise ValueError("cube side must be > 0")
    h = side / 2.0
    return Vec3(
        min(max(d.x, -h), h),
        min(max(d.y, -h), h),
        min(max(d.z, -h), h),
    )


def scale(dp_hand: Vec3, cfg: ControlConfig) -> Vec3:
    """Hand-to-tip displacement scaling, after hand-cube clamping."""
    return clamp_to_cube(dp_hand, cfg.hand_cube) * cfg.eta


def unscale(dp_tip: Vec3, cfg: ControlConfig) -> Vec3:
    """Inverse of the scaling: tip displacement back to hand scale."""
    return dp_tip * (1.0 / cfg.eta)


def map_jaw(distance: float, cfg: ControlConfig) -> float:
    """Affine map from thumb-index distance to jaw angle, saturated."""
    span = cfg.finger_open - cfg.finger_closed
    t = (distance - cfg.finger_closed) / span
    t = min(max(t, 0.0), 1.0)
    return cfg.jaw_min + t * (cfg.jaw_max - cfg.jaw_min)


class TeleopController:
    """Single-owner control state machine, stepped at the hand input rate.

    Gesture semantics (stabilized labels expected):
      * Fist engages the clutch; leaving Fist releases it and re-aligns the
        glove reference, so the first post-release goal equals the frozen
        tip pose exactly.
      * Ring held for `ring_hold` toggles tracking once per continuous hold
        (the hold timer pauses while clutched; Fist outranks Ring).
      * Pinky held for `pinky_debounce` turns the energy channel on; leaving
        Pinky turns it off.
    """

    def __init__(self, cfg: ControlConfig = ControlConfig(),
                 initial_tip: Pose = Pose.identity()):
        self.cfg = cfg
        self.tracking = False
        self.clutch = ClutchPhase.DISENGAGED
        self.haptic_on = False
        self.energy_on = False
        self.glove_ref: Pose | None = None
        self.tip_ref = initial_tip  # frozen tip configuration at alignment
        self.tip_center = initial_tip.position  # tip cube stays centered here
        self.last_gesture = GestureLabel.NONE
        self.last_command: TipCommand | None = None
        self._ring_since: float | None = None
        self._ring_armed = True
        self._pinky_since: float | None = None
        self._last_time: float | None = None

    # -- internal helpers --

    def _commanded_tip(self) -> Pose:
        return self.last_command.goal if self.last_command else self.tip_ref

    def _goal_from(self, h: HandFrame) -> Pose:
        dp = h.hand_pose.position - self.glove_ref.position
        dp_tip = scale(dp, self.cfg)
        pos = self.tip_ref.position + dp_tip
        # safety: never command outside the tip cube around the start pose;
        # leave in-cube goals untouched so alignment stays bitwise exact
        delta = pos - self.tip_center
        clamped = clamp_to_cube(delta, self.cfg.tip_cube)
        if clamped != delta:
            pos = self.tip_center + clamped
        if h.hand_pose.orientation == self.glove_ref.orientation:
            ori = self.tip_ref.orientation  # q^-1 q would drift by one ulp
        else:
            rel = self.glove_ref.orientation.conjugate() * h.hand_pose.orientation
            ori = self.tip_ref.orientation * rel
        return Pose(pos, ori)

    def step(self, h: HandFrame, gesture: GestureLabel, now: float,
             finger_dist: float | None = None
             ) -> tuple[TipCommand | None, list[TeleopEvent]]:
        if self._last_time is not None and now < self._last_time:
            raise NonMonotoneTimeError(f"time went backwards: {now} < {self._last_time}")
        self._last_time = now
        cfg = self.cfg
        events: list[TeleopEvent] = []
        prev = self.last_gesture
        clutched = self.clutch == ClutchPhase.ENGAGED

        # clutch edges (Fist outranks the other commands)
        if gesture == GestureLabel.FIST and not clutched:
            self.clutch = ClutchPhase.ENGAGED
            self.tip_ref = self._commanded_tip()
            self.haptic_on = True
            events += [TeleopEvent.CLUTCH_ENGAGED, TeleopEvent.HAPTIC_ON]
            clutched = True
        elif gesture != GestureLabel.FIST and clutched:
            self.clutch = ClutchPhase.DISENGAGED
            self.haptic_on = False
            self.glove_ref = h.hand_pose
            events += [TeleopEvent.CLUTCH_RELEASED, TeleopEvent.HAPTIC_OFF]
            clutched = False

        # tracking toggle on a sustained Ring hold
        if gesture == GestureLabel.RING and not clutched:
            if self._ring_since is None:
                self._ring_since = now
            if self._ring_armed and now - self._ring_since >= cfg.ring_hold:
                self._ring_armed = False
                self.tracking = not self.tracking
                if self.tracking:
                    self.glove_ref = h.hand_pose
                    self.tip_ref = self._commanded_tip()
                    events.append(TeleopEvent.TRACKING_ON)
                else:
                    events.append(TeleopEvent.TRACKING_OFF)
        elif gesture == GestureLabel.RING and clutched:
            # hold timer pauses under an active clutch
            self._ring_since = now
        else:
            self._ring_since = None
            self._ring_armed = True

        # energy channel on a debounced Pinky hold
        if gesture == GestureLabel.PINKY:
            if self._pinky_since is None:
                self._pinky_since = now
            if not self.energy_on and now - self._pinky_since >= cfg.pinky_debounce:
                self.energy_on = True
                events.append(TeleopEvent.ENERGY_ON)
        else:
            self._pinky_since = None
            if self.energy_on:
                self.energy_on = False
                events.append(TeleopEvent.ENERGY_OFF)

        self.last_gesture = gesture

        command: TipCommand | None = None
        if self.tracking:
            if finger_dist is None:
                finger_dist = finger_distance(h)
            jaw = map_jaw(finger_dist, cfg)
            if clutched:
                # pose frozen at g_rt0; the jaw may still move
                command = TipCommand(self.tip_ref, jaw)
            else:
                if self.glove_ref is None:
                    self.glove_ref = h.hand_pose
                command = TipCommand(self._goal_from(h), jaw)
            self.last_command = command
        return command, events
