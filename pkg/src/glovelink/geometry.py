"""Rigid-body math: 3-vectors, unit quaternions, poses, and rotation distance.

All positions are in meters, all angles in radians. Quaternions are stored
(w, x, y, z) and canonicalized to w >= 0 on construction, so q and -q map to
the same object value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

__all__ = [
    "Vec3",
    "UnitQuat",
    "Pose",
    "FrameTag",
    "compose",
    "inverse",
    "rotation_distance",
]

_NORM_TOL = 1e-9


class FrameTag(Enum):
    """Coordinate frames of the teleoperation chain."""

    S = "S"  # tracker base
    H = "H"  # tracker (hand)
    R = "R"  # arm base
    T = "T"  # instrument tip


@dataclass(frozen=True)
class Vec3:
    x: float = 0.0
    y: float = 0.0
    z: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y) and math.isfinite(self.z)):
            raise ValueError("Vec3 components must be finite")

    def __add__(self, other: "Vec3") -> "Vec3":
        return Vec3(self.x + other.x, self.y + other.y, self.z + other.z)

    def __sub__(self, other: "Vec3") -> "Vec3":
        return Vec3(self.x - other.x, self.y - other.y, self.z - other.z)

    def __mul__(self, s: float) -> "Vec3":
        return Vec3(self.x * s, self.y * s, self.z * s)

    __rmul__ = __mul__

    def __neg__(self) -> "Vec3":
        return Vec3(-self.x, -self.y, -self.z)

    def dot(self, other: "Vec3") -> float:
        return self.x * other.x + self.y * other.y + self.z * other.z

    def cross(self, other: "Vec3") -> "Vec3":
        return Vec3(
            self.y * other.z - self.z * other.y,
            self.z * other.x - self.x * other.z,
            self.x * other.y - self.y * other.x,
        )

    def norm(self) -> float:
        return math.sqrt(self.dot(self))

    def normalized(self) -> "Vec3":
        n = self.norm()
        if n == 0.0:
            raise ValueError("cannot normalize zero vector")
        return self * (1.0 / n)

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.x, self.y, self.z)


@dataclass(frozen=True)
class UnitQuat:
    """Unit quaternion (w, x, y, z); renormalized and sign-canonicalized."""

    w: float = 1.0
    x: float = 0.0
    y: float = 0.0
    z: float = 0.0

    def __post_init__(self):
        n = math.sqrt(self.w**2 + self.x**2 + self.y**2 + self.z**2)
        if not math.isfinite(n) or abs(n) < 1e-12:
            raise ValueError("quaternion norm must be finite and nonzero")
        sign = -1.0 if self.w < 0.0 else 1.0
        if self.w == 0.0:
            # half-turn: canonicalize the first nonzero vector component
            for c in (self.x, self.y, self.z):
                if c != 0.0:
                    sign = -1.0 if c < 0.0 else 1.0
                    break
        if abs(n - 1.0) < 1e-12:
            n = 1.0  # keep already-unit components bitwise stable
        s = sign / n
        object.__setattr__(self, "w", self.w * s)
        object.__setattr__(self, "x", self.x * s)
        object.__setattr__(self, "y", self.y * s)
        object.__setattr__(self, "z", self.z * s)

    @staticmethod
    def identity() -> "UnitQuat":
        return UnitQuat(1.0, 0.0, 0.0, 0.0)

    @staticmethod
    def from_axis_angle(axis: Vec3, angle: float) -> "UnitQuat":
        u = axis.normalized()
        h = 0.5 * angle
        s = math.sin(h)
        return UnitQuat(math.cos(h), u.x * s, u.y * s, u.z * s)

    @staticmethod
    def rotation_between(a: Vec3, b: Vec3) -> "UnitQuat":
        """Shortest rotation taking direction a to direction b."""
        u, v = a.normalized(), b.normalized()
        d = u.dot(v)
        if d > 1.0 - 1e-12:
            return UnitQuat.identity()
        if d < -1.0 + 1e-12:
            # opposite directions: pick any perpendicular axis
            axis = u.cross(Vec3(1.0, 0.0, 0.0))
            if axis.norm() < 1e-9:
                axis = u.cross(Vec3(0.0, 1.0, 0.0))
            return UnitQuat.from_axis_angle(axis, math.pi)
        axis = u.cross(v)
        return UnitQuat.from_axis_angle(axis, math.acos(max(-1.0, min(1.0, d))))

    def __mul__(self, other: "UnitQuat") -> "UnitQuat":
        w1, x1, y1, z1 = self.w, self.x, self.y, self.z
        w2, x2, y2, z2 = other.w, other.x, other.y, other.z
        return UnitQuat(
            w1 * w2 - x1 * x2 - y1 * y2 - z1 * z2,
            w1 * x2 + x1 * w2 + y1 * z2 - z1 * y2,
            w1 * y2 - x1 * z2 + y1 * w2 + z1 * x2,
            w1 * z2 + x1 * y2 - y1 * x2 + z1 * w2,
        )

    def conjugate(self) -> "UnitQuat":
        return UnitQuat(self.w, -self.x, -self.y, -self.z)

    def dot(self, other: "UnitQuat") -> float:
        return self.w * other.w + self.x * other.x + self.y * other.y + self.z * other.z

    def rotate(self, v: Vec3) -> Vec3:
        # q * (0,v) * q^-1 expanded
        qv = Vec3(self.x, self.y, self.z)
        t = 2.0 * qv.cross(v)
        return v + t * self.w + qv.cross(t)

    def angle(self) -> float:
        """Rotation angle in [0, pi]."""
        s = math.sqrt(self.x**2 + self.y**2 + self.z**2)
        return 2.0 * math.atan2(s, abs(self.w))

    def axis_angle(self) -> tuple[Vec3, float]:
        s = math.sqrt(self.x**2 + self.y**2 + self.z**2)
        ang = 2.0 * math.atan2(s, abs(self.w))
        if s < 1e-15:
            return Vec3(1.0, 0.0, 0.0), ang
        return Vec3(self.x / s, self.y / s, self.z / s), ang

    def slerp_towards(self, target: "UnitQuat", max_angle: float) -> "UnitQuat":
        """Rotate towards target along the geodesic, by at most max_angle."""
        delta = self.conjugate() * target
        ang = delta.angle()
        if ang <= max_angle:
            return target
        axis, _ = delta.axis_angle()
        return self * UnitQuat.from_axis_angle(axis, max_angle)

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.w, self.x, self.y, self.z)


@dataclass(frozen=True)
class Pose:
    position: Vec3 = Vec3()
    orientation: UnitQuat = UnitQuat.identity()

    @staticmethod
    def identity() -> "Pose":
        return Pose()


def compose(a: Pose, b: Pose) -> Pose:
    """Rigid composition a∘b: apply b in a's frame."""
    return Pose(
        a.position + a.orientation.rotate(b.position),
        a.orientation * b.orientation,
    )


def inverse(p: Pose) -> Pose:
    qi = p.orientation.conjugate()
    return Pose(qi.rotate(-p.position), qi)


def rotation_distance(a: UnitQuat, b: UnitQuat) -> float:
    """Geodesic angle between two rotations, in [0, pi].

    Bi-invariant metric on the rotation group. Computed as the angle of the
    relative rotation aᵀ·b via atan2, which is stable near the identity and
    equals 2·acos(|⟨a,b⟩|).
    """
    if a == b:
        return 0.0
    return (a.conjugate() * b).angle()
