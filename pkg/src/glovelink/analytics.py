"""Trial evaluation: inverse scaling, peak-based delay estimation, and
translational/rotational error series between glove input and tip output.

Errors are reported in the hand workspace: the tip trajectory is unscaled
(inverse of the motion scaling) before comparison, matching how the system's
tracking accuracy is normally quoted.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import find_peaks

from .geometry import Pose, UnitQuat, Vec3, rotation_distance
from .teleop import ControlConfig
from .validation import check_monotone_times

__all__ = [
    "Trajectory",
    "TrialSummary",
    "NoPeaksError",
    "unscale_trajectory",
    "detect_peaks",
    "estimate_delay",
    "resample",
    "error_series",
    "summarize",
]

PEAK_MATCH_GATE = 0.5  # seconds; max peak-time difference considered a match
PEAK_PROMINENCE_FRAC = 0.2  # default prominence, fraction of signal range


class NoPeaksError(RuntimeError):
    """Neither peak matching nor cross-correlation produced a delay."""


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    poses: list[Pose]
    jaw: np.ndarray | None = None

    def __post_init__(self):
        t = check_monotone_times(self.times)
        object.__setattr__(self, "times", t)
        if len(self.poses) != len(t):
            raise ValueError("times and poses length mismatch")
        if self.jaw is not None and len(self.jaw) != len(t):
            raise ValueError("times and jaw length mismatch")

    def positions(self) -> np.ndarray:
        return np.array([p.position.as_tuple() for p in self.poses])

    @property
    def duration(self) -> float:
        return float(self.times[-1] - self.times[0]) if len(self.times) else 0.0


@dataclass(frozen=True)
class TrialSummary:
    duration: float
    trans_mean: float
    trans_std: float
    rot_mean: float
    rot_std: float
    delay: float

    def to_dict(self) -> dict:
        return {
            "duration_s": self.duration,
            "trans_mean_m": self.trans_mean,
            "trans_std_m": self.trans_std,
            "rot_mean_rad": self.rot_mean,
            "rot_std_rad": self.rot_std,
            "delay_s": self.delay,
        }


def unscale_trajectory(t: Trajectory, cfg: ControlConfig,
                       ref: Vec3 | None = None) -> Trajectory:
    """Map tip positions back to hand scale: p -> ref + (p - ref) / eta."""
    if ref is None:
        ref = t.poses[0].position
    inv = 1.0 / cfg.eta
    poses = [Pose(ref + (p.position - ref) * inv, p.orientation) for p in t.poses]
    return Trajectory(t.times, poses, t.jaw)


def detect_peaks(signal, min_prominence: float | None = None) -> np.ndarray:
    """Indices of strict local maxima with at least the given prominence."""
    signal = np.asarray(signal, dtype=np.float64)
    if signal.size < 3:
        raise ValueError("need at least 3 samples")
    if min_prominence is None:
        rng = float(signal.max() - signal.min())
        min_prominence = PEAK_PROMINENCE_FRAC * rng if rng > 0 else np.inf
    idx, _ = find_peaks(signal, prominence=min_prominence)
    return idx


def _matched_peak_lags(t_in, x_in, t_out, x_out) -> list[float]:
    try:
        p_in = detect_peaks(x_in)
        p_out = detect_peaks(x_out)
    except ValueError:
        return []
    lags = []
    used: set[int] = set()
    for i in p_in:
        ti = t_in[i]
        best, best_dt = None, PEAK_MATCH_GATE
        for j in p_out:
            if j in used:
                continue
            dt = abs(t_out[j] - ti)
            if dt <= best_dt:
                best, best_dt = j, dt
        if best is not None:
            used.add(best)
            lags.append(float(t_out[best] - ti))
    return lags


def _xcorr_delay(t_in, x_in, t_out, x_out) -> float | None:
    t0 = max(t_in[0], t_out[0])
    t1 = min(t_in[-1], t_out[-1])
    if t1 <= t0:
        return None
    dt = min(np.median(np.diff(t_in)), np.median(np.diff(t_out)))
    grid = np.arange(t0, t1, dt)
    if grid.size < 4:
        return None
    a = np.interp(grid, t_in, x_in)
    b = np.interp(grid, t_out, x_out)
    a = a - a.mean()
    b = b - b.mean()
    if np.allclose(a, 0) or np.allclose(b, 0):
        return None
    corr = np.correlate(b, a, mode="full")
    lag = int(np.argmax(corr)) - (grid.size - 1)
    return lag * dt


def estimate_delay(input_traj: Trajectory, output_traj: Trajectory) -> float:
    """Delay of the output behind the input, seconds.

    Peak times of the per-axis position signals are matched greedily by
    nearest time; the delay is the mean matched difference. Falls back to
    cross-correlation when fewer than 2 peaks match.
    """
    t_in, t_out = input_traj.times, output_traj.times
    pos_in, pos_out = input_traj.positions(), output_traj.positions()
    lags: list[float] = []
    for axis in range(3):
        lags += _matched_peak_lags(t_in, pos_in[:, axis], t_out, pos_out[:, axis])
    if len(lags) >= 2:
        return float(np.mean(lags))
    for axis in range(3):
        d = _xcorr_delay(t_in, pos_in[:, axis], t_out, pos_out[:, axis])
        if d is not None:
            return d
    raise NoPeaksError("no matched peaks and cross-correlation failed")


def _slerp(a: UnitQuat, b: UnitQuat, u: float) -> UnitQuat:
    ang = (a.conjugate() * b).angle()
    return a.slerp_towards(b, u * ang) if ang > 0 else a


def resample(traj: Trajectory, times: np.ndarray) -> Trajectory:
    """Resample onto the given timestamps: linear positions, slerp orientations."""
    times = np.asarray(times, dtype=np.float64)
    src_t = traj.times
    poses = []
    for t in times:
        i = int(np.searchsorted(src_t, t, side="right")) - 1
        i = max(0, min(i, len(src_t) - 2)) if len(src_t) > 1 else 0
        if len(src_t) == 1:
            poses.append(traj.poses[0])
            continue
        t0, t1 = src_t[i], src_t[i + 1]
        u = 0.0 if t1 == t0 else (t - t0) / (t1 - t0)
        u = min(max(u, 0.0), 1.0)
        p0, p1 = traj.poses[i], traj.poses[i + 1]
        pos = p0.position + (p1.position - p0.position) * u
        poses.append(Pose(pos, _slerp(p0.orientation, p1.orientation, u)))
    return Trajectory(times, poses)


def error_series(input_traj: Trajectory, output_aligned: Trajectory
                 ) -> tuple[np.ndarray, np.ndarray]:
    """Pointwise translational and rotational error between aligned trajectories."""
    if len(input_traj.poses) != len(output_aligned.poses):
        raise ValueError("aligned trajectories must have equal length")
    trans = np.linalg.norm(input_traj.positions() - output_aligned.positions(), axis=1)
    rot = np.array([
        rotation_distance(a.orientation, b.orientation)
        for a, b in zip(input_traj.poses, output_aligned.poses)
    ])
    return trans, rot


def _anchored(traj: Trajectory) -> Trajectory:
    """Express the trajectory relative to its first sample."""
    p0 = traj.poses[0].position
    q0 = traj.poses[0].orientation.conjugate()
    poses = [Pose(p.position - p0, q0 * p.orientation) for p in traj.poses]
    return Trajectory(traj.times, poses, traj.jaw)


def summarize(input_traj: Trajectory, output_traj: Trajectory,
              cfg: ControlConfig = ControlConfig()) -> TrialSummary:
    """Full trial pipeline: unscale, estimate delay, align, report errors.

    Both trajectories are anchored at their first sample so input and output
    live in a common frame; errors are quoted in the hand workspace.
    """
    hand = _anchored(input_traj)
    tip = _anchored(unscale_trajectory(output_traj, cfg))
    delay = estimate_delay(hand, tip)
    shifted = Trajectory(tip.times - delay, tip.poses, tip.jaw)
    # keep the overlap of both time ranges after the shift
    mask = (hand.times >= shifted.times[0]) & (hand.times <= shifted.times[-1])
    if not np.any(mask):
        raise ValueError("no time overlap after delay alignment")
    hand_overlap = Trajectory(hand.times[mask],
                              [p for p, m in zip(hand.poses, mask) if m])
    aligned = resample(shifted, hand_overlap.times)
    trans, rot = error_series(hand_overlap, aligned)
    return TrialSummary(
        duration=input_traj.duration,
        trans_mean=float(trans.mean()),
        trans_std=float(trans.std()),
        rot_mean=float(rot.mean()),
        rot_std=float(rot.std()),
        delay=float(delay),
    )
