import numpy as np
import pytest

from glovelink.geometry import Pose, UnitQuat, Vec3
from glovelink.handmodel import (DEFAULT_TRAIN_COUNTS, GestureLabel, HandFrame,
                                 N_FEATURES, OPEN_PINCH_MIN, SynthParams,
                                 feature_vector, finger_distance,
                                 gesture_predicate, synth_dataset, synth_frame)


def identity_frame():
    return HandFrame(0.0, Pose.identity(),
                     tuple(Pose.identity() for _ in range(21)))


class TestFeatureVector:
    def test_identity_encoding(self):
        f = feature_vector(identity_frame())
        assert f.shape == (N_FEATURES,)
        expected = np.tile([0, 0, 0, 1, 0, 0, 0], 21).astype(float)
        assert np.array_equal(f, expected)

    def test_length_147(self):
        f = feature_vector(synth_frame(GestureLabel.FIST, 5))
        assert len(f) == 147

    def test_layout_locality(self):
        base = identity_frame()
        lms = list(base.landmarks)
        lms[5] = Pose(Vec3(0.01, 0.02, 0.03),
                      UnitQuat.from_axis_angle(Vec3(0, 0, 1), 0.5))
        perturbed = HandFrame(0.0, Pose.identity(), tuple(lms))
        diff = feature_vector(perturbed) != feature_vector(base)
        assert diff[35:42].any()
        diff[35:42] = False
        assert not diff.any()

    def test_hand_pose_excluded(self):
        a = synth_frame(GestureLabel.NONE, 3)
        b = HandFrame(a.timestamp, Pose(Vec3(1, 2, 3)), a.landmarks)
        assert np.array_equal(feature_vector(a), feature_vector(b))


class TestFingerDistance:
    def test_coincident_tips(self):
        assert finger_distance(identity_frame()) == 0.0

    def test_3_4_5_triangle(self):
        lms = list(identity_frame().landmarks)
        lms[4] = Pose(Vec3(0.03, 0, 0))
        lms[8] = Pose(Vec3(0, 0.04, 0))
        h = HandFrame(0.0, Pose.identity(), tuple(lms))
        assert finger_distance(h) == pytest.approx(0.05, abs=1e-15)

    def test_open_hand_at_least_pinch_open(self):
        h = synth_frame(GestureLabel.NONE, 0)
        assert finger_distance(h) >= OPEN_PINCH_MIN


class TestSynthFrame:
    def test_deterministic(self):
        a = synth_frame(GestureLabel.RING, 42)
        b = synth_frame(GestureLabel.RING, 42)
        assert a == b

    def test_fist_pinch_closed(self):
        assert finger_distance(synth_frame(GestureLabel.FIST, 0)) < 0.02

    def test_thumbs_up_differs_from_fist_in_thumb(self):
        params = SynthParams(angle_sigma_deg=0.0, pos_sigma=0.0)
        up = synth_frame(GestureLabel.THUMBS_UP, 0, params)
        fist = synth_frame(GestureLabel.FIST, 0, params)
        thumb = slice(1, 5)
        assert up.landmarks[thumb] != fist.landmarks[thumb]
        # non-thumb fingers share the curled template
        assert up.landmarks[5:] == fist.landmarks[5:]

    def test_wrong_label_rejected(self):
        with pytest.raises(ValueError):
            synth_frame("fist", 0)  # type: ignore[arg-type]

    @pytest.mark.parametrize("label", list(GestureLabel))
    def test_predicates_hold_over_1000_samples(self, label):
        bad = sum(
            not gesture_predicate(label, synth_frame(label, seed))
            for seed in range(1000)
        )
        assert bad == 0

    def test_pure_featurization(self):
        f1 = feature_vector(synth_frame(GestureLabel.PINKY, 9))
        f2 = feature_vector(synth_frame(GestureLabel.PINKY, 9))
        assert np.array_equal(f1, f2)


class TestSynthDataset:
    def test_default_counts_sum(self):
        assert sum(DEFAULT_TRAIN_COUNTS.values()) == 9477

    def test_requested_counts_honored(self):
        counts = {GestureLabel.NONE: 5, GestureLabel.PINKY: 3,
                  GestureLabel.RING: 0, GestureLabel.FIST: 2,
                  GestureLabel.THUMBS_UP: 1}
        data = synth_dataset(counts, seed=4)
        assert len(data) == 11
        hist = {g: 0 for g in GestureLabel}
        for s in data:
            hist[s.label] += 1
        assert hist == counts

    def test_empty(self):
        assert synth_dataset({g: 0 for g in GestureLabel}, seed=1) == []

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            synth_dataset({GestureLabel.NONE: -1}, seed=1)

    def test_deterministic_shuffle(self):
        counts = {g: 10 for g in GestureLabel}
        a = synth_dataset(counts, seed=7)
        b = synth_dataset(counts, seed=7)
        assert all(np.array_equal(x.features, y.features) and x.label == y.label
                   for x, y in zip(a, b))

    def test_nearest_centroid_separability(self):
        counts = {g: 60 for g in GestureLabel}
        data = synth_dataset(counts, seed=21)
        train, test = data[: len(data) // 2], data[len(data) // 2:]
        cents = {}
        for g in GestureLabel:
            feats = [s.features for s in train if s.label == g]
            cents[g] = np.mean(feats, axis=0)
        hits = sum(
            min(cents, key=lambda c: np.linalg.norm(s.features - cents[c])) == s.label
            for s in test
        )
        assert hits / len(test) >= 0.90
