import numpy as np
import pytest

from glovelink.validation import (check_feature_matrix, check_labels,
                                  check_monotone_times)


class TestFeatureMatrix:
    def test_promotes_1d_to_row(self):
        X = check_feature_matrix(np.zeros(5))
        assert X.shape == (1, 5)

    def test_width_enforced(self):
        with pytest.raises(ValueError):
            check_feature_matrix(np.zeros((3, 4)), n_features=5)

    def test_rejects_nan(self):
        with pytest.raises(ValueError):
            check_feature_matrix(np.array([[1.0, np.nan]]))

    def test_rejects_3d(self):
        with pytest.raises(ValueError):
            check_feature_matrix(np.zeros((2, 2, 2)))


class TestLabels:
    def test_plain_integers(self):
        y = check_labels([0, 4, 2], n_classes=5)
        assert y.dtype == np.int64 and y.tolist() == [0, 4, 2]

    def test_one_hot_accepted(self):
        y = check_labels(np.eye(5)[[1, 3]], n_classes=5)
        assert y.tolist() == [1, 3]

    def test_out_of_range_rejected(self):
        with pytest.raises(ValueError):
            check_labels([0, 5], n_classes=5)

    def test_wrong_one_hot_width(self):
        with pytest.raises(ValueError):
            check_labels(np.eye(4)[[0]], n_classes=5)


class TestMonotoneTimes:
    def test_strictly_increasing_ok(self):
        t = check_monotone_times([0.0, 0.1, 0.2])
        assert t.dtype == np.float64

    def test_duplicate_rejected(self):
        with pytest.raises(ValueError):
            check_monotone_times([0.0, 0.1, 0.1])

    def test_decreasing_rejected(self):
        with pytest.raises(ValueError):
            check_monotone_times([1.0, 0.5])

    def test_2d_rejected(self):
        with pytest.raises(ValueError):
            check_monotone_times(np.zeros((2, 2)))
