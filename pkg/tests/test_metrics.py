import numpy as np
import pytest

from bcopy.metrics import (DistanceErrorReport, ZeroBaselineError, accuracy,
                           distance_error_report, empirical_fidelity,
                           relative_difference)
from bcopy.oracle import make_analytic_oracle
from bcopy.sampling import Region, uniform_box


class OracleAsStudent:
    """Adapter: use an oracle's labels as a student's real-valued output."""

    def __init__(self, oracle, flip=False):
        self.oracle = oracle
        self.input_dim = oracle.dim
        self.sign = -1.0 if flip else 1.0

    def predict_values(self, pts):
        return self.sign * self.oracle.classify(pts).astype(float)


@pytest.fixture
def plane():
    return make_analytic_oracle("hyperplane", w=(1, 0), b=0)


class TestFidelity:
    def test_self_copy_is_zero(self, plane):
        pts = uniform_box(Region.cube(2), 2000, seed=1)
        assert empirical_fidelity(OracleAsStudent(plane), plane, pts).error == 0.0

    def test_negated_copy_is_one(self, plane):
        pts = uniform_box(Region.cube(2), 2000, seed=2)
        report = empirical_fidelity(OracleAsStudent(plane, flip=True), plane, pts)
        assert report.error == 1.0

    def test_counts_mismatches(self, plane):
        class FixedStudent:
            input_dim = 2
            def predict_values(self, pts):
                # disagree with x>=0 labelling on 3 of 10 points
                return np.array([1, 1, 1, 1, 1, 1, 1, -1, -1, -1], dtype=float)
        pts = np.column_stack([np.ones(10), np.zeros(10)])
        report = empirical_fidelity(FixedStudent(), plane, pts)
        assert report.mismatches == 3
        assert report.error == pytest.approx(0.3)

    def test_symmetric_disagreement(self, plane):
        other = make_analytic_oracle("sphere", center=(0, 0), radius=0.8)
        pts = uniform_box(Region.cube(2), 5000, seed=3)
        ab = empirical_fidelity(OracleAsStudent(plane), other, pts).error
        ba = empirical_fidelity(OracleAsStudent(other), plane, pts).error
        assert ab == ba


class TestAccuracy:
    def test_all_matched(self, plane):
        pts = uniform_box(Region.cube(2), 100, seed=4).points
        labels = plane.classify(pts)
        assert accuracy(OracleAsStudent(plane), pts, labels) == 1.0

    def test_all_flipped(self, plane):
        pts = uniform_box(Region.cube(2), 100, seed=5).points
        labels = plane.classify(pts)
        assert accuracy(OracleAsStudent(plane, flip=True), pts, labels) == 0.0

    def test_fraction(self, plane):
        pts = np.column_stack([np.concatenate([np.ones(93), -np.ones(7)]),
                               np.zeros(100)])
        labels = np.ones(100, dtype=int)
        assert accuracy(OracleAsStudent(plane), pts, labels) == pytest.approx(0.93)

    def test_rejects_bad_labels(self, plane):
        with pytest.raises(ValueError):
            accuracy(OracleAsStudent(plane), np.zeros((2, 2)), [0, 1])

    def test_perfect_on_own_predicted_labels(self, plane):
        from bcopy.students import predict_labels
        student = OracleAsStudent(plane)
        pts = uniform_box(Region.cube(2), 500, seed=6).points
        own = predict_labels(student, pts)
        assert accuracy(student, pts, own) == 1.0


class TestDistanceError:
    def test_equal_absolute_errors(self):
        report = distance_error_report([0.1, 0.3], [0.2, 0.2])
        assert report.mae == pytest.approx(0.1)
        assert report.rmse == pytest.approx(0.1)

    def test_perfect(self):
        report = distance_error_report([0.5, 0.7], [0.5, 0.7])
        assert (report.mae, report.rmse) == (0.0, 0.0)

    def test_mae_below_rmse(self):
        report = distance_error_report([0.0, 0.0], [0.0, 2.0])
        assert report.mae == pytest.approx(1.0)
        assert report.rmse == pytest.approx(np.sqrt(2.0))

    def test_mae_rmse_inequality_property(self):
        rng = np.random.default_rng(6)
        for _ in range(1000):
            n = int(rng.integers(1, 40))
            report = distance_error_report(rng.normal(size=n), rng.normal(size=n))
            assert report.mae <= report.rmse + 1e-15

    def test_rejects_mismatched_lengths(self):
        with pytest.raises(ValueError):
            distance_error_report([1.0], [1.0, 2.0])
        with pytest.raises(ValueError):
            distance_error_report([], [])


class TestRelativeDifference:
    def test_reduction(self):
        assert relative_difference(0.08, 0.10) == pytest.approx(-20.0)

    def test_equal(self):
        assert relative_difference(0.1, 0.1) == 0.0

    def test_increase(self):
        assert relative_difference(0.15, 0.10) == pytest.approx(50.0)

    def test_zero_baseline_is_explicit(self):
        with pytest.raises(ZeroBaselineError):
            relative_difference(0.1, 0.0)
