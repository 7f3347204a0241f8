"""Copy evaluation: fidelity to the teacher, test accuracy, distance error."""

from dataclasses import dataclass

import numpy as np

from .sampling import PointCloud
from .students import predict_labels


class ZeroBaselineError(ValueError):
    """Relative difference against a zero baseline is undefined."""


@dataclass
class FidelityReport:
    n_eval: int
    mismatches: int

    @property
    def error(self):
        return self.mismatches / self.n_eval


@dataclass
class DistanceErrorReport:
    mae: float
    rmse: float
    n: int


def empirical_fidelity(copy, oracle, eval_points):
    """0-1 disagreement rate between the copy and the teacher."""
    pts = eval_points.points if isinstance(eval_points, PointCloud) else np.asarray(eval_points)
    if pts.shape[0] == 0:
        raise ValueError("evaluation set is empty")
    copy_labels = predict_labels(copy, pts)
    oracle_labels = oracle.classify(pts)
    return FidelityReport(pts.shape[0], int(np.sum(copy_labels != oracle_labels)))


def accuracy(copy, test_x, test_y):
    """Fraction of test labels the copy reproduces."""
    test_y = np.asarray(test_y, dtype=np.int64)
    if test_y.shape[0] == 0:
        raise ValueError("test set is empty")
    if not np.isin(test_y, (-1, 1)).all():
        raise ValueError("test labels must be -1 or +1")
    return float(np.mean(predict_labels(copy, test_x) == test_y))


def distance_error_report(predicted, ground_truth):
    predicted = np.asarray(predicted, dtype=np.float64)
    ground_truth = np.asarray(ground_truth, dtype=np.float64)
    if predicted.shape != ground_truth.shape or predicted.ndim != 1:
        raise ValueError("predicted and ground_truth must be equal-length vectors")
    if predicted.shape[0] == 0:
        raise ValueError("empty input")
    err = predicted - ground_truth
    return DistanceErrorReport(
        mae=float(np.mean(np.abs(err))),
        rmse=float(np.sqrt(np.mean(err ** 2))),
        n=predicted.shape[0],
    )


def relative_difference(copy_metric, baseline_metric):
    """Signed percent change of the copy metric over the baseline;
    negative means the copy reduced the error."""
    if baseline_metric == 0:
        raise ZeroBaselineError("baseline metric is zero")
    return 100.0 * (copy_metric - baseline_metric) / baseline_metric
