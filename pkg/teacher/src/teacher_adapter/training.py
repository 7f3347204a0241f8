"""Teacher training: scikit-learn classifiers behind a fixed wire contract.

Labels are {-1,+1} on disk and on the wire; models train on {0,1} and the
boundary maps back with 2*y - 1. The neural net standardizes features and
the scaler travels with the model file.
"""

from dataclasses import dataclass

import joblib
import numpy as np
from sklearn.ensemble import GradientBoostingClassifier, RandomForestClassifier
from sklearn.neural_network import MLPClassifier
from sklearn.preprocessing import StandardScaler

KINDS = ("random-forest", "gradient-boosting", "neural-net")

MODEL_FORMAT = "teacher-adapter-model"


@dataclass
class TeacherSpec:
    kind: str
    seed: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")


def _build_estimator(spec):
    if spec.kind == "random-forest":
        return RandomForestClassifier(n_estimators=100, max_depth=10,
                                      min_samples_leaf=5,
                                      random_state=spec.seed)
    if spec.kind == "gradient-boosting":
        return GradientBoostingClassifier(learning_rate=0.1, max_leaf_nodes=31,
                                          min_samples_leaf=20,
                                          random_state=spec.seed)
    return MLPClassifier(hidden_layer_sizes=(128, 64, 32, 16),
                         learning_rate_init=0.001, batch_size=32, max_iter=50,
                         random_state=spec.seed)


def load_training_csv(path):
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    if data.shape[1] < 2:
        raise ValueError(f"{path}: need feature columns plus a label column")
    x, y = data[:, :-1], data[:, -1].astype(np.int64)
    if not np.isin(y, (-1, 1)).all():
        raise ValueError(f"{path}: labels must be -1 or +1")
    return x, y


def train_teacher(spec, data_path, out_path):
    """Fit the requested teacher, persist it, return training accuracy."""
    x, y = load_training_csv(data_path)
    y01 = (y > 0).astype(np.int64)
    scaler = None
    features = x
    if spec.kind == "neural-net":
        scaler = StandardScaler().fit(x)
        features = scaler.transform(x)
    model = _build_estimator(spec).fit(features, y01)
    train_acc = float(np.mean(model.predict(features) == y01))
    joblib.dump({
        "format": MODEL_FORMAT,
        "kind": spec.kind,
        "seed": spec.seed,
        "dim": x.shape[1],
        "model": model,
        "scaler": scaler,
    }, out_path)
    return train_acc


class ServedTeacher:
    """A loaded model file exposing {-1,+1} batch predictions."""

    def __init__(self, path):
        doc = joblib.load(path)
        if doc.get("format") != MODEL_FORMAT:
            raise ValueError(f"{path}: not a teacher model file")
        self.kind = doc["kind"]
        self.dim = int(doc["dim"])
        self._model = doc["model"]
        self._scaler = doc["scaler"]

    def predict(self, x):
        x = np.asarray(x, dtype=np.float64)
        if x.size == 0:
            return np.empty(0, dtype=np.int64)
        if x.ndim != 2 or x.shape[1] != self.dim:
            raise ValueError(f"expected n x {self.dim} features, got {x.shape}")
        if self._scaler is not None:
            x = self._scaler.transform(x)
        return 2 * self._model.predict(x).astype(np.int64) - 1
