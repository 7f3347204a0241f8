"""Regression students trained on signed-distance targets.

The sign of a student's real-valued output is the copied classifier; the
magnitude approximates the (alpha-exponentiated) boundary distance. Two
model families: a mini-batch Adam MLP and a least-squares gradient-boosted
tree ensemble. Training is deterministic given the seeds, and models
round-trip through a versioned JSON document with bit-exact predictions.
"""

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .sampling import rng_for

ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPS = 1e-8

MODEL_FORMAT = "bcopy-model"
MODEL_VERSION = 1


def epochs_for(n):
    """Epoch budget shrinking with dataset size: 100 at n=1000, 5 at n=1e6."""
    if n < 2:
        raise ValueError("dataset size must be >= 2")
    value = int(100.0 * 20.0 ** (1.0 - math.log(n) / math.log(1000.0)))
    return max(value, 1)


@dataclass
class MlpSpec:
    """Hidden widths plus the final width-1 output, e.g. [32, 16, 1].
    [1] is a pure linear model. Hidden activation is the rectifier; the
    output is linear."""

    layer_widths: list
    init_seed: int = 0

    def __post_init__(self):
        widths = [int(w) for w in self.layer_widths]
        if not widths or widths[-1] != 1:
            raise ValueError("layer_widths must end in 1")
        if any(w < 1 for w in widths):
            raise ValueError("all widths must be >= 1")
        self.layer_widths = widths


@dataclass
class TrainConfig:
    learning_rate: float = 0.001
    batch_size: int = 32
    epochs: object = "auto"
    shuffle_seed: int = 0

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if self.epochs != "auto" and int(self.epochs) < 1:
            raise ValueError("epochs must be >= 1 or 'auto'")


@dataclass
class GbrtSpec:
    n_stages: int
    learning_rate: float = 0.1
    max_leaves: int = 31
    min_samples_leaf: int = 20

    def __post_init__(self):
        if self.n_stages < 1:
            raise ValueError("n_stages must be >= 1")
        if self.max_leaves < 2:
            raise ValueError("max_leaves must be >= 2")
        if self.min_samples_leaf < 1 or self.learning_rate <= 0:
            raise ValueError("invalid learning_rate or min_samples_leaf")


# --- multilayer perceptron ---------------------------------------------------


def init_layers(input_dim, spec):
    """He-style uniform fan-in init, biases zero, seeded."""
    rng = rng_for(spec.init_seed)
    layers = []
    fan_in = input_dim
    for width in spec.layer_widths:
        bound = math.sqrt(6.0 / fan_in)
        w = rng.uniform(-bound, bound, size=(fan_in, width))
        layers.append((w, np.zeros(width)))
        fan_in = width
    return layers


def mlp_forward(layers, x):
    """Returns (output (n,), pre-activations per layer for backprop)."""
    pre = []
    h = x
    for i, (w, b) in enumerate(layers):
        z = h @ w + b
        pre.append((h, z))
        h = np.maximum(z, 0.0) if i < len(layers) - 1 else z
    return h[:, 0], pre


def mlp_loss_and_grads(layers, x, y):
    """Mean-squared-error loss and its analytic gradients."""
    out, pre = mlp_forward(layers, x)
    diff = out - y
    loss = float(np.mean(diff ** 2))
    grad_out = (2.0 / x.shape[0]) * diff[:, None]
    grads = [None] * len(layers)
    delta = grad_out
    for i in range(len(layers) - 1, -1, -1):
        h, z = pre[i]
        if i < len(layers) - 1:
            delta = delta * (z > 0.0)
        grads[i] = (h.T @ delta, delta.sum(axis=0))
        if i > 0:
            delta = delta @ layers[i][0].T
    return loss, grads


class MlpModel:
    kind = "mlp"

    def __init__(self, input_dim, spec, layers, loss_trace=None):
        self.input_dim = int(input_dim)
        self.spec = spec
        self.layers = layers
        self.loss_trace = loss_trace or []

    def predict_values(self, points):
        pts = _check_points(points, self.input_dim)
        out, _ = mlp_forward(self.layers, pts)
        return out


def train_mlp(data, spec, cfg=None):
    """Minimise MSE against the dataset targets with mini-batch Adam.

    Deterministic given (spec.init_seed, cfg.shuffle_seed): epoch order is
    a seeded permutation and the last partial batch is kept. Raises if the
    loss goes non-finite, reporting the epoch.
    """
    cfg = cfg or TrainConfig()
    x, y = _training_arrays(data)
    layers = init_layers(x.shape[1], spec)
    epochs = epochs_for(x.shape[0]) if cfg.epochs == "auto" else int(cfg.epochs)
    n = x.shape[0]

    m_state = [(np.zeros_like(w), np.zeros_like(b)) for w, b in layers]
    v_state = [(np.zeros_like(w), np.zeros_like(b)) for w, b in layers]
    shuffle_rng = rng_for(cfg.shuffle_seed)
    step = 0
    trace = []
    for epoch in range(epochs):
        perm = shuffle_rng.permutation(n)
        sq_err = 0.0
        for start in range(0, n, cfg.batch_size):
            batch = perm[start:start + cfg.batch_size]
            loss, grads = mlp_loss_and_grads(layers, x[batch], y[batch])
            sq_err += loss * batch.shape[0]
            step += 1
            bc1 = 1.0 - ADAM_BETA1 ** step
            bc2 = 1.0 - ADAM_BETA2 ** step
            for i, (w, b) in enumerate(layers):
                gw, gb = grads[i]
                mw, mb = m_state[i]
                vw, vb = v_state[i]
                mw *= ADAM_BETA1
                mw += (1.0 - ADAM_BETA1) * gw
                mb *= ADAM_BETA1
                mb += (1.0 - ADAM_BETA1) * gb
                vw *= ADAM_BETA2
                vw += (1.0 - ADAM_BETA2) * gw ** 2
                vb *= ADAM_BETA2
                vb += (1.0 - ADAM_BETA2) * gb ** 2
                w -= cfg.learning_rate * (mw / bc1) / (np.sqrt(vw / bc2) + ADAM_EPS)
                b -= cfg.learning_rate * (mb / bc1) / (np.sqrt(vb / bc2) + ADAM_EPS)
        epoch_loss = sq_err / n
        if not math.isfinite(epoch_loss):
            raise FloatingPointError(f"training diverged at epoch {epoch}")
        trace.append(epoch_loss)
    return MlpModel(x.shape[1], spec, layers, trace)


# --- gradient-boosted regression trees ---------------------------------------


@dataclass
class _Tree:
    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray

    def predict(self, x):
        node = np.zeros(x.shape[0], dtype=np.int64)
        while True:
            internal = self.feature[node] >= 0
            if not internal.any():
                break
            f = self.feature[node]
            go_left = x[np.arange(x.shape[0]), np.maximum(f, 0)] <= self.threshold[node]
            node = np.where(internal, np.where(go_left, self.left[node], self.right[node]), node)
        return self.value[node]


def _best_split(x, residual, idx, min_samples_leaf):
    """Exhaustive midpoint search over sorted unique values per feature.

    Returns (gain, feature, threshold) or None. Ties go to the lowest
    feature index, then the lowest threshold.
    """
    n = idx.shape[0]
    if n < 2 * min_samples_leaf:
        return None
    r = residual[idx]
    total = r.sum()
    base = total * total / n
    best = None
    for f in range(x.shape[1]):
        values = x[idx, f]
        order = np.argsort(values, kind="stable")
        sv = values[order]
        cum = np.cumsum(r[order])
        k = np.arange(1, n)
        valid = (sv[:-1] < sv[1:]) & (k >= min_samples_leaf) & (n - k >= min_samples_leaf)
        if not valid.any():
            continue
        left_sum = cum[:-1]
        gain = np.where(
            valid,
            left_sum ** 2 / k + (total - left_sum) ** 2 / (n - k) - base,
            -np.inf,
        )
        pos = int(np.argmax(gain))
        if gain[pos] <= 0.0:
            continue
        if best is None or gain[pos] > best[0]:
            best = (float(gain[pos]), f, float((sv[pos] + sv[pos + 1]) / 2.0), order, pos)
    return best


def _grow_tree(x, residual, spec):
    """Best-first growth: always split the candidate leaf with the largest
    squared-error reduction, up to max_leaves."""
    feature, threshold, left, right, value = [], [], [], [], []

    def add_node(idx):
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        value.append(float(residual[idx].mean()))
        return len(feature) - 1

    root_idx = np.arange(x.shape[0])
    root = add_node(root_idx)
    candidates = {}
    split = _best_split(x, residual, root_idx, spec.min_samples_leaf)
    if split is not None:
        candidates[root] = (split, root_idx)
    n_leaves = 1
    while candidates and n_leaves < spec.max_leaves:
        # max gain, ties to the earliest-created node
        node = min(candidates, key=lambda nid: (-candidates[nid][0][0], nid))
        (gain, f, thr, order, pos), idx = candidates.pop(node)
        sorted_idx = idx[order]
        left_idx, right_idx = sorted_idx[:pos + 1], sorted_idx[pos + 1:]
        feature[node], threshold[node] = f, thr
        left[node] = add_node(left_idx)
        right[node] = add_node(right_idx)
        n_leaves += 1
        for child, child_idx in ((left[node], left_idx), (right[node], right_idx)):
            child_split = _best_split(x, residual, child_idx, spec.min_samples_leaf)
            if child_split is not None:
                candidates[child] = (child_split, child_idx)
    return _Tree(
        np.asarray(feature, dtype=np.int64),
        np.asarray(threshold, dtype=np.float64),
        np.asarray(left, dtype=np.int64),
        np.asarray(right, dtype=np.int64),
        np.asarray(value, dtype=np.float64),
    )


class GbrtModel:
    kind = "gbrt"

    def __init__(self, input_dim, spec, base, trees):
        self.input_dim = int(input_dim)
        self.spec = spec
        self.base = float(base)
        self.trees = trees

    def predict_values(self, points):
        pts = _check_points(points, self.input_dim)
        out = np.full(pts.shape[0], self.base)
        for tree in self.trees:
            out += self.spec.learning_rate * tree.predict(pts)
        return out


def train_gbrt(data, spec):
    """Least-squares boosting: the base prediction is the target mean and
    each stage fits a tree to the current residuals, scaled by the
    learning rate. A stage with no admissible split emits a constant tree.
    """
    x, y = _training_arrays(data)
    if x.shape[0] < spec.min_samples_leaf:
        raise ValueError("dataset smaller than min_samples_leaf")
    base = float(y.mean())
    pred = np.full(x.shape[0], base)
    trees = []
    for _ in range(spec.n_stages):
        tree = _grow_tree(x, y - pred, spec)
        trees.append(tree)
        pred += spec.learning_rate * tree.predict(x)
    return GbrtModel(x.shape[1], spec, base, trees)


# --- shared prediction / persistence -----------------------------------------


def _check_points(points, dim):
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != dim:
        raise ValueError(f"points must be n x {dim}")
    return pts


def _training_arrays(data):
    if len(data) == 0:
        raise ValueError("empty dataset")
    if data.targets is None:
        raise ValueError("dataset has no regression targets; run the "
                         "alpha transform (or assign hard labels) first")
    y = np.asarray(data.targets, dtype=np.float64)
    if not np.all(np.isfinite(y)):
        raise ValueError("targets must be finite")
    return data.xs, y


def predict_values(model, points):
    return model.predict_values(points)


def predict_labels(model, points):
    """+1 where the regressed value is >= 0, else -1 (0 maps to +1, the
    same convention the oracles use on their boundary)."""
    return np.where(model.predict_values(points) >= 0.0, 1, -1).astype(np.int64)


def save_model(model, path):
    if model.kind == "mlp":
        doc = {
            "format": MODEL_FORMAT,
            "version": MODEL_VERSION,
            "kind": "mlp",
            "input_dim": model.input_dim,
            "spec": {"layer_widths": model.spec.layer_widths,
                     "init_seed": model.spec.init_seed},
            "layers": [{"w": w.tolist(), "b": b.tolist()} for w, b in model.layers],
        }
    elif model.kind == "gbrt":
        doc = {
            "format": MODEL_FORMAT,
            "version": MODEL_VERSION,
            "kind": "gbrt",
            "input_dim": model.input_dim,
            "spec": {"n_stages": model.spec.n_stages,
                     "learning_rate": model.spec.learning_rate,
                     "max_leaves": model.spec.max_leaves,
                     "min_samples_leaf": model.spec.min_samples_leaf},
            "base": model.base,
            "trees": [{
                "feature": t.feature.tolist(),
                "threshold": t.threshold.tolist(),
                "left": t.left.tolist(),
                "right": t.right.tolist(),
                "value": t.value.tolist(),
            } for t in model.trees],
        }
    else:
        raise ValueError(f"unknown model kind {model.kind!r}")
    with open(path, "w") as fh:
        json.dump(doc, fh)
        fh.write("\n")


def load_model(path):
    with open(path) as fh:
        doc = json.load(fh)
    if doc.get("format") != MODEL_FORMAT:
        raise ValueError(f"{path}: not a model file")
    if doc.get("version") != MODEL_VERSION:
        raise ValueError(f"{path}: unsupported model version {doc.get('version')}")
    if doc["kind"] == "mlp":
        spec = MlpSpec(doc["spec"]["layer_widths"], doc["spec"]["init_seed"])
        layers = [(np.asarray(l["w"], dtype=np.float64),
                   np.asarray(l["b"], dtype=np.float64)) for l in doc["layers"]]
        return MlpModel(doc["input_dim"], spec, layers)
    if doc["kind"] == "gbrt":
        spec = GbrtSpec(**doc["spec"])
        trees = [_Tree(np.asarray(t["feature"], dtype=np.int64),
                       np.asarray(t["threshold"], dtype=np.float64),
                       np.asarray(t["left"], dtype=np.int64),
                       np.asarray(t["right"], dtype=np.int64),
                       np.asarray(t["value"], dtype=np.float64))
                 for t in doc["trees"]]
        return GbrtModel(doc["input_dim"], spec, doc["base"], trees)
    raise ValueError(f"{path}: unknown model kind {doc['kind']!r}")
