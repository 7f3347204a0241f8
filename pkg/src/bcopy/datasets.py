"""Synthetic 2-D benchmark datasets with an 80/20 hold-out split."""

from dataclasses import dataclass

import numpy as np

from .sampling import rng_for

KINDS = ("colliding_gaussians", "two_spirals", "irregular_blobs")


@dataclass
class LabeledDataset:
    x_train: np.ndarray
    y_train: np.ndarray
    x_test: np.ndarray
    y_test: np.ndarray

    @property
    def x_all(self):
        return np.vstack([self.x_train, self.x_test])

    @property
    def y_all(self):
        return np.concatenate([self.y_train, self.y_test])


def _colliding_gaussians(n, rng, noise):
    """Two isotropic Gaussians at -e1 and +e1 with shared sigma = noise;
    the overlap (and the room for an overfit teacher) grows with noise."""
    n_pos = n // 2
    labels = np.concatenate([np.ones(n_pos, dtype=np.int64),
                             -np.ones(n - n_pos, dtype=np.int64)])
    means = np.where(labels[:, None] > 0, 1.0, -1.0) * np.array([1.0, 0.0])
    return means + noise * rng.standard_normal((n, 2)), labels

def _two_spirals(n, rng, noise):
    """Interleaved spirals (second one rotated half a turn), jittered."""
    n_pos = n // 2
    labels = np.concatenate([np.ones(n_pos, dtype=np.int64),
                             -np.ones(n - n_pos, dtype=np.int64)])
    t = 3.0 * np.pi * np.sqrt(rng.random(n))
    radius = t / (3.0 * np.pi)
    pts = np.column_stack([radius * np.cos(t), radius * np.sin(t)])
    pts[labels < 0] *= -1.0
    return pts + noise * rng.standard_normal((n, 2)), labels

def _irregular_blobs(n, rng, noise):
    """6 to 12 Gaussian clusters with per-cluster labels: non-convex,
    clustered class regions."""
    k = int(rng.integers(6, 13))
    centers = rng.uniform(-1.0, 1.0, size=(k, 2))
    sigmas = rng.uniform(0.08, 0.25, size=k)
    # alternate labels in a shuffled cluster order so both classes occur
    cluster_labels = np.where(np.arange(k) % 2 == 0, 1, -1)[rng.permutation(k)]
    assignment = rng.integers(0, k, size=n)
    pts = centers[assignment] + (sigmas[assignment] * (1.0 + noise))[:, None] \
        * rng.standard_normal((n, 2))
    return pts, cluster_labels[assignment].astype(np.int64)

_GENERATORS = {
    "colliding_gaussians": _colliding_gaussians,
    "two_spirals": _two_spirals,
    "irregular_blobs": _irregular_blobs,
}


def generate_synthetic_dataset(kind, n, seed, noise=0.0):
    """Labeled 2-D dataset of the given kind, split 80/20 by a seeded
    permutation."""
    if kind not in _GENERATORS:
        raise ValueError(f"unknown dataset kind {kind!r}; choose from {KINDS}")
    if n < 10:
        raise ValueError("n must be >= 10")
    if noise < 0:
        raise ValueError("noise must be >= 0")
    rng = rng_for(seed)
    x, y = _GENERATORS[kind](n, rng, noise)
    perm = rng.permutation(n)
    n_train = int(n * 0.8)
    train, test = perm[:n_train], perm[n_train:]
    return LabeledDataset(x[train], y[train], x[test], y[test])


def save_dataset_csv(path, x, y):
    stack = np.column_stack([x, y])
    header = ",".join([f"x{i}" for i in range(x.shape[1])] + ["label"])
    np.savetxt(path, stack, fmt="%.17g", delimiter=",", header=header, comments="")


def load_dataset_csv(path):
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return data[:, :-1], data[:, -1].astype(np.int64)
