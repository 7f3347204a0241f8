import numpy as np
import pytest

from bcopy.datasets import (generate_synthetic_dataset, load_dataset_csv,
                            save_dataset_csv)
from bcopy.oracle import fit_nearest_neighbor_teacher


def test_split_sizes():
    ds = generate_synthetic_dataset("colliding_gaussians", 1000, seed=0, noise=1.0)
    assert len(ds.y_train) == 800
    assert len(ds.y_test) == 200


def test_noise_free_gaussians_separable():
    ds = generate_synthetic_dataset("colliding_gaussians", 200, seed=1, noise=0.0)
    teacher = fit_nearest_neighbor_teacher(ds.x_train, ds.y_train)
    assert np.mean(teacher.classify(ds.x_test) == ds.y_test) == 1.0


def test_deterministic():
    a = generate_synthetic_dataset("two_spirals", 400, seed=2, noise=0.05)
    b = generate_synthetic_dataset("two_spirals", 400, seed=2, noise=0.05)
    np.testing.assert_array_equal(a.x_train, b.x_train)
    np.testing.assert_array_equal(a.y_test, b.y_test)


@pytest.mark.parametrize("kind", ["colliding_gaussians", "two_spirals",
                                  "irregular_blobs"])
def test_labels_are_binary_and_both_present(kind):
    ds = generate_synthetic_dataset(kind, 500, seed=3, noise=0.1)
    labels = ds.y_all
    assert set(np.unique(labels)) == {-1, 1}
    assert ds.x_all.shape == (500, 2)


def test_spirals_interleave():
    # the two spiral arms are point reflections of each other
    ds = generate_synthetic_dataset("two_spirals", 2000, seed=4, noise=0.0)
    x, y = ds.x_all, ds.y_all
    r_pos = np.linalg.norm(x[y > 0], axis=1)
    r_neg = np.linalg.norm(x[y < 0], axis=1)
    assert abs(r_pos.mean() - r_neg.mean()) < 0.05


def test_unknown_kind():
    with pytest.raises(ValueError):
        generate_synthetic_dataset("moons", 100, seed=0)


def test_tiny_n_rejected():
    with pytest.raises(ValueError):
        generate_synthetic_dataset("colliding_gaussians", 5, seed=0)


def test_csv_roundtrip(tmp_path):
    ds = generate_synthetic_dataset("irregular_blobs", 50, seed=5, noise=0.0)
    path = tmp_path / "data.csv"
    save_dataset_csv(path, ds.x_train, ds.y_train)
    x, y = load_dataset_csv(path)
    np.testing.assert_array_equal(x, ds.x_train)
    np.testing.assert_array_equal(y, ds.y_train)
