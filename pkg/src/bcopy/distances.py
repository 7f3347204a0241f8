"""Signed-distance estimation against a hard-label teacher.

Two estimators are provided. The refining search (`estimate_distances_refining`)
spends a batch of ball queries per point and iteration to chase the nearest
opposite-label point, giving high-quality distances at a steep query cost:
n*(it_max*m + 1) calls when nothing saturates. The clustered builder
(`build_clustered_dataset`) labels whole clusters at once and reads distances
off an inner/outer cloud pair, at exactly n_c*(n_in + n_out) calls.

Targets are label * xi**alpha; alpha interpolates between hard labels
(alpha=0, with 0**0 := 1) and the raw signed distance (alpha=1). The
`check_holder_bounds` verifier tests the smoothness guarantee such targets
must satisfy: |t(x)-t(y)| <= 2 d(x,y)^alpha for alpha <= 1 and
2 alpha D^(alpha-1) d(x,y) for alpha >= 1.
"""

import json
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.distance import cdist

from . import kernels
from .oracle import HyperplaneOracle, SphereOracle
from .sampling import PointCloud, region_points, rng_for, unit_ball_cloud

HOLDER_SLACK = 1e-9


def _reraise_with_index(exc, what, i):
    try:
        wrapped = type(exc)(f"{what} {i}: {exc}")
    except Exception:
        wrapped = RuntimeError(f"{what} {i}: {exc}")
    raise wrapped from exc


@dataclass
class RefiningParams:
    """Per-query search: radius d_max on the first pass, d_min afterwards."""

    d_max: float
    d_min: float
    it_max: int = 5
    m: int = 200

    def __post_init__(self):
        if self.d_max <= 0 or self.d_min <= 0:
            raise ValueError("d_max and d_min must be positive")
        if self.d_min > self.d_max:
            raise ValueError("d_min must not exceed d_max")
        if self.it_max < 1 or self.m < 1:
            raise ValueError("it_max and m must be >= 1")


@dataclass
class ClusterParams:
    """Clustered labelling: n_c cluster centres, n_in targets per cluster,
    n_out probe points searched for the opposite label."""

    n_c: int
    n_in: int = 16
    n_out: int = 64
    d_in: float = 0.1
    d_out: float = 0.5

    def __post_init__(self):
        if min(self.n_c, self.n_in, self.n_out) < 1:
            raise ValueError("n_c, n_in and n_out must be >= 1")
        if self.d_in <= 0 or self.d_out <= 0:
            raise ValueError("d_in and d_out must be positive")
        if self.d_in > self.d_out:
            raise ValueError("d_in must not exceed d_out")


@dataclass
class SignedSample:
    """One labelled query: teacher label, estimated boundary distance, and
    (once alpha-transformed) the regression target."""

    x: np.ndarray
    label: int
    xi: float
    saturated: bool
    target: float | None = None


class SignedDataset:
    """Columnar set of signed samples; rows index as SignedSample views."""

    def __init__(self, xs, labels, xi, saturated, targets=None):
        self.xs = np.ascontiguousarray(xs, dtype=np.float64)
        self.labels = np.asarray(labels, dtype=np.int64)
        self.xi = np.asarray(xi, dtype=np.float64)
        self.saturated = np.asarray(saturated, dtype=bool)
        self.targets = None if targets is None else np.asarray(targets, dtype=np.float64)
        n = self.xs.shape[0]
        if not (self.labels.shape[0] == self.xi.shape[0] == self.saturated.shape[0] == n):
            raise ValueError("column lengths disagree")
        if (self.xi < 0).any():
            raise ValueError("distances must be non-negative")

    def __len__(self):
        return self.xs.shape[0]

    @property
    def dim(self):
        return self.xs.shape[1]

    def __getitem__(self, i):
        t = None if self.targets is None else float(self.targets[i])
        return SignedSample(self.xs[i], int(self.labels[i]), float(self.xi[i]),
                            bool(self.saturated[i]), t)

    def __eq__(self, other):
        if not isinstance(other, SignedDataset):
            return NotImplemented
        same_targets = (
            (self.targets is None and other.targets is None)
            or (self.targets is not None and other.targets is not None
                and np.array_equal(self.targets, other.targets))
        )
        return (np.array_equal(self.xs, other.xs)
                and np.array_equal(self.labels, other.labels)
                and np.array_equal(self.xi, other.xi)
                and np.array_equal(self.saturated, other.saturated)
                and same_targets)

    def save_csv(self, path):
        cols = [f"x{i}" for i in range(self.dim)] + ["label", "xi", "saturated", "target"]
        targets = self.targets
        if targets is None:
            targets = np.full(len(self), np.nan)
        stack = np.column_stack(
            [self.xs, self.labels, self.xi, self.saturated.astype(int), targets]
        )
        np.savetxt(path, stack, fmt="%.17g", delimiter=",", header=",".join(cols),
                   comments="")

    @classmethod
    def load_csv(cls, path):
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        dim = data.shape[1] - 4
        targets = data[:, dim + 3]
        if np.isnan(targets).all():
            targets = None
        return cls(data[:, :dim], data[:, dim].astype(np.int64), data[:, dim + 1],
                   data[:, dim + 2] != 0, targets)


def estimate_distances_refining(oracle, queries, params, seed):
    """Per-query iterative search for the nearest opposite-label point.

    One shared radius-uniform ball cloud is drawn up front. For each query z
    the cloud is centred on the current point c and scaled (d_max on the
    first pass, d_min after); the closest ball point whose label differs
    from c's becomes the new centre. Queries whose first pass finds no
    opposite label saturate at d_max. A later pass finding none stops the
    refinement early and keeps the current estimate. The final distance is
    measured from the last centre back to z.
    """
    pts = queries.points if isinstance(queries, PointCloud) else np.asarray(queries, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[0] == 0:
        raise ValueError("queries must be a non-empty n x d matrix")
    if pts.shape[1] != oracle.dim:
        raise ValueError(f"queries have dim {pts.shape[1]}, oracle expects {oracle.dim}")
    n, dim = pts.shape

    ball = unit_ball_cloud(dim, params.m, seed).points
    ball_norms = np.ascontiguousarray(np.linalg.norm(ball, axis=1))

    labels = oracle.classify(pts)
    xi = np.empty(n)
    saturated = np.zeros(n, dtype=bool)
    for i in range(n):
        z = pts[i]
        c = z
        c_label = int(labels[i])
        for it in range(params.it_max):
            radius = params.d_max if it == 0 else params.d_min
            candidates = c + radius * ball
            try:
                cand_labels = oracle.classify(candidates)
            except Exception as exc:
                _reraise_with_index(exc, "query", i)
            # candidates are centred on c, so distance-to-c is radius*|b|
            j, _ = kernels.masked_argmin(ball_norms, cand_labels, c_label)
            if j < 0:
                if it == 0:
                    saturated[i] = True
                break
            c = candidates[j]
            c_label = int(cand_labels[j])
        xi[i] = params.d_max if saturated[i] else float(np.linalg.norm(c - z))
    return SignedDataset(pts, labels, xi, saturated)


def build_clustered_dataset(oracle, region, params, seed, centers_mode="sobol"):
    """Label n_c clusters in one batch each and emit n_c*n_in signed samples.

    Inner and outer ball clouds are drawn once and translated to every
    centre, so inner-to-outer distances are precomputed a single time. Each
    inner point takes the distance to the closest opposite-label outer
    point (ties to the lowest outer index), or saturates at d_out when the
    whole outer cloud agrees with it.
    """
    if region.dim != oracle.dim:
        raise ValueError(f"region dim {region.dim} != oracle dim {oracle.dim}")
    dim = region.dim
    rng = rng_for(seed)
    center_seed, in_seed, out_seed = (int(s) for s in
                                      rng.integers(1, 2**62, size=3))
    centers = region_points(region, params.n_c, center_seed, mode=centers_mode).points
    b_in = unit_ball_cloud(dim, params.n_in, in_seed).points * params.d_in
    b_out = unit_ball_cloud(dim, params.n_out, out_seed).points * params.d_out

    # translation-invariant: d(c+p, c+y) = d(p, y)
    dist2 = np.ascontiguousarray(cdist(b_in, b_out, "sqeuclidean"))

    total = params.n_c * params.n_in
    xs = np.empty((total, dim))
    labels = np.empty(total, dtype=np.int64)
    xi = np.empty(total)
    saturated = np.empty(total, dtype=bool)
    for k in range(params.n_c):
        c = centers[k]
        batch = np.vstack([c + b_in, c + b_out])
        try:
            batch_labels = oracle.classify(batch)
        except Exception as exc:
            _reraise_with_index(exc, "cluster", k)
        in_labels = np.ascontiguousarray(batch_labels[:params.n_in])
        out_labels = np.ascontiguousarray(batch_labels[params.n_in:])
        idx, best = kernels.masked_argmin_pairs(dist2, in_labels, out_labels)
        row = slice(k * params.n_in, (k + 1) * params.n_in)
        xs[row] = c + b_in
        labels[row] = in_labels
        found = idx >= 0
        xi[row] = np.where(found, np.sqrt(best, where=found, out=np.zeros_like(best)),
                           params.d_out)
        saturated[row] = ~found
    return SignedDataset(xs, labels, xi, saturated)


def alpha_transform(dataset, alpha):
    """Fill targets with label * xi**alpha (0**0 := 1, so alpha=0 reproduces
    the hard labels exactly). Returns the same dataset."""
    if alpha < 0:
        raise ValueError("alpha must be >= 0")
    dataset.targets = dataset.labels * dataset.xi ** alpha
    return dataset


@dataclass
class HolderReport:
    alpha: float
    diameter: float
    pairs_checked: int
    violations: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.violations


def check_holder_bounds(eval_fn, xs, ys, alpha, diameter):
    """Check the smoothness bound of alpha-exponentiated signed distances
    over point pairs (xs[i], ys[i]).

    Bound: 2*d(x,y)**alpha for alpha <= 1, 2*alpha*D**(alpha-1)*d(x,y) for
    alpha >= 1 (both coincide at alpha = 1). Pairs beating the bound by more
    than 1e-9 are recorded as violations.
    """
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    if diameter <= 0:
        raise ValueError("diameter must be positive")
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    if xs.shape != ys.shape or xs.ndim != 2:
        raise ValueError("xs and ys must be equal-shape n x d matrices")
    d = np.linalg.norm(xs - ys, axis=1)
    lhs = np.abs(np.asarray(eval_fn(xs)) - np.asarray(eval_fn(ys)))
    if alpha <= 1:
        bound = 2.0 * d ** alpha
    else:
        bound = 2.0 * alpha * diameter ** (alpha - 1.0) * d
    report = HolderReport(alpha=alpha, diameter=diameter, pairs_checked=xs.shape[0])
    for i in np.nonzero(lhs > bound + HOLDER_SLACK)[0]:
        report.violations.append((xs[i], ys[i], float(lhs[i]), float(bound[i])))
    return report


def analytic_signed_distance(oracle, points):
    """Exact signed boundary distance for the analytic oracles; the sign
    matches the oracle's label convention (positive side labels +1)."""
    points = np.asarray(points, dtype=np.float64)
    single = points.ndim == 1
    pts = np.atleast_2d(points)
    if isinstance(oracle, HyperplaneOracle):
        out = (pts @ oracle.w + oracle.b) / np.linalg.norm(oracle.w)
    elif isinstance(oracle, SphereOracle):
        out = oracle.radius - np.linalg.norm(pts - oracle.center, axis=1)
    else:
        raise ValueError(f"no analytic distance for oracle kind {oracle.kind!r}")
    return float(out[0]) if single else out


def exact_alpha_targets(oracle, alpha):
    """x -> label * |signed distance|**alpha with exact analytic distances."""
    def eval_fn(points):
        sd = analytic_signed_distance(oracle, points)
        return oracle.classify(points) * np.abs(sd) ** alpha
    return eval_fn


def save_manifest(path, *, algo, params, seed, budget, oracle_name, region=None,
                  extra=None):
    doc = {
        "algo": algo,
        "params": {k: (float(v) if isinstance(v, float) else v)
                   for k, v in vars(params).items()},
        "seed": seed,
        "budget": {"calls": budget.calls, "batches": budget.batches},
        "oracle": oracle_name,
    }
    if region is not None:
        doc["region"] = {"lower": region.lower.tolist(), "upper": region.upper.tolist()}
    if extra:
        doc.update(extra)
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
