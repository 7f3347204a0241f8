"""Point generators: translated Sobol sequences, uniform boxes, ball clouds.

All generators are pure functions of (parameters, seed). Randomness comes
from numpy's counter-based Philox generator so that output is identical
across platforms for a fixed numpy version.
"""

from dataclasses import dataclass
from importlib import resources

import numpy as np

MAX_SOBOL_DIM = 64
_SOBOL_BITS = 30


def rng_for(seed):
    """Counter-based generator, one per operation."""
    return np.random.Generator(np.random.Philox(key=np.uint64(seed)))


def derive_seed(seed, *tags):
    """Stable sub-seed for a namespaced purpose ('label', 'init', ...)."""
    entropy = [int(seed)] + [
        t if isinstance(t, int) else int.from_bytes(str(t).encode(), "little")
        for t in tags
    ]
    return int(np.random.SeedSequence(entropy).generate_state(1)[0])


@dataclass(frozen=True)
class Region:
    """Axis-aligned box: the operational space queries are drawn from."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lower = np.asarray(self.lower, dtype=np.float64)
        upper = np.asarray(self.upper, dtype=np.float64)
        if lower.ndim != 1 or lower.shape != upper.shape:
            raise ValueError("lower and upper must be 1-D vectors of equal length")
        if not np.all(lower < upper):
            raise ValueError("region requires lower[i] < upper[i] for all i")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @property
    def dim(self):
        return self.lower.shape[0]

    @property
    def diameter(self):
        return float(np.linalg.norm(self.upper - self.lower))

    def contains(self, points):
        points = np.asarray(points)
        return np.all((points >= self.lower) & (points <= self.upper), axis=-1)

    @classmethod
    def cube(cls, dim, lo=-1.0, hi=1.0):
        return cls(np.full(dim, float(lo)), np.full(dim, float(hi)))

    @classmethod
    def bounding(cls, points, inflate=0.10):
        """Bounding box of a dataset, inflated by `inflate` per side."""
        points = np.asarray(points, dtype=np.float64)
        lo = points.min(axis=0)
        hi = points.max(axis=0)
        pad = inflate * np.maximum(hi - lo, 1e-12)
        return cls(lo - pad, hi + pad)


@dataclass(frozen=True)
class PointCloud:
    points: np.ndarray
    provenance: str

    def __post_init__(self):
        pts = np.ascontiguousarray(self.points, dtype=np.float64)
        if pts.ndim != 2:
            raise ValueError("points must be an n x d matrix")
        if not np.all(np.isfinite(pts)):
            raise ValueError("points must be finite")
        object.__setattr__(self, "points", pts)

    def __len__(self):
        return self.points.shape[0]

    @property
    def dim(self):
        return self.points.shape[1]

    def save_csv(self, path):
        np.savetxt(path, self.points, fmt="%.17g", delimiter=",")

    @classmethod
    def load_csv(cls, path, provenance="file"):
        pts = np.loadtxt(path, delimiter=",", ndmin=2)
        return cls(pts, provenance)


def _load_direction_numbers():
    """Parse the bundled Joe-Kuo initialisation table (dims 2..64)."""
    text = resources.files("bcopy").joinpath("joe_kuo_directions.txt").read_text()
    table = {}
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#") or line.startswith("d "):
            continue
        parts = line.split()
        dim, s, a = int(parts[0]), int(parts[1]), int(parts[2])
        m = [int(x) for x in parts[3:3 + s]]
        table[dim] = (s, a, m)
    return table

_DIRECTIONS = _load_direction_numbers()


def _direction_integers(dim):
    """Direction integers V[j][k] (nbits columns) for dims 0..dim-1."""
    V = np.zeros((dim, _SOBOL_BITS + 1), dtype=np.uint64)
    for k in range(1, _SOBOL_BITS + 1):
        V[0, k] = 1 << (_SOBOL_BITS - k)
    for j in range(1, dim):
        s, a, m = _DIRECTIONS[j + 1]
        for k in range(1, min(s, _SOBOL_BITS) + 1):
            V[j, k] = m[k - 1] << (_SOBOL_BITS - k)
        for k in range(s + 1, _SOBOL_BITS + 1):
            vk = V[j, k - s] ^ (V[j, k - s] >> np.uint64(s))
            for i in range(1, s):
                if (a >> (s - 1 - i)) & 1:
                    vk ^= V[j, k - i]
            V[j, k] = vk
    return V


def sobol_sequence(dim, n, shift_seed=0):
    """First n points of the Sobol sequence in [0,1)^dim, Gray-code order.

    shift_seed != 0 applies a Cranley-Patterson rotation: a seeded uniform
    shift added mod 1, so the translated set keeps the low-discrepancy
    structure while varying across runs. shift_seed = 0 is the raw sequence.
    """
    if not 1 <= dim <= MAX_SOBOL_DIM:
        raise ValueError(f"sobol dimension must be in [1, {MAX_SOBOL_DIM}], got {dim}")
    if n < 0:
        raise ValueError("n must be >= 0")
    V = _direction_integers(dim)
    out = np.empty((n, dim), dtype=np.float64)
    state = np.zeros(dim, dtype=np.uint64)
    scale = 1.0 / (1 << _SOBOL_BITS)
    for i in range(n):
        out[i] = state * scale
        # lowest zero bit of i selects the direction column
        c, ii = 1, i
        while ii & 1:
            ii >>= 1
            c += 1
        state ^= V[:, c]
    provenance = f"sobol(shift_seed={shift_seed})"
    if shift_seed != 0:
        shift = rng_for(shift_seed).random(dim)
        out = (out + shift) % 1.0
    return PointCloud(out, provenance)


def map_to_region(cloud, region):
    """Affine map of a [0,1)^d cloud onto a region."""
    if cloud.dim != region.dim:
        raise ValueError(f"cloud dim {cloud.dim} != region dim {region.dim}")
    pts = region.lower + cloud.points * (region.upper - region.lower)
    return PointCloud(pts, cloud.provenance + "->region")


def unit_ball_cloud(dim, m, seed):
    """m points r*u with u uniform on the unit sphere and r ~ U[0,1].

    The radius-uniform law concentrates points near the centre, which keeps
    the relative error of short boundary distances small.
    """
    if dim < 1:
        raise ValueError("dim must be >= 1")
    if m < 0:
        raise ValueError("m must be >= 0")
    rng = rng_for(seed)
    u = rng.standard_normal((m, dim))
    norms = np.linalg.norm(u, axis=1, keepdims=True)
    norms[norms == 0.0] = 1.0
    r = rng.random((m, 1))
    return PointCloud(u / norms * r, f"ball(seed={seed}, scale=1)")


def uniform_box(region, n, seed):
    """n i.i.d. uniform samples in the region."""
    if n < 0:
        raise ValueError("n must be >= 0")
    pts = rng_for(seed).random((n, region.dim))
    pts = region.lower + pts * (region.upper - region.lower)
    return PointCloud(pts, f"uniform(seed={seed})")


def region_points(region, n, seed, mode="sobol"):
    """Sample a region either by translated Sobol or uniformly."""
    if mode == "sobol":
        return map_to_region(sobol_sequence(region.dim, n, shift_seed=seed), region)
    if mode == "uniform":
        return uniform_box(region, n, seed)
    raise ValueError(f"unknown sampling mode {mode!r}")
