"""Config-driven experiment runs: budget sweeps, alpha sweeps, distance
quality, all reported as one cell per (seed, budget-or-alpha) with
deterministic CSV output.

Oracle calls spent on labelling are metered through a counting wrapper;
evaluation queries go to the raw teacher so reported budgets reflect the
copying cost alone.
"""

import json
import time
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from .datasets import generate_synthetic_dataset, load_dataset_csv
from .distances import (ClusterParams, RefiningParams, SignedDataset,
                        alpha_transform, analytic_signed_distance,
                        build_clustered_dataset, estimate_distances_refining)
from .metrics import (ZeroBaselineError, accuracy, distance_error_report,
                      relative_difference)
from .oracle import (connect_remote_oracle, fit_nearest_neighbor_teacher,
                     make_analytic_oracle, with_counting)
from .sampling import Region, derive_seed, region_points, uniform_box
from .students import (GbrtSpec, MlpSpec, TrainConfig, predict_labels,
                       predict_values, train_gbrt, train_mlp)

ALGOS = ("alg1", "alg2", "hard")


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    oracle: dict
    algo: str = "alg2"
    algo_params: dict = field(default_factory=dict)
    region: dict | None = None
    alphas: list = field(default_factory=lambda: [1.0])
    student: dict = field(default_factory=lambda: {"kind": "mlp", "widths": [32, 16, 1]})
    train: dict = field(default_factory=dict)
    budgets: list = field(default_factory=lambda: [1000])
    seeds: list = field(default_factory=lambda: [0])
    eval_fidelity_n: int = 100_000
    eval_distance_n: int = 10_000
    eval_test_subset_n: int = 1_000
    time_cap_seconds: float = 240.0
    include_hard_baseline: bool = True
    centers_mode: str = "sobol"

    def __post_init__(self):
        if self.algo not in ALGOS:
            raise ConfigError(f"algo must be one of {ALGOS}, got {self.algo!r}")
        if not self.seeds:
            raise ConfigError("at least one seed required")
        if any(int(s) < 0 for s in self.seeds):
            raise ConfigError("seeds must be non-negative")
        if not self.budgets:
            raise ConfigError("budgets must be non-empty")
        if list(self.budgets) != sorted(set(int(b) for b in self.budgets)):
            raise ConfigError("budgets must be strictly increasing")
        if any(float(a) < 0 for a in self.alphas):
            raise ConfigError("alphas must be >= 0")
        if self.centers_mode not in ("sobol", "uniform"):
            raise ConfigError("centers_mode must be sobol or uniform")

    @classmethod
    def from_dict(cls, doc):
        known = {f.name for f in fields(cls)}
        unknown = set(doc) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        try:
            return cls(**doc)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc

    @classmethod
    def load(cls, path):
        try:
            with open(path) as fh:
                doc = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"{path}: {exc}") from exc
        return cls.from_dict(doc)


@dataclass
class Cell:
    experiment: str
    seed: int
    algo: str
    budget: int | None = None
    alpha: float | str | None = None
    eval_set: str | None = None
    status: str = "ok"
    timeout_phase: str | None = None
    n_points: int | None = None
    oracle_calls: int | None = None
    fidelity_error: float | None = None
    accuracy: float | None = None
    mae: float | None = None
    rmse: float | None = None
    rel_fidelity_pct: float | str | None = None
    rel_accuracy_err_pct: float | str | None = None
    wall_seconds: float | None = None
    scatter: list | None = None


@dataclass
class RunReport:
    kind: str
    config: dict
    cells: list

    def to_json(self):
        return json.dumps(
            {"kind": self.kind, "config": self.config,
             "cells": [asdict(c) for c in self.cells]},
            indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text):
        doc = json.loads(text)
        return cls(doc["kind"], doc["config"], [Cell(**c) for c in doc["cells"]])


# --- oracle / region / student resolution ------------------------------------


def build_problem(cfg):
    """Resolve (teacher oracle, region, test set or None) from the config."""
    spec = dict(cfg.oracle)
    kind = spec.pop("kind", None)
    test = None
    if kind in ("hyperplane", "sphere"):
        oracle = make_analytic_oracle(kind, **spec)
    elif kind == "nearest-neighbor":
        if "dataset" in spec:
            ds = generate_synthetic_dataset(
                spec["dataset"]["kind"], int(spec["dataset"]["n"]),
                int(spec["dataset"].get("seed", 0)),
                float(spec["dataset"].get("noise", 0.0)))
            oracle = fit_nearest_neighbor_teacher(ds.x_train, ds.y_train)
            test = (ds.x_test, ds.y_test)
        elif "data" in spec:
            x, y = load_dataset_csv(spec["data"])
            oracle = fit_nearest_neighbor_teacher(x, y)
            if "test" in spec:
                test = load_dataset_csv(spec["test"])
        else:
            raise ConfigError("nearest-neighbor oracle needs 'dataset' or 'data'")
    elif kind == "remote":
        oracle = connect_remote_oracle(spec["endpoint"], int(spec["dim"]))
    else:
        raise ConfigError(f"unknown oracle kind {kind!r}")

    if cfg.region is not None:
        region = Region(np.asarray(cfg.region["lower"], dtype=float),
                        np.asarray(cfg.region["upper"], dtype=float))
    elif kind == "nearest-neighbor":
        region = Region.bounding(oracle.train_x)
    else:
        region = Region.cube(oracle.dim)
    if region.dim != oracle.dim:
        raise ConfigError(f"region dim {region.dim} != oracle dim {oracle.dim}")
    return oracle, region, test


def resolve_refining_params(algo_params, region):
    d_max = float(algo_params.get("d_max", region.diameter))
    return RefiningParams(
        d_max=d_max,
        d_min=float(algo_params.get("d_min", 0.05 * d_max)),
        it_max=int(algo_params.get("it_max", 5)),
        m=int(algo_params.get("m", 200)),
    )


def resolve_cluster_params(algo_params, region, n_points):
    n_in = int(algo_params.get("n_in", 16))
    return ClusterParams(
        n_c=max(1, n_points // n_in),
        n_in=n_in,
        n_out=int(algo_params.get("n_out", 64)),
        d_in=float(algo_params.get("d_in", 0.05 * region.diameter)),
        d_out=float(algo_params.get("d_out", 0.25 * region.diameter)),
    )


def label_dataset(oracle, region, algo, algo_params, n_points, seed,
                  centers_mode="sobol"):
    """Produce a signed dataset of about n_points samples with the chosen
    labelling algorithm. 'hard' labels translated-Sobol points directly
    (xi = 1 so alpha-transforms stay label-valued)."""
    if algo == "alg1":
        params = resolve_refining_params(algo_params, region)
        queries = region_points(region, n_points, derive_seed(seed, "queries"),
                                mode=centers_mode)
        return estimate_distances_refining(oracle, queries, params,
                                           derive_seed(seed, "ball"))
    if algo == "alg2":
        params = resolve_cluster_params(algo_params, region, n_points)
        return build_clustered_dataset(oracle, region, params,
                                       derive_seed(seed, "clusters"),
                                       centers_mode=centers_mode)
    if algo == "hard":
        pts = region_points(region, n_points, derive_seed(seed, "queries"),
                            mode=centers_mode).points
        labels = oracle.classify(pts)
        return SignedDataset(pts, labels, np.ones(len(labels)),
                             np.zeros(len(labels), dtype=bool))
    raise ConfigError(f"unknown algo {algo!r}")


def build_student_spec(student, seed):
    kind = student.get("kind", "mlp")
    if kind == "mlp":
        return MlpSpec(student.get("widths", [32, 16, 1]),
                       init_seed=derive_seed(seed, "init"))
    if kind == "gbrt":
        return GbrtSpec(
            n_stages=int(student.get("n_stages", 100)),
            learning_rate=float(student.get("learning_rate", 0.1)),
            max_leaves=int(student.get("max_leaves", 31)),
            min_samples_leaf=int(student.get("min_samples_leaf", 20)),
        )
    raise ConfigError(f"unknown student kind {kind!r}")


def train_student(dataset, student, train_cfg, seed):
    spec = build_student_spec(student, seed)
    if isinstance(spec, MlpSpec):
        cfg = TrainConfig(
            learning_rate=float(train_cfg.get("learning_rate", 0.001)),
            batch_size=int(train_cfg.get("batch_size", 32)),
            epochs=train_cfg.get("epochs", "auto"),
            shuffle_seed=derive_seed(seed, "shuffle"),
        )
        return train_mlp(dataset, spec, cfg)
    return train_gbrt(dataset, spec)


def hard_targets(dataset):
    dataset.targets = dataset.labels.astype(np.float64)
    return dataset


# --- sweep drivers ------------------------------------------------------------


def _evaluate(model, oracle, eval_pts, oracle_eval_labels, test):
    copy_labels = predict_labels(model, eval_pts)
    fid = float(np.mean(copy_labels != oracle_eval_labels))
    acc = accuracy(model, test[0], test[1]) if test is not None else None
    return fid, acc


def _eval_points(region, cfg, seed):
    return uniform_box(region, cfg.eval_fidelity_n,
                       derive_seed(seed, "fidelity-eval")).points


def run_budget_sweep(cfg):
    """Fidelity/accuracy as the synthetic budget grows, alpha fixed at 1,
    with a hard-label baseline alongside unless disabled."""
    oracle, region, test = build_problem(cfg)
    algos = [cfg.algo] + (["hard"] if cfg.include_hard_baseline and cfg.algo != "hard" else [])
    cells = []
    for seed in (int(s) for s in cfg.seeds):
        eval_pts = _eval_points(region, cfg, seed)
        eval_labels = oracle.classify(eval_pts)
        for algo in algos:
            for budget in (int(b) for b in cfg.budgets):
                cells.append(_budget_cell(cfg, oracle, region, test, seed, algo,
                                          budget, eval_pts, eval_labels))
    return RunReport("budget-sweep", asdict(cfg), cells)


def _budget_cell(cfg, oracle, region, test, seed, algo, budget, eval_pts,
                 eval_labels):
    cell = Cell("budget-sweep", seed, algo, budget=budget,
                alpha=None if algo == "hard" else 1.0)
    counting = with_counting(oracle)
    start = time.monotonic()
    dataset = label_dataset(counting, region, algo, cfg.algo_params, budget,
                            derive_seed(seed, algo, budget),
                            centers_mode=cfg.centers_mode)
    cell.n_points = len(dataset)
    cell.oracle_calls = counting.budget.calls
    if time.monotonic() - start > cfg.time_cap_seconds:
        cell.status, cell.timeout_phase = "timeout", "label"
        cell.wall_seconds = time.monotonic() - start
        return cell
    if algo == "hard":
        hard_targets(dataset)
    else:
        alpha_transform(dataset, 1.0)
    model = train_student(dataset, cfg.student, cfg.train, seed)
    cell.wall_seconds = time.monotonic() - start
    if cell.wall_seconds > cfg.time_cap_seconds:
        cell.status, cell.timeout_phase = "timeout", "train"
        return cell
    cell.fidelity_error, cell.accuracy = _evaluate(model, oracle, eval_pts,
                                                   eval_labels, test)
    return cell


def run_alpha_sweep(cfg):
    """One labelling pass per seed, reused for every alpha; a hard-label
    baseline trained on the same points anchors the relative differences."""
    oracle, region, test = build_problem(cfg)
    n_points = int(cfg.budgets[-1])
    cells = []
    for seed in (int(s) for s in cfg.seeds):
        eval_pts = _eval_points(region, cfg, seed)
        eval_labels = oracle.classify(eval_pts)
        counting = with_counting(oracle)
        t_label0 = time.monotonic()
        dataset = label_dataset(counting, region, cfg.algo, cfg.algo_params,
                                n_points, derive_seed(seed, cfg.algo, n_points),
                                centers_mode=cfg.centers_mode)
        label_seconds = time.monotonic() - t_label0
        calls = counting.budget.calls

        def run_one(alpha_key):
            cell = Cell("alpha-sweep", seed, cfg.algo, budget=n_points,
                        alpha=alpha_key, n_points=len(dataset),
                        oracle_calls=calls)
            if alpha_key == "hard":
                hard_targets(dataset)
            else:
                alpha_transform(dataset, float(alpha_key))
            start = time.monotonic()
            if label_seconds > cfg.time_cap_seconds:
                cell.status, cell.timeout_phase = "timeout", "label"
                cell.wall_seconds = label_seconds
                return cell
            model = train_student(dataset, cfg.student, cfg.train, seed)
            cell.wall_seconds = label_seconds + time.monotonic() - start
            if cell.wall_seconds > cfg.time_cap_seconds:
                cell.status, cell.timeout_phase = "timeout", "train"
                return cell
            cell.fidelity_error, cell.accuracy = _evaluate(
                model, oracle, eval_pts, eval_labels, test)
            return cell

        baseline = run_one("hard")
        cells.append(baseline)
        for alpha in cfg.alphas:
            cell = run_one(float(alpha))
            _fill_relative(cell, baseline)
            cells.append(cell)
        if counting.budget.calls != calls:
            raise RuntimeError("alpha cells must not issue extra oracle calls")
    return RunReport("alpha-sweep", asdict(cfg), cells)


def _fill_relative(cell, baseline):
    if cell.status != "ok" or baseline.status != "ok":
        return
    try:
        cell.rel_fidelity_pct = relative_difference(cell.fidelity_error,
                                                    baseline.fidelity_error)
    except ZeroBaselineError:
        cell.rel_fidelity_pct = "baseline-zero"
    if cell.accuracy is not None and baseline.accuracy is not None:
        try:
            cell.rel_accuracy_err_pct = relative_difference(
                1.0 - cell.accuracy, 1.0 - baseline.accuracy)
        except ZeroBaselineError:
            cell.rel_accuracy_err_pct = "baseline-zero"


def run_distance_quality(cfg):
    """Train at alpha = 1 and compare the magnitude of the student's output
    against ground-truth boundary distances on a uniform set and on a
    subset of the test data."""
    oracle, region, test = build_problem(cfg)
    n_points = int(cfg.budgets[-1])
    analytic = cfg.oracle.get("kind") in ("hyperplane", "sphere")
    cells = []
    for seed in (int(s) for s in cfg.seeds):
        counting = with_counting(oracle)
        start = time.monotonic()
        dataset = label_dataset(counting, region, cfg.algo, cfg.algo_params,
                                n_points, derive_seed(seed, cfg.algo, n_points),
                                centers_mode=cfg.centers_mode)
        calls = counting.budget.calls
        if time.monotonic() - start > cfg.time_cap_seconds:
            cells.append(Cell("distance-quality", seed, cfg.algo,
                              budget=n_points, alpha=1.0, status="timeout",
                              timeout_phase="label", n_points=len(dataset),
                              oracle_calls=calls,
                              wall_seconds=time.monotonic() - start))
            continue
        alpha_transform(dataset, 1.0)
        model = train_student(dataset, cfg.student, cfg.train, seed)
        wall = time.monotonic() - start
        if wall > cfg.time_cap_seconds:
            cells.append(Cell("distance-quality", seed, cfg.algo,
                              budget=n_points, alpha=1.0, status="timeout",
                              timeout_phase="train", n_points=len(dataset),
                              oracle_calls=calls, wall_seconds=wall))
            continue

        eval_sets = {"uniform": uniform_box(region, cfg.eval_distance_n,
                                            derive_seed(seed, "dist-eval")).points}
        if test is not None:
            eval_sets["test_subset"] = test[0][:cfg.eval_test_subset_n]
        for set_name, pts in eval_sets.items():
            truth = _ground_truth_distances(oracle, region, pts, calls, analytic,
                                            derive_seed(seed, "truth", set_name))
            pred = np.abs(predict_values(model, pts))
            rep = distance_error_report(pred, truth)
            cells.append(Cell(
                "distance-quality", seed, cfg.algo, budget=n_points, alpha=1.0,
                eval_set=set_name, n_points=len(dataset), oracle_calls=calls,
                mae=rep.mae, rmse=rep.rmse, wall_seconds=wall,
                scatter=[[float(t), float(p)] for t, p in zip(truth, pred)]))
    return RunReport("distance-quality", asdict(cfg), cells)


def _ground_truth_distances(oracle, region, pts, labelling_calls, analytic, seed):
    if analytic:
        return np.abs(analytic_signed_distance(oracle, pts))
    # spend ~10x the labelling budget on a refining-search reference
    it_max = 5
    m = max(50, int(round(10.0 * labelling_calls / (len(pts) * it_max))))
    params = RefiningParams(d_max=region.diameter, d_min=0.05 * region.diameter,
                            it_max=it_max, m=m)
    ref = estimate_distances_refining(oracle, pts, params, seed)
    return ref.xi


# --- report emission ----------------------------------------------------------

CURVE_COLUMNS = ("experiment", "seed", "algo", "budget", "alpha", "eval_set",
                 "status", "n_points", "oracle_calls", "fidelity_error",
                 "accuracy", "mae", "rmse", "rel_fidelity_pct",
                 "rel_accuracy_err_pct")


def _fmt(value):
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def emit_report(report, out_dir):
    """Write report.json (round-trips to an equal RunReport), curves.csv
    (one row per cell, no timing columns, byte-stable across reruns) and
    scatter_*.csv files for cells that carry scatter pairs."""
    import os
    os.makedirs(out_dir, exist_ok=True)
    paths = {"report": os.path.join(out_dir, "report.json"),
             "curves": os.path.join(out_dir, "curves.csv")}
    with open(paths["report"], "w") as fh:
        fh.write(report.to_json())
        fh.write("\n")
    with open(paths["curves"], "w") as fh:
        fh.write(",".join(CURVE_COLUMNS) + "\n")
        for cell in report.cells:
            fh.write(",".join(_fmt(getattr(cell, col)) for col in CURVE_COLUMNS) + "\n")
    for cell in report.cells:
        if cell.scatter:
            name = f"scatter_{cell.experiment}_{cell.seed}_{cell.eval_set}.csv"
            path = os.path.join(out_dir, name)
            with open(path, "w") as fh:
                fh.write("truth,prediction\n")
                for t, p in cell.scatter:
                    fh.write(f"{_fmt(t)},{_fmt(p)}\n")
            paths[name] = path
    return paths


def load_report(path):
    with open(path) as fh:
        return RunReport.from_json(fh.read())
