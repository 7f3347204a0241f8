"""Command-line front end.

Exit codes: 0 success, 2 configuration problem, 3 oracle transport failure.
Oracle and student specs are JSON strings, or @file.json references.
"""

import argparse
import json
import sys

import numpy as np

from . import harness
from .datasets import KINDS, generate_synthetic_dataset, load_dataset_csv, save_dataset_csv
from .distances import SignedDataset, alpha_transform, exact_alpha_targets, check_holder_bounds, save_manifest
from .harness import ConfigError, ExperimentConfig, build_problem, emit_report, label_dataset
from .metrics import accuracy, empirical_fidelity
from .oracle import ProtocolError, TransportError, with_counting
from .sampling import uniform_box
from .students import load_model, save_model
from .harness import hard_targets, train_student


def _load_json_arg(text, what):
    try:
        if text.startswith("@"):
            with open(text[1:]) as fh:
                return json.load(fh)
        return json.loads(text)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"bad {what} spec: {exc}") from exc


def _mini_config(oracle_spec, region_spec):
    doc = {"oracle": oracle_spec}
    if region_spec:
        doc["region"] = region_spec
    return ExperimentConfig.from_dict(doc)


def cmd_gen_data(args):
    ds = generate_synthetic_dataset(args.kind, args.n, args.seed, args.noise)
    save_dataset_csv(args.out + ".train.csv", ds.x_train, ds.y_train)
    save_dataset_csv(args.out + ".test.csv", ds.x_test, ds.y_test)
    print(f"wrote {args.out}.train.csv ({len(ds.y_train)} rows) and "
          f"{args.out}.test.csv ({len(ds.y_test)} rows)")


def cmd_label(args):
    oracle_spec = _load_json_arg(args.oracle, "oracle")
    region_spec = _load_json_arg(args.region, "region") if args.region else None
    cfg = _mini_config(oracle_spec, region_spec)
    oracle, region, _ = build_problem(cfg)
    try:
        counting = with_counting(oracle)
        dataset = label_dataset(counting, region, args.algo,
                                _load_json_arg(args.algo_params, "algo-params")
                                if args.algo_params else {},
                                args.n, args.seed)
        if args.algo == "hard":
            hard_targets(dataset)
        else:
            alpha_transform(dataset, args.alpha)
        dataset.save_csv(args.out)
        params = (harness.resolve_refining_params({}, region) if args.algo == "alg1"
                  else harness.resolve_cluster_params({}, region, args.n))
        save_manifest(args.out + ".manifest.json", algo=args.algo, params=params,
                      seed=args.seed, budget=counting.budget,
                      oracle_name=oracle.name, region=region,
                      extra={"alpha": args.alpha, "n_points": len(dataset)})
        print(f"wrote {len(dataset)} samples to {args.out} "
              f"({counting.budget.calls} oracle calls)")
    finally:
        oracle.close()


def cmd_train(args):
    student = _load_json_arg(args.student, "student")
    dataset = SignedDataset.load_csv(args.data)
    if dataset.targets is None:
        hard_targets(dataset)
    train_keys = {"learning_rate", "batch_size", "epochs"}
    train_cfg = {k: v for k, v in student.items() if k in train_keys}
    model = train_student(dataset, student, train_cfg, int(student.get("seed", 0)))
    save_model(model, args.out)
    print(f"trained {model.kind} on {len(dataset)} samples -> {args.out}")


def cmd_eval(args):
    oracle_spec = _load_json_arg(args.oracle, "oracle")
    region_spec = _load_json_arg(args.region, "region") if args.region else None
    cfg = _mini_config(oracle_spec, region_spec)
    oracle, region, test = build_problem(cfg)
    try:
        model = load_model(args.model)
        eval_pts = uniform_box(region, args.eval_n, args.seed)
        fid = empirical_fidelity(model, oracle, eval_pts)
        out = {"fidelity_error": fid.error, "n_eval": fid.n_eval}
        if args.test:
            x, y = load_dataset_csv(args.test)
            out["accuracy"] = accuracy(model, x, y)
        elif test is not None:
            out["accuracy"] = accuracy(model, test[0], test[1])
        print(json.dumps(out, indent=2, sort_keys=True))
    finally:
        oracle.close()


def _run_sweep(args, runner, kind):
    cfg = ExperimentConfig.load(args.config)
    report = runner(cfg)
    paths = emit_report(report, args.out or f"run-{kind}")
    print(f"wrote {paths['report']} and {paths['curves']}")


def cmd_verify_theorem1(args):
    oracle_spec = _load_json_arg(args.oracle, "oracle")
    region_spec = _load_json_arg(args.region, "region") if args.region else None
    cfg = _mini_config(oracle_spec, region_spec)
    oracle, region, _ = build_problem(cfg)
    if oracle.kind not in ("hyperplane", "sphere"):
        raise ConfigError("theorem verification needs an analytic oracle")
    xs = uniform_box(region, args.pairs, args.seed).points
    ys = uniform_box(region, args.pairs, args.seed + 1).points
    report = check_holder_bounds(exact_alpha_targets(oracle, args.alpha),
                                 xs, ys, args.alpha, region.diameter)
    print(f"alpha={args.alpha} pairs={report.pairs_checked} "
          f"violations={len(report.violations)}")
    return 0 if report.ok else 1


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="bcopy",
        description="Copy hard-label black-box classifiers via "
                    "signed-distance regression")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-data", help="generate a synthetic dataset")
    p.add_argument("--kind", required=True, choices=KINDS)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--noise", type=float, default=0.0)
    p.add_argument("--out", default="dataset")
    p.set_defaults(func=cmd_gen_data)

    p = sub.add_parser("label", help="build a signed-distance dataset")
    p.add_argument("--oracle", required=True)
    p.add_argument("--region")
    p.add_argument("--algo", choices=harness.ALGOS, default="alg2")
    p.add_argument("--algo-params")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_label)

    p = sub.add_parser("train", help="train a student on a labelled CSV")
    p.add_argument("--data", required=True)
    p.add_argument("--student", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="evaluate a saved student model")
    p.add_argument("--model", required=True)
    p.add_argument("--oracle", required=True)
    p.add_argument("--region")
    p.add_argument("--test")
    p.add_argument("--eval-n", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("sweep-budget", help="fidelity/accuracy vs budget")
    p.add_argument("--config", required=True)
    p.add_argument("--out")
    p.set_defaults(func=lambda a: _run_sweep(a, harness.run_budget_sweep, "budget"))

    p = sub.add_parser("sweep-alpha", help="fidelity/accuracy vs alpha")
    p.add_argument("--config", required=True)
    p.add_argument("--out")
    p.set_defaults(func=lambda a: _run_sweep(a, harness.run_alpha_sweep, "alpha"))

    p = sub.add_parser("dist-quality", help="distance prediction quality")
    p.add_argument("--config", required=True)
    p.add_argument("--out")
    p.set_defaults(func=lambda a: _run_sweep(a, harness.run_distance_quality,
                                             "distance"))

    p = sub.add_parser("verify-theorem1",
                       help="check the smoothness bound on exact targets")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--oracle", required=True)
    p.add_argument("--region")
    p.add_argument("--pairs", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_verify_theorem1)

    args = parser.parse_args(argv)
    try:
        result = args.func(args)
        return 0 if result is None else result
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (TransportError, ProtocolError, ConnectionError) as exc:
        print(f"oracle error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
