"""Experiment command line: gen, train, gridsearch, evaluate, ablate, report.

Every completed run is appended to a JSON-Lines ledger (one immutable record
per line; the HICI_LEDGER environment variable overrides the default location
under the output directory). A run is identified by a hash of its config and
dataset metadata, so re-running a command detects the duplicate and skips it.

Exit codes: 0 success, 1 usage or configuration error, 2 data error,
3 numeric failure during training, 4 incomplete report inputs.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from itertools import product
from pathlib import Path

import numpy as np

from . import datagen
from .datagen import DatasetMeta, load_dataset, split_dataset, subset
from .errors import (
    ConfigError,
    DataError,
    DomainError,
    HiciError,
    NumericError,
    ParseError,
    ReportInputError,
)
from .metrics import MetricsReport, build_report
from .model import (
    HyperConfig,
    VARIANTS,
    load_checkpoint,
    predict_all_counterfactuals,
    save_checkpoint,
    train,
)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_DATA = 2
EXIT_NUMERIC = 3
EXIT_REPORT = 4

SPLIT_RATIOS = (0.6, 0.2, 0.2)
DEFAULT_MAX_CELLS = 512
DEFAULT_SEEDS = (1, 2, 3, 4, 5)
LEDGER_ENV = "HICI_LEDGER"
LOSS_CURVE_HEADER = ["epoch", "L_ce", "L_ae", "L_21", "L_rmse", "L_total", "lr"]

# Canonical grid-search value sets. Real searches subsample this; the full
# Cartesian product is far beyond the default cell cap.
DEFAULT_GRID = {
    "batch_size": [64, 128, 256, 512],
    "total_epochs": [1000],
    "learning_rate": [0.06, 0.08, 0.1, 0.12, 0.14, 0.16],
    "lr_decay": [0.6, 0.65, 0.7, 0.75],
    "iters_per_decay": [1, 2],
    "enc_layers": [1, 2, 3, 5, 7],
    "dec_layers": [3, 4, 5, 6, 7, 8],
    "out_layers": [3, 4, 5, 6, 7, 8],
    "enc_width": [100, 150, 200, 250],
    "dec_width": [100, 175, 250, 325, 400],
    "out_width": [100, 200, 250, 300, 400, 500],
    "l2_encoder": [0.01, 0.001, 0.0001],
    "l2_decoder": [0.01, 0.001, 0.0001],
    "l2_outcome": [0.01, 0.001, 0.0001],
    "beta": [0.1, 1.0, 10.0],
    "gamma": [0.1, 1.0, 10.0],
    "lam": [0.1, 1.0, 10.0],
    "rep_dim": [8, 16],
    "embed_dim": [16],
}


class _Parser(argparse.ArgumentParser):
    """argparse that reports usage errors through our exit-code convention."""

    def error(self, message):
        self.print_usage(sys.stderr)
        raise ConfigError(message)


# ---------------------------------------------------------------------------
# Ledger
# ---------------------------------------------------------------------------


def ledger_path(out_dir):
    env = os.environ.get(LEDGER_ENV)
    if env:
        return Path(env)
    return Path(out_dir) / "ledger.jsonl"


def read_ledger(path):
    path = Path(path)
    if not path.exists():
        return []
    records = []
    with open(path) as f:
        for lineno, line in enumerate(f, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                records.append(json.loads(line))
            except json.JSONDecodeError as exc:
                raise ParseError(f"{path}:{lineno}: bad ledger line: {exc}") from exc
    return records


def append_record(path, record):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "a") as f:
        f.write(json.dumps(record, sort_keys=True))
        f.write("\n")


def base_run_id(config: HyperConfig, meta: DatasetMeta):
    blob = json.dumps(
        {"config": config.to_json(), "dataset": meta.to_json()}, sort_keys=True
    )
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()[:16]


def dataset_label(meta: DatasetMeta):
    base = {"syn": "Syn", "news-like": "News"}.get(meta.source, "Ext")
    return f"{base}{meta.k}"


# ---------------------------------------------------------------------------
# Core run machinery
# ---------------------------------------------------------------------------


def evaluate_params(params, test_set):
    preds = predict_all_counterfactuals(params, test_set.X)
    return build_report(
        test_set.Y_full, preds, test_set.t, test_set.e, test_set.meta.dosage_grid
    )


def _write_loss_curves(path, curves):
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(LOSS_CURVE_HEADER)
        for i, epoch in enumerate(curves["epoch"]):
            w.writerow(
                [
                    epoch,
                    repr(curves["L_ce"][i]),
                    repr(curves["L_ae"][i]),
                    repr(curves["L_21"][i]),
                    repr(curves["L_rmse"][i]),
                    repr(curves["L_total"][i]),
                    repr(curves["lr"][i]),
                ]
            )


def _write_cf_curves(path, curves):
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["epoch", "cf_rmse"])
        for epoch, v in zip(curves["epoch"], curves["cf_rmse"]):
            w.writerow([epoch, repr(v)])


def run_training(config: HyperConfig, data_dir, out_dir, evaluate_test=True):
    """Split, train, optionally evaluate on test; persist artifacts.

    Returns (record, train_result). The record is ledger-ready except for its
    `run_id`/`kind`, which the caller adjusts for grid cells.
    """
    out_dir = Path(out_dir)
    data = load_dataset(data_dir)
    run_id = base_run_id(config, data.meta)
    split = split_dataset(data, SPLIT_RATIOS, seed=config.seed)
    train_set = subset(data, split.train_idx)
    val_set = subset(data, split.val_idx)
    test_set = subset(data, split.test_idx)

    started = time.perf_counter()
    result = train(config, train_set, val_set)
    wall = time.perf_counter() - started

    report = evaluate_params(result.params, test_set) if evaluate_test else None

    ckpt_dir = out_dir / "checkpoints"
    ckpt_dir.mkdir(parents=True, exist_ok=True)
    ckpt_path = ckpt_dir / f"{run_id}.ckpt"
    save_checkpoint(ckpt_path, result.params, config, result.convergence_epoch)

    curves_dir = out_dir / "curves"
    curves_dir.mkdir(parents=True, exist_ok=True)
    losses_path = curves_dir / f"{run_id}_losses.csv"
    _write_loss_curves(losses_path, result.curves)
    cf_path = None
    if result.curves.get("cf_rmse") is not None:
        cf_path = curves_dir / f"{run_id}_cfrmse.csv"
        _write_cf_curves(cf_path, result.curves)

    record = {
        "run_id": run_id,
        "kind": "train",
        "config": config.to_json(),
        "dataset_meta": data.meta.to_json(),
        "data_dir": str(data_dir),
        "split_seed": config.seed,
        "best_val_loss": result.best_val_loss,
        "convergence_epoch": result.convergence_epoch,
        "metrics": report.to_json() if report is not None else None,
        "wall_time_s": wall,
        "checkpoint": str(ckpt_path),
        "curves_losses": str(losses_path),
        "curves_cfrmse": str(cf_path) if cf_path else None,
        "status": "ok",
        "error": None,
    }
    return record, result


def _existing_record(records, run_id):
    for rec in records:
        if rec.get("run_id") == run_id:
            return rec
    return None


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def cmd_gen(args):
    source = {"syn": "syn", "news": "news-like"}[args.dgp]
    meta = DatasetMeta(
        n=args.n,
        p=args.p,
        k=args.k,
        e_levels=args.e,
        n_confounders=args.n_confounders,
        kappa=args.kappa,
        sigma=args.sigma,
        seed=args.seed,
        source=source,
    )
    kwargs = {}
    if source == "syn":
        kwargs = {"linear": args.linear, "confounded_dosage": args.confounded_dosage}
    data = datagen.generate(meta, **kwargs)
    target = Path(args.out) / dataset_label(meta) / f"seed{args.seed}"
    datagen.save_dataset(data, target, force=args.force)
    print(f"wrote dataset {dataset_label(meta)} ({meta.n}x{meta.p}, "
          f"K={meta.k}, E={meta.e_levels}) to {target}")
    return EXIT_OK


def _load_config(path):
    try:
        with open(path) as f:
            obj = json.load(f)
    except OSError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise ConfigError(f"{path}: config must be a JSON object")
    return HyperConfig.from_json(obj)


def cmd_train(args):
    config = _load_config(args.config) if args.config else HyperConfig()
    if args.seed is not None:
        config = config.replace(seed=args.seed)
    lpath = ledger_path(args.out)
    records = read_ledger(lpath)
    data = load_dataset(args.data)
    run_id = base_run_id(config, data.meta)
    existing = _existing_record(records, run_id)
    if existing is not None:
        print(f"run {run_id} already in ledger; skipping (duplicate config/dataset/seed)")
        return EXIT_OK
    record, _ = run_training(config, args.data, args.out, evaluate_test=True)
    append_record(lpath, record)
    print(f"run {record['run_id']}: best val loss {record['best_val_loss']:.6f} "
          f"at epoch {record['convergence_epoch']}")
    print(json.dumps(record["metrics"], sort_keys=True))
    return EXIT_OK


def cmd_evaluate(args):
    params, config, epoch = load_checkpoint(args.checkpoint)
    data = load_dataset(args.data)
    split = split_dataset(data, SPLIT_RATIOS, seed=config.seed)
    test_set = subset(data, split.test_idx)
    started = time.perf_counter()
    report = evaluate_params(params, test_set)
    wall = time.perf_counter() - started
    run_id = base_run_id(config, data.meta) + "-eval"
    lpath = ledger_path(args.out)
    records = read_ledger(lpath)
    record = {
        "run_id": run_id,
        "kind": "evaluate",
        "config": config.to_json(),
        "dataset_meta": data.meta.to_json(),
        "data_dir": str(args.data),
        "split_seed": config.seed,
        "best_val_loss": None,
        "convergence_epoch": epoch,
        "metrics": report.to_json(),
        "wall_time_s": wall,
        "checkpoint": str(args.checkpoint),
        "curves_losses": None,
        "curves_cfrmse": None,
        "status": "ok",
        "error": None,
    }
    if _existing_record(records, run_id) is None:
        append_record(lpath, record)
    else:
        print(f"evaluation {run_id} already in ledger; record not re-appended")
    print(json.dumps(report.to_json(), sort_keys=True))
    return EXIT_OK


def expand_grid(grid, base=None):
    """Cartesian expansion of {field: [values]} into HyperConfigs."""
    if not isinstance(grid, dict):
        raise ConfigError("grid file must be a JSON object of field: [values]")
    base = base or HyperConfig()
    known = set(base.to_json())
    unknown = set(grid) - known
    if unknown:
        raise ConfigError(f"unknown grid keys: {sorted(unknown)}")
    for key, values in grid.items():
        if not isinstance(values, list) or not values:
            raise ConfigError(f"grid key {key!r} must map to a non-empty list")
    keys = sorted(grid)
    configs = []
    for combo in product(*(grid[k] for k in keys)):
        configs.append(base.replace(**dict(zip(keys, combo))))
    return configs


def _grid_worker(payload):
    config_json, data_dir, out_dir = payload
    config = HyperConfig.from_json(config_json)
    try:
        record, _ = run_training(config, data_dir, out_dir, evaluate_test=False)
        return record
    except Exception as exc:  # crashed cells are reported, not fatal
        return {
            "run_id": None,
            "kind": "grid-cell",
            "config": config_json,
            "dataset_meta": None,
            "data_dir": str(data_dir),
            "split_seed": config_json.get("seed"),
            "best_val_loss": None,
            "convergence_epoch": None,
            "metrics": None,
            "wall_time_s": None,
            "checkpoint": None,
            "curves_losses": None,
            "curves_cfrmse": None,
            "status": "failed",
            "error": f"{type(exc).__name__}: {exc}",
        }


def cmd_gridsearch(args):
    try:
        with open(args.grid) as f:
            grid = json.load(f)
    except OSError as exc:
        raise ConfigError(f"{args.grid}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{args.grid}: invalid JSON: {exc}") from exc
    base = _load_config(args.config) if args.config else HyperConfig()
    if args.seed is not None:
        base = base.replace(seed=args.seed)
    configs = expand_grid(grid, base)
    print(f"grid expands to {len(configs)} cells")
    if len(configs) > args.max_cells:
        raise ConfigError(
            f"grid expansion ({len(configs)} cells) exceeds the cap "
            f"({args.max_cells}); pass --max-cells to override"
        )

    data = load_dataset(args.data)
    lpath = ledger_path(args.out)
    records = read_ledger(lpath)

    todo = []
    for config in configs:
        rid = base_run_id(config, data.meta)
        if _existing_record(records, rid + "-cell") is not None:
            print(f"cell {rid} already in ledger; skipping")
            continue
        todo.append(config)

    payloads = [(c.to_json(), str(args.data), str(args.out)) for c in todo]
    results = []
    if args.workers > 1 and len(payloads) > 1:
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            for rec in pool.map(_grid_worker, payloads):
                results.append(rec)
    else:
        for payload in payloads:
            results.append(_grid_worker(payload))

    for rec in results:
        cell = dict(rec)
        if cell["run_id"] is None:
            blob = json.dumps(cell["config"], sort_keys=True)
            cell["run_id"] = hashlib.sha256(blob.encode()).hexdigest()[:16] + "-cell"
        else:
            cell["run_id"] = cell["run_id"] + "-cell"
        cell["kind"] = "grid-cell"
        cell["metrics"] = None
        append_record(lpath, cell)
        if cell["status"] == "failed":
            print(f"cell {cell['run_id']} failed: {cell['error']}", file=sys.stderr)

    # Winners compete on validation loss; prior ok cells in the ledger for this
    # dataset/grid are not reconsidered, the search decides among its own cells.
    ok_cells = [r for r in results if r["status"] == "ok"]
    if not ok_cells:
        print("all grid cells failed", file=sys.stderr)
        return EXIT_NUMERIC
    winner = min(ok_cells, key=lambda r: (r["best_val_loss"], r["run_id"]))

    params, config, _ = load_checkpoint(winner["checkpoint"])
    split = split_dataset(data, SPLIT_RATIOS, seed=config.seed)
    report = evaluate_params(params, subset(data, split.test_idx))
    best = dict(winner)
    best["kind"] = "train"
    best["metrics"] = report.to_json()
    if _existing_record(read_ledger(lpath), best["run_id"]) is None:
        append_record(lpath, best)
    else:
        print(f"winner {best['run_id']} already in ledger; record not re-appended")
    print(f"winner {best['run_id']}: val loss {best['best_val_loss']:.6f}")
    print(json.dumps(best["metrics"], sort_keys=True))
    return EXIT_OK


def _fmt_cell(values):
    mean = float(np.mean(values))
    std = float(np.std(values))
    return f"{mean:.4f}, {std:.4f}"


def cmd_ablate(args):
    base = _load_config(args.config) if args.config else HyperConfig()
    seeds = args.seeds or list(DEFAULT_SEEDS)
    variants = args.variants or list(VARIANTS)
    for v in variants:
        if v not in VARIANTS:
            raise ConfigError(f"unknown variant {v!r}")
    lpath = ledger_path(args.out)
    data = load_dataset(args.data)
    label = dataset_label(data.meta)

    collected = {v: [] for v in variants}
    for seed in seeds:
        for variant in variants:
            config = base.replace(seed=seed, variant=variant)
            rid = base_run_id(config, data.meta)
            records = read_ledger(lpath)
            existing = _existing_record(records, rid)
            if existing is not None and existing.get("metrics"):
                print(f"run {rid} ({variant}, seed {seed}) already in ledger; reusing")
                collected[variant].append(existing["metrics"])
                continue
            record, _ = run_training(config, args.data, args.out, evaluate_test=True)
            append_record(lpath, record)
            print(f"run {rid} ({variant}, seed {seed}): "
                  f"val {record['best_val_loss']:.6f}")
            collected[variant].append(record["metrics"])

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    table_path = out / "ablation.csv"
    with open(table_path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["dataset", "metric"] + list(variants))
        for metric in ("pehe_sqrt", "mape_ate", "cf_rmse"):
            row = [label, metric]
            for v in variants:
                vals = [m[metric] for m in collected[v] if m.get(metric) is not None]
                row.append(_fmt_cell(vals) if vals else "unavailable")
            w.writerow(row)
    print(f"wrote {table_path}")
    return EXIT_OK


def _metric_rows(records, labels):
    """Group ok records carrying metrics by dataset label."""
    by_label = {}
    for rec in records:
        if rec.get("kind") != "train" or rec.get("status") != "ok":
            continue
        if not rec.get("metrics"):
            continue
        meta = DatasetMeta.from_json(rec["dataset_meta"])
        by_label.setdefault(dataset_label(meta), []).append((meta, rec))
    if labels is None:
        labels = sorted(by_label, key=lambda s: (s.rstrip("0123456789"),
                                                 int("".join(filter(str.isdigit, s)) or 0)))
    missing = [lb for lb in labels if lb not in by_label]
    if missing:
        raise ReportInputError(
            "no completed runs for: " + ", ".join(missing)
        )
    return labels, by_label


def _agg(values):
    return float(np.mean(values)), float(np.std(values))


def cmd_report(args):
    records = read_ledger(ledger_path(args.out))
    labels = args.datasets
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    path = out / f"report_{args.kind.replace('-', '_')}.csv"

    if args.kind in ("vary-k", "fixed-ratio"):
        labels, by_label = _metric_rows(records, labels)
        with open(path, "w", newline="") as f:
            w = csv.writer(f)
            w.writerow(["dataset", "n_over_k", "pehe_sqrt_mean", "pehe_sqrt_std",
                        "mape_ate_mean", "mape_ate_std"])
            for label in labels:
                metas_recs = by_label[label]
                meta = metas_recs[0][0]
                pehe_vals = [r["metrics"]["pehe_sqrt"] for _, r in metas_recs
                             if r["metrics"].get("pehe_sqrt") is not None]
                mape_vals = [r["metrics"]["mape_ate"] for _, r in metas_recs
                             if r["metrics"].get("mape_ate") is not None]
                pm, ps = _agg(pehe_vals) if pehe_vals else (float("nan"),) * 2
                mm, ms = _agg(mape_vals) if mape_vals else (float("nan"),) * 2
                w.writerow([label, round(meta.n / meta.k, 4),
                            repr(pm), repr(ps), repr(mm), repr(ms)])
    elif args.kind == "vary-p":
        labels, by_label = _metric_rows(records, labels)
        with open(path, "w", newline="") as f:
            w = csv.writer(f)
            w.writerow(["dataset", "p_over_n", "pehe_sqrt_mean", "pehe_sqrt_std",
                        "mape_ate_mean", "mape_ate_std"])
            for label in labels:
                groups = {}
                for meta, rec in by_label[label]:
                    groups.setdefault(meta.p, []).append((meta, rec))
                for p in sorted(groups):
                    metas_recs = groups[p]
                    meta = metas_recs[0][0]
                    pehe_vals = [r["metrics"]["pehe_sqrt"] for _, r in metas_recs]
                    mape_vals = [r["metrics"]["mape_ate"] for _, r in metas_recs
                                 if r["metrics"].get("mape_ate") is not None]
                    pm, ps = _agg(pehe_vals)
                    mm, ms = _agg(mape_vals) if mape_vals else (float("nan"),) * 2
                    w.writerow([label, round(meta.p / meta.n, 6),
                                repr(pm), repr(ps), repr(mm), repr(ms)])
    elif args.kind == "fig-cf-rmse":
        series = {}
        for rec in records:
            if rec.get("status") != "ok" or rec.get("kind") != "train":
                continue
            cf_file = rec.get("curves_cfrmse")
            if not cf_file or not Path(cf_file).exists():
                continue
            variant = rec["config"]["variant"]
            with open(cf_file, newline="") as f:
                reader = csv.reader(f)
                next(reader)
                for row in reader:
                    series.setdefault(variant, {}).setdefault(
                        int(row[0]), []
                    ).append(float(row[1]))
        if not series:
            raise ReportInputError(
                "no runs with counterfactual RMSE curves in the ledger"
            )
        with open(path, "w", newline="") as f:
            w = csv.writer(f)
            w.writerow(["epoch", "cf_rmse", "series"])
            for variant in sorted(series):
                for epoch in sorted(series[variant]):
                    w.writerow([epoch, repr(float(np.mean(series[variant][epoch]))),
                                variant])
    else:
        raise ConfigError(f"unknown report kind {args.kind!r}")
    print(f"wrote {path}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def _int_list(text):
    try:
        return [int(v) for v in text.split(",") if v != ""]
    except ValueError:
        raise ConfigError(f"expected a comma-separated integer list, got {text!r}")


def _str_list(text):
    return [v for v in text.split(",") if v != ""]


def build_parser():
    parser = _Parser(prog="hici", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("gen", help="generate a synthetic dataset")
    p.add_argument("--dgp", choices=("syn", "news"), required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--e", type=int, default=1, help="dosage levels")
    p.add_argument("--n-confounders", type=int, default=5)
    p.add_argument("--kappa", type=float, default=1.0)
    p.add_argument("--sigma", type=float, default=0.1)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--linear", action="store_true",
                   help="outcomes exactly linear in the confounders (syn only)")
    p.add_argument("--confounded-dosage", action="store_true",
                   help="dosage assignment also depends on the confounders")
    p.add_argument("--out", default=".")
    p.add_argument("--force", action="store_true")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("train", help="train one configuration")
    p.add_argument("--data", required=True)
    p.add_argument("--config", default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", default="runs")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("gridsearch", help="exhaustive search over a grid file")
    p.add_argument("--grid", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--config", default=None, help="base config for unlisted fields")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--max-cells", type=int, default=DEFAULT_MAX_CELLS)
    p.add_argument("--out", default="runs")
    p.set_defaults(func=cmd_gridsearch)

    p = sub.add_parser("evaluate", help="recompute test metrics from a checkpoint")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--out", default="runs")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("ablate", help="run loss-variant ablations on shared seeds")
    p.add_argument("--data", required=True)
    p.add_argument("--config", default=None)
    p.add_argument("--seeds", type=_int_list, default=None)
    p.add_argument("--variants", type=_str_list, default=None)
    p.add_argument("--out", default="runs")
    p.set_defaults(func=cmd_ablate)

    p = sub.add_parser("report", help="emit result tables and figure data")
    p.add_argument("--kind", required=True,
                   choices=("vary-k", "fixed-ratio", "vary-p", "fig-cf-rmse"))
    p.add_argument("--datasets", type=_str_list, default=None)
    p.add_argument("--out", default="runs")
    p.set_defaults(func=cmd_report)

    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DataError, DomainError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except NumericError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ReportInputError as exc:
        print(f"report error: {exc}", file=sys.stderr)
        return EXIT_REPORT
    except HiciError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
