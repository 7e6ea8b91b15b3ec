import csv
import json
import re
from pathlib import Path

import numpy as np
import pytest

from hici.cli import DEFAULT_GRID, LEDGER_ENV, expand_grid, main, read_ledger
from hici.model import HyperConfig


SMALL_CONFIG = {
    "batch_size": 64,
    "total_epochs": 2,
    "learning_rate": 0.05,
    "enc_layers": 1,
    "enc_width": 8,
    "dec_layers": 1,
    "dec_width": 8,
    "out_layers": 1,
    "out_width": 8,
    "rep_dim": 3,
    "embed_dim": 4,
    "patience": 5,
    "seed": 1,
}


@pytest.fixture(autouse=True)
def isolated_ledger(monkeypatch, tmp_path):
    monkeypatch.setenv(LEDGER_ENV, str(tmp_path / "ledger.jsonl"))
    return tmp_path / "ledger.jsonl"


def gen_dataset(tmp_path, k=3, n=80, p=6, seed=1, out="data", extra=()):
    args = ["gen", "--dgp", "syn", "--n", str(n), "--p", str(p), "--k", str(k),
            "--seed", str(seed), "--out", str(tmp_path / out)]
    args += list(extra)
    assert main(args) == 0
    return tmp_path / out / f"Syn{k}" / f"seed{seed}"


def write_config(tmp_path, name="config.json", **overrides):
    cfg = dict(SMALL_CONFIG)
    cfg.update(overrides)
    path = tmp_path / name
    path.write_text(json.dumps(cfg))
    return path


def record_key(rec, ignore=("wall_time_s",)):
    return {k: v for k, v in rec.items() if k not in ignore}


def test_gen_writes_expected_layout(tmp_path):
    d = gen_dataset(tmp_path, k=3, seed=1)
    for name in ("covariates.csv", "assignments.csv", "meta.json",
                 "counterfactuals.csv"):
        assert (d / name).exists()
    meta = json.loads((d / "meta.json").read_text())
    assert meta["k"] == 3 and meta["source"] == "syn"


def test_gen_byte_identical_for_same_flags(tmp_path):
    d1 = gen_dataset(tmp_path, out="a")
    d2 = gen_dataset(tmp_path, out="b")
    for name in ("covariates.csv", "assignments.csv", "meta.json",
                 "counterfactuals.csv"):
        assert (d1 / name).read_bytes() == (d2 / name).read_bytes()


def test_gen_rejects_zero_treatments(tmp_path):
    code = main(["gen", "--dgp", "syn", "--n", "10", "--p", "4", "--k", "0",
                 "--out", str(tmp_path)])
    assert code == 1


def test_gen_refuses_existing_dir_without_force(tmp_path):
    gen_dataset(tmp_path)
    assert main(["gen", "--dgp", "syn", "--n", "80", "--p", "6", "--k", "3",
                 "--seed", "1", "--out", str(tmp_path / "data")]) == 1
    assert main(["gen", "--dgp", "syn", "--n", "80", "--p", "6", "--k", "3",
                 "--seed", "1", "--out", str(tmp_path / "data"), "--force"]) == 0


def test_gen_news_variant(tmp_path):
    assert main(["gen", "--dgp", "news", "--n", "40", "--p", "30", "--k", "2",
                 "--seed", "2", "--out", str(tmp_path / "nd")]) == 0
    assert (tmp_path / "nd" / "News2" / "seed2" / "covariates.csv").exists()


def test_train_appends_one_record_and_skips_duplicates(tmp_path, isolated_ledger,
                                                       capsys):
    data = gen_dataset(tmp_path)
    cfg = write_config(tmp_path)
    out = tmp_path / "runs"
    assert main(["train", "--data", str(data), "--config", str(cfg),
                 "--out", str(out)]) == 0
    records = read_ledger(isolated_ledger)
    assert len(records) == 1
    rec = records[0]
    assert rec["status"] == "ok"
    assert rec["metrics"]["pehe_sqrt"] is not None
    assert Path(rec["checkpoint"]).exists()
    assert Path(rec["curves_losses"]).exists()

    with open(rec["curves_losses"]) as f:
        header = f.readline().strip()
    assert header == "epoch,L_ce,L_ae,L_21,L_rmse,L_total,lr"

    assert main(["train", "--data", str(data), "--config", str(cfg),
                 "--out", str(out)]) == 0
    assert "skipping" in capsys.readouterr().out
    assert len(read_ledger(isolated_ledger)) == 1


def test_train_unknown_config_key_exits_1(tmp_path):
    data = gen_dataset(tmp_path)
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"learning_rate": 0.1, "bogus": 2}))
    assert main(["train", "--data", str(data), "--config", str(bad),
                 "--out", str(tmp_path / "runs")]) == 1


def test_train_missing_data_dir_exits_2(tmp_path):
    cfg = write_config(tmp_path)
    assert main(["train", "--data", str(tmp_path / "nope"), "--config", str(cfg),
                 "--out", str(tmp_path / "runs")]) == 2


def test_expand_grid_is_cartesian_and_validates():
    grid = {"learning_rate": [0.05, 0.1], "beta": [0.5, 1.0, 2.0]}
    cells = expand_grid(grid)
    assert len(cells) == 6
    assert len({(c.learning_rate, c.beta) for c in cells}) == 6
    with pytest.raises(Exception):
        expand_grid({"bogus": [1]})
    assert all(k in HyperConfig().to_json() for k in DEFAULT_GRID)


def test_gridsearch_one_cell_matches_train(tmp_path, monkeypatch):
    data = gen_dataset(tmp_path)
    cfg = write_config(tmp_path)
    out = tmp_path / "runs"

    monkeypatch.setenv(LEDGER_ENV, str(tmp_path / "ledger_train.jsonl"))
    assert main(["train", "--data", str(data), "--config", str(cfg),
                 "--out", str(out)]) == 0
    train_rec = read_ledger(tmp_path / "ledger_train.jsonl")[0]

    grid = tmp_path / "grid.json"
    grid.write_text(json.dumps({"learning_rate": [SMALL_CONFIG["learning_rate"]]}))
    monkeypatch.setenv(LEDGER_ENV, str(tmp_path / "ledger_grid.jsonl"))
    assert main(["gridsearch", "--grid", str(grid), "--data", str(data),
                 "--config", str(cfg), "--out", str(out)]) == 0
    grid_records = read_ledger(tmp_path / "ledger_grid.jsonl")
    best = [r for r in grid_records if r["kind"] == "train"]
    assert len(best) == 1
    assert record_key(best[0]) == record_key(train_rec)


def test_gridsearch_winner_has_min_val_loss_and_worker_determinism(tmp_path,
                                                                   monkeypatch):
    data = gen_dataset(tmp_path)
    cfg = write_config(tmp_path)
    grid = tmp_path / "grid.json"
    grid.write_text(json.dumps({"learning_rate": [0.02, 0.08],
                                "beta": [0.5, 1.5]}))

    winners = []
    for workers, tag in ((1, "w1"), (4, "w4")):
        ledger = tmp_path / f"ledger_{tag}.jsonl"
        monkeypatch.setenv(LEDGER_ENV, str(ledger))
        assert main(["gridsearch", "--grid", str(grid), "--data", str(data),
                     "--config", str(cfg), "--workers", str(workers),
                     "--out", str(tmp_path / f"runs_{tag}")]) == 0
        records = read_ledger(ledger)
        cells = [r for r in records if r["kind"] == "grid-cell"]
        best = [r for r in records if r["kind"] == "train"]
        assert len(cells) == 4 and len(best) == 1
        assert best[0]["best_val_loss"] == min(c["best_val_loss"] for c in cells)
        winners.append(best[0])

    assert winners[0]["run_id"] == winners[1]["run_id"]
    assert winners[0]["best_val_loss"] == winners[1]["best_val_loss"]
    assert winners[0]["metrics"] == winners[1]["metrics"]


def test_gridsearch_cell_cap(tmp_path):
    data = gen_dataset(tmp_path)
    grid = tmp_path / "grid.json"
    grid.write_text(json.dumps({"learning_rate": [0.01, 0.02, 0.03],
                                "beta": [1.0, 2.0]}))
    code = main(["gridsearch", "--grid", str(grid), "--data", str(data),
                 "--max-cells", "5", "--out", str(tmp_path / "runs")])
    assert code == 1


def test_evaluate_reproduces_recorded_metrics(tmp_path, isolated_ledger, capsys):
    data = gen_dataset(tmp_path)
    cfg = write_config(tmp_path)
    out = tmp_path / "runs"
    assert main(["train", "--data", str(data), "--config", str(cfg),
                 "--out", str(out)]) == 0
    rec = read_ledger(isolated_ledger)[0]
    capsys.readouterr()
    assert main(["evaluate", "--checkpoint", rec["checkpoint"],
                 "--data", str(data), "--out", str(out)]) == 0
    printed = json.loads(capsys.readouterr().out.strip().splitlines()[-1])
    assert printed == rec["metrics"]


def test_ablate_single_cell_reduces_to_train(tmp_path, monkeypatch):
    data = gen_dataset(tmp_path)
    cfg = write_config(tmp_path)
    out = tmp_path / "runs"

    monkeypatch.setenv(LEDGER_ENV, str(tmp_path / "ledger_a.jsonl"))
    assert main(["train", "--data", str(data), "--config", str(cfg),
                 "--seed", "4", "--out", str(out)]) == 0
    train_rec = read_ledger(tmp_path / "ledger_a.jsonl")[0]

    monkeypatch.setenv(LEDGER_ENV, str(tmp_path / "ledger_b.jsonl"))
    assert main(["ablate", "--data", str(data), "--config", str(cfg),
                 "--seeds", "4", "--variants", "hici", "--out", str(out)]) == 0
    ablate_rec = read_ledger(tmp_path / "ledger_b.jsonl")[0]
    assert record_key(ablate_rec) == record_key(train_rec)


def test_ablate_emits_mean_std_cells(tmp_path):
    data = gen_dataset(tmp_path)
    cfg = write_config(tmp_path)
    out = tmp_path / "runs"
    assert main(["ablate", "--data", str(data), "--config", str(cfg),
                 "--seeds", "1,2", "--variants", "hici,onn",
                 "--out", str(out)]) == 0
    with open(out / "ablation.csv") as f:
        rows = list(csv.reader(f))
    assert rows[0] == ["dataset", "metric", "hici", "onn"]
    assert rows[1][0] == "Syn3"
    cell = rows[1][2]
    assert re.fullmatch(r"-?\d+\.\d{4}, \d+\.\d{4}", cell), cell


def test_report_vary_k(tmp_path):
    cfg = write_config(tmp_path)
    out = tmp_path / "runs"
    for k in (2, 3):
        data = gen_dataset(tmp_path, k=k, out=f"data{k}")
        assert main(["train", "--data", str(data), "--config", str(cfg),
                     "--out", str(out)]) == 0
    assert main(["report", "--kind", "vary-k", "--datasets", "Syn2,Syn3",
                 "--out", str(out)]) == 0
    with open(out / "report_vary_k.csv") as f:
        rows = list(csv.reader(f))
    assert rows[0] == ["dataset", "n_over_k", "pehe_sqrt_mean", "pehe_sqrt_std",
                       "mape_ate_mean", "mape_ate_std"]
    assert [r[0] for r in rows[1:]] == ["Syn2", "Syn3"]
    assert float(rows[1][1]) == 40.0  # N/K for N=80, K=2


def test_report_missing_runs_exits_4(tmp_path, capsys):
    out = tmp_path / "runs"
    code = main(["report", "--kind", "vary-k", "--datasets", "Syn7",
                 "--out", str(out)])
    assert code == 4
    assert "Syn7" in capsys.readouterr().err


def test_report_fig_cf_rmse(tmp_path):
    data = gen_dataset(tmp_path)
    cfg = write_config(tmp_path)
    out = tmp_path / "runs"
    for variant in ("hici", "onn"):
        assert main(["ablate", "--data", str(data), "--config", str(cfg),
                     "--seeds", "1", "--variants", variant,
                     "--out", str(out)]) == 0
    assert main(["report", "--kind", "fig-cf-rmse", "--out", str(out)]) == 0
    with open(out / "report_fig_cf_rmse.csv") as f:
        rows = list(csv.reader(f))
    assert rows[0] == ["epoch", "cf_rmse", "series"]
    pairs = {(r[0], r[2]) for r in rows[1:]}
    assert len(pairs) == len(rows) - 1  # one row per (epoch, variant)
    assert {r[2] for r in rows[1:]} == {"hici", "onn"}


def test_usage_error_exit_code():
    assert main(["train"]) == 1  # missing required --data
    assert main(["report", "--kind", "nope", "--out", "x"]) == 1
