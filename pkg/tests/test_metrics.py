import numpy as np
import pytest

from hici.errors import DomainError, ShapeError
from hici.metrics import (
    MetricsReport,
    build_report,
    cf_rmse,
    mape_ate,
    mape_ate_dos,
    mise,
    pehe,
)

from oracles import cf_rmse_bf, mape_ate_bf, mape_ate_dos_bf, mise_bf, pehe_bf


def rand_instance(rng, dims=2):
    n = int(rng.integers(1, 9))
    k = int(rng.integers(2, 6))
    e = int(rng.integers(2, 5))
    if dims == 2:
        return rng.standard_normal((n, k)), rng.standard_normal((n, k))
    return rng.standard_normal((n, k, e)), rng.standard_normal((n, k, e))


def test_pehe_zero_at_truth():
    y = np.random.default_rng(0).standard_normal((6, 3))
    assert pehe(y, y.copy()) == 0.0


def test_pehe_hand_value():
    y = np.array([[1.0, 3.0]])
    y_hat = np.array([[1.0, 2.0]])
    assert pehe(y, y_hat) == pytest.approx(1.0, abs=1e-15)


def test_pehe_per_sample_shift_invariance():
    rng = np.random.default_rng(1)
    y = rng.standard_normal((7, 4))
    y_hat = rng.standard_normal((7, 4))
    shifted = y_hat + rng.standard_normal((7, 1))  # same constant per sample
    assert pehe(y, y_hat) == pytest.approx(pehe(y, shifted), rel=1e-12)


def test_pehe_requires_two_treatments():
    with pytest.raises(DomainError):
        pehe(np.zeros((3, 1)), np.zeros((3, 1)))


def test_pehe_matches_bruteforce():
    rng = np.random.default_rng(2)
    y = rng.standard_normal((6, 4))
    y_hat = rng.standard_normal((6, 4))
    assert pehe(y, y_hat) == pytest.approx(pehe_bf(y, y_hat), abs=1e-12)


def test_mape_ate_zero_at_truth():
    y = np.random.default_rng(3).standard_normal((5, 3))
    assert mape_ate(y, y.copy()) == 0.0


def test_mape_ate_hand_value():
    y = np.array([[2.0, 1.0]])
    y_hat = np.array([[2.0, 1.5]])
    # true ATE for treatment 1 is 1, predicted 0.5; same magnitudes for k=2
    assert mape_ate(y, y_hat) == pytest.approx(0.5, abs=1e-15)


def test_mape_ate_scale_invariance():
    rng = np.random.default_rng(4)
    y = rng.standard_normal((6, 3)) + 2.0
    y_hat = rng.standard_normal((6, 3)) + 2.0
    assert mape_ate(y, y_hat) == pytest.approx(mape_ate(3.7 * y, 3.7 * y_hat),
                                               rel=1e-12)


def test_mape_ate_degenerate_raises():
    y = np.ones((4, 2))  # all arms equal: every ATE is zero
    with pytest.raises(DomainError, match="degenerate"):
        mape_ate(y, y + 0.1)


def test_mise_zero_at_truth():
    rng = np.random.default_rng(5)
    y = rng.standard_normal((4, 3, 4))
    grid = np.linspace(0, 1, 4)
    assert mise(y, y.copy(), grid) == 0.0


def test_mise_constant_error():
    rng = np.random.default_rng(6)
    y = rng.standard_normal((5, 2, 6))
    grid = np.linspace(0, 1, 6)
    delta = 0.37
    assert mise(y, y + delta, grid) == pytest.approx(delta, rel=1e-12)


def test_mise_requires_two_levels():
    with pytest.raises(DomainError):
        mise(np.zeros((3, 2, 1)), np.zeros((3, 2, 1)), [0.0])


def test_mape_ate_dos_e1_equals_mape_ate():
    rng = np.random.default_rng(7)
    y = rng.standard_normal((6, 4, 1))
    y_hat = rng.standard_normal((6, 4, 1))
    assert mape_ate_dos(y, y_hat) == mape_ate(y[:, :, 0], y_hat[:, :, 0])


def test_cf_rmse_ignores_factuals():
    rng = np.random.default_rng(8)
    y = rng.standard_normal((5, 3, 2))
    n = 5
    t = rng.integers(1, 4, size=n)
    e = rng.integers(1, 3, size=n)
    mask = np.zeros((n, 3, 2), dtype=bool)
    mask[np.arange(n), t - 1, e - 1] = True
    y_hat = y.copy()
    y_hat[mask] += 100.0  # arbitrary on factuals
    assert cf_rmse(y, y_hat, mask) == 0.0


def test_cf_rmse_single_cell_value():
    y = np.array([[[1.0], [5.0]]])  # N=1, K=2, E=1
    y_hat = np.array([[[1.0], [2.0]]])
    mask = np.array([[[True], [False]]])
    assert cf_rmse(y, y_hat, mask) == pytest.approx(3.0, abs=1e-15)


def test_cf_rmse_no_counterfactual_cells():
    y = np.zeros((3, 1, 1))
    mask = np.ones((3, 1, 1), dtype=bool)
    with pytest.raises(DomainError):
        cf_rmse(y, y, mask)


def test_cf_rmse_mask_validation():
    y = np.zeros((2, 2, 1))
    bad = np.zeros((2, 2, 1), dtype=bool)  # no factual marked
    with pytest.raises(DomainError):
        cf_rmse(y, y, bad)


@pytest.mark.parametrize("metric", ["pehe", "mape_ate", "mise", "dos", "cf"])
def test_oracle_equivalence_random_instances(metric):
    rng = np.random.default_rng(hash(metric) % 2**32)
    for _ in range(30):
        if metric in ("pehe", "mape_ate"):
            y, y_hat = rand_instance(rng, dims=2)
            if metric == "pehe":
                assert pehe(y, y_hat) == pytest.approx(pehe_bf(y, y_hat), abs=1e-12)
            else:
                try:
                    v = mape_ate(y, y_hat)
                except DomainError:
                    continue
                assert v == pytest.approx(mape_ate_bf(y, y_hat), abs=1e-12)
        else:
            y, y_hat = rand_instance(rng, dims=3)
            n, k, e = y.shape
            if metric == "mise":
                grid = np.sort(rng.random(e))
                grid[0], grid[-1] = 0.0, 1.0
                assert mise(y, y_hat, grid) == pytest.approx(
                    mise_bf(y, y_hat, grid), abs=1e-12
                )
            elif metric == "dos":
                try:
                    v = mape_ate_dos(y, y_hat)
                except DomainError:
                    continue
                assert v == pytest.approx(mape_ate_dos_bf(y, y_hat), abs=1e-12)
            else:
                t = rng.integers(1, k + 1, size=n)
                ee = rng.integers(1, e + 1, size=n)
                mask = np.zeros((n, k, e), dtype=bool)
                mask[np.arange(n), t - 1, ee - 1] = True
                assert cf_rmse(y, y_hat, mask) == pytest.approx(
                    cf_rmse_bf(y, y_hat, mask), abs=1e-12
                )


def test_monotone_degradation_with_noise():
    rng = np.random.default_rng(9)
    y = rng.standard_normal((40, 4, 2)) * 2.0
    t = rng.integers(1, 5, size=40)
    e = rng.integers(1, 3, size=40)
    mask = np.zeros((40, 4, 2), dtype=bool)
    mask[np.arange(40), t - 1, e - 1] = True
    arms = y.reshape(40, 8)
    med_pehe, med_cf = [], []
    for scale in (0.0, 0.5, 1.0, 2.0):
        pehe_vals, cf_vals = [], []
        for trial in range(20):
            noise = scale * rng.standard_normal(y.shape)
            pehe_vals.append(pehe(arms, (y + noise).reshape(40, 8)))
            cf_vals.append(cf_rmse(y, y + noise, mask))
        med_pehe.append(np.median(pehe_vals))
        med_cf.append(np.median(cf_vals))
    assert all(a <= b + 1e-12 for a, b in zip(med_pehe, med_pehe[1:]))
    assert all(a <= b + 1e-12 for a, b in zip(med_cf, med_cf[1:]))


def test_report_json_schema_and_availability():
    rng = np.random.default_rng(10)
    y = rng.standard_normal((6, 3, 2))
    y_hat = rng.standard_normal((6, 3, 2))
    t = rng.integers(1, 4, size=6)
    e = rng.integers(1, 3, size=6)
    report = build_report(y, y_hat, t, e, np.linspace(0, 1, 2))
    obj = report.to_json()
    assert list(obj.keys()) == [
        "pehe_sqrt", "mape_ate", "mape_ate_per_k", "mise_sqrt",
        "mape_ate_dos", "cf_rmse", "unavailable",
    ]
    assert obj["pehe_sqrt"] is not None
    assert obj["mise_sqrt"] is not None
    assert MetricsReport.from_json(obj).to_json() == obj


def test_report_without_ground_truth():
    report = build_report(None, None, None, None, None)
    obj = report.to_json()
    assert obj["pehe_sqrt"] is None
    names = {u["metric"] for u in obj["unavailable"]}
    assert names == {"pehe_sqrt", "mape_ate", "mise_sqrt", "mape_ate_dos", "cf_rmse"}


def test_report_e1_marks_dosage_metrics_unavailable():
    rng = np.random.default_rng(11)
    y = rng.standard_normal((5, 3, 1))
    y_hat = rng.standard_normal((5, 3, 1))
    t = rng.integers(1, 4, size=5)
    e = np.ones(5, dtype=int)
    report = build_report(y, y_hat, t, e, (0.0,))
    assert report.mise_sqrt is None
    assert report.mape_ate_dos is None
    assert report.pehe_sqrt is not None
    reasons = {u["metric"] for u in report.unavailable}
    assert {"mise_sqrt", "mape_ate_dos"} <= reasons


def test_report_degenerate_ate_flagged():
    y = np.ones((4, 2, 1))
    y_hat = y + 0.5
    t = np.array([1, 2, 1, 2])
    e = np.ones(4, dtype=int)
    report = build_report(y, y_hat, t, e, (0.0,))
    assert report.mape_ate is None
    assert any(u["metric"] == "mape_ate" and "degenerate" in u["reason"]
               for u in report.unavailable)
