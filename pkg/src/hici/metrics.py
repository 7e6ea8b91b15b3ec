"""Evaluation metrics over full counterfactual ground truth.

All functions take dense potential-outcome arrays: (N, K) for discrete
treatments, (N, K, E) when treatments carry dosage levels. Each metric is pure
and matches a brute-force reference implementation used in the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, ShapeError

DEGENERATE_ATE_TOL = 1e-12


def _check_2d(y_true, y_pred):
    y_true = np.asarray(y_true, dtype=np.float64)
    y_pred = np.asarray(y_pred, dtype=np.float64)
    if y_true.ndim != 2 or y_true.shape != y_pred.shape:
        raise ShapeError(
            f"expected matching (N, K) arrays, got {y_true.shape} vs {y_pred.shape}"
        )
    return y_true, y_pred


def _check_3d(y_true, y_pred):
    y_true = np.asarray(y_true, dtype=np.float64)
    y_pred = np.asarray(y_pred, dtype=np.float64)
    if y_true.ndim != 3 or y_true.shape != y_pred.shape:
        raise ShapeError(
            f"expected matching (N, K, E) arrays, got {y_true.shape} vs {y_pred.shape}"
        )
    return y_true, y_pred


def pehe(y_true, y_pred):
    """Root precision-in-estimation-of-heterogeneous-effect over all pairs.

    For every unordered treatment pair, the mean squared error of the
    predicted effect difference, averaged over pairs; the square root is
    returned.
    """
    y_true, y_pred = _check_2d(y_true, y_pred)
    n, k = y_true.shape
    if k < 2:
        raise DomainError("pehe requires at least two treatments")
    err = y_true - y_pred  # effect error for pair (m, r) is err_m - err_r
    total = 0.0
    for m in range(1, k):
        diff = err[:, m : m + 1] - err[:, :m]  # (N, m)
        total += float((diff * diff).mean(axis=0).sum())
    n_pairs = k * (k - 1) // 2
    return float(np.sqrt(total / n_pairs))


def ate_per_treatment(y):
    """Average effect of each treatment versus the mean of the alternatives."""
    y = np.asarray(y, dtype=np.float64)
    n, k = y.shape
    if k < 2:
        raise DomainError("ATE requires at least two treatments")
    row_sum = y.sum(axis=1, keepdims=True)
    others = (row_sum - y) / (k - 1)
    return (y - others).mean(axis=0)


def mape_ate(y_true, y_pred, return_per_k=False):
    """Mean absolute percentage error of the ATE, averaged over treatments.

    Raises DomainError("degenerate ATE") when any true per-treatment ATE is
    numerically zero, since the ratio is undefined there.
    """
    y_true, y_pred = _check_2d(y_true, y_pred)
    ate_true = ate_per_treatment(y_true)
    ate_pred = ate_per_treatment(y_pred)
    if np.any(np.abs(ate_true) < DEGENERATE_ATE_TOL):
        raise DomainError("degenerate ATE")
    per_k = np.abs(ate_true - ate_pred) / np.abs(ate_true)
    if return_per_k:
        return float(per_k.mean()), per_k
    return float(per_k.mean())


def _trapezoid(sq_err, grid):
    """Trapezoid rule over the last axis; exact for piecewise-linear integrands."""
    widths = np.diff(grid)
    return 0.5 * ((sq_err[..., 1:] + sq_err[..., :-1]) * widths).sum(axis=-1)


def mise(y_true, y_pred, dosage_grid):
    """Root mean integrated squared error of the dose-response curves."""
    y_true, y_pred = _check_3d(y_true, y_pred)
    n, k, e = y_true.shape
    grid = np.asarray(dosage_grid, dtype=np.float64)
    if e < 2:
        raise DomainError("mise requires at least two dosage levels")
    if grid.shape != (e,):
        raise ShapeError(f"dosage_grid must have {e} entries")
    d = y_true - y_pred
    integrals = _trapezoid(d * d, grid)  # (N, K)
    return float(np.sqrt(integrals.mean()))


def mape_ate_dos(y_true, y_pred, return_per_k=False):
    """MAPE of the dosage-averaged ATE; reduces to mape_ate when E = 1."""
    y_true, y_pred = _check_3d(y_true, y_pred)
    n, k, e = y_true.shape
    if k < 2:
        raise DomainError("ATE requires at least two treatments")
    ate_true = np.stack(
        [ate_per_treatment(y_true[:, :, j]) for j in range(e)]
    ).mean(axis=0)
    ate_pred = np.stack(
        [ate_per_treatment(y_pred[:, :, j]) for j in range(e)]
    ).mean(axis=0)
    if np.any(np.abs(ate_true) < DEGENERATE_ATE_TOL):
        raise DomainError("degenerate ATE")
    per_k = np.abs(ate_true - ate_pred) / np.abs(ate_true)
    if return_per_k:
        return float(per_k.mean()), per_k
    return float(per_k.mean())


def cf_rmse(y_true, y_pred, factual_mask):
    """RMSE over counterfactual cells only (everything the mask excludes)."""
    y_true, y_pred = _check_3d(y_true, y_pred)
    mask = np.asarray(factual_mask, dtype=bool)
    if mask.shape != y_true.shape:
        raise ShapeError("factual_mask must match the outcome tensor shape")
    if not np.all(mask.reshape(mask.shape[0], -1).sum(axis=1) == 1):
        raise DomainError("factual_mask must mark exactly one cell per sample")
    cf = ~mask
    n_cells = int(cf.sum())
    if n_cells == 0:
        raise DomainError("no counterfactual cells (K = 1, E = 1)")
    d = (y_true - y_pred)[cf]
    return float(np.sqrt((d * d).sum() / n_cells))


@dataclass
class MetricsReport:
    """All metrics for one evaluation, with per-metric availability."""

    pehe_sqrt: float | None = None
    mape_ate: float | None = None
    mape_ate_per_k: list[float] | None = None
    mise_sqrt: float | None = None
    mape_ate_dos: float | None = None
    cf_rmse: float | None = None
    unavailable: list[dict] = field(default_factory=list)

    def to_json(self):
        return {
            "pehe_sqrt": self.pehe_sqrt,
            "mape_ate": self.mape_ate,
            "mape_ate_per_k": self.mape_ate_per_k,
            "mise_sqrt": self.mise_sqrt,
            "mape_ate_dos": self.mape_ate_dos,
            "cf_rmse": self.cf_rmse,
            "unavailable": self.unavailable,
        }

    @classmethod
    def from_json(cls, obj):
        return cls(
            pehe_sqrt=obj.get("pehe_sqrt"),
            mape_ate=obj.get("mape_ate"),
            mape_ate_per_k=obj.get("mape_ate_per_k"),
            mise_sqrt=obj.get("mise_sqrt"),
            mape_ate_dos=obj.get("mape_ate_dos"),
            cf_rmse=obj.get("cf_rmse"),
            unavailable=list(obj.get("unavailable", [])),
        )


def build_report(y_full, y_pred, t, e, dosage_grid):
    """Assemble a MetricsReport from ground truth and predictions.

    `y_full` may be None (externally loaded data), in which case every metric
    is flagged unavailable. With dosage levels, pehe and mape_ate treat each
    (treatment, dosage) combination as a distinct arm.
    """
    report = MetricsReport()
    if y_full is None:
        for name in ("pehe_sqrt", "mape_ate", "mise_sqrt", "mape_ate_dos", "cf_rmse"):
            report.unavailable.append(
                {"metric": name, "reason": "counterfactual ground truth absent"}
            )
        return report
    y_full = np.asarray(y_full, dtype=np.float64)
    y_pred = np.asarray(y_pred, dtype=np.float64)
    if y_full.shape != y_pred.shape or y_full.ndim != 3:
        raise ShapeError("y_full and y_pred must be matching (N, K, E) tensors")
    n, k, e_levels = y_full.shape
    arms_true = y_full.reshape(n, k * e_levels)
    arms_pred = y_pred.reshape(n, k * e_levels)

    if k * e_levels >= 2:
        report.pehe_sqrt = pehe(arms_true, arms_pred)
    else:
        report.unavailable.append(
            {"metric": "pehe_sqrt", "reason": "fewer than two treatment arms"}
        )
    try:
        if k * e_levels >= 2:
            mean_val, per_k = mape_ate(arms_true, arms_pred, return_per_k=True)
            report.mape_ate = mean_val
            report.mape_ate_per_k = [float(v) for v in per_k]
        else:
            raise DomainError("fewer than two treatment arms")
    except DomainError as exc:
        report.unavailable.append({"metric": "mape_ate", "reason": str(exc)})

    if e_levels >= 2:
        report.mise_sqrt = mise(y_full, y_pred, dosage_grid)
        try:
            report.mape_ate_dos = mape_ate_dos(y_full, y_pred)
        except DomainError as exc:
            report.unavailable.append({"metric": "mape_ate_dos", "reason": str(exc)})
    else:
        report.unavailable.append(
            {"metric": "mise_sqrt", "reason": "requires at least two dosage levels"}
        )
        report.unavailable.append(
            {"metric": "mape_ate_dos", "reason": "requires at least two dosage levels"}
        )

    t = np.asarray(t, dtype=np.int64)
    e = np.asarray(e, dtype=np.int64)
    mask = np.zeros((n, k, e_levels), dtype=bool)
    mask[np.arange(n), t - 1, e - 1] = True
    try:
        report.cf_rmse = cf_rmse(y_full, y_pred, mask)
    except DomainError as exc:
        report.unavailable.append({"metric": "cf_rmse", "reason": str(exc)})
    return report
