"""Loss components for the decorrelating representation and the outcome heads.

The composite objective is

    total = ce + beta * ae + gamma * l21 + lam * rmse

where `ce` is the cross-entropy between the empirical treatment marginal and a
logistic propensity model on the representation, `ae` the autoencoder
reconstruction error, `l21` the mixed norm of the between-treatment
mean-difference matrix, and `rmse` the factual outcome error (with a
dosage-generalised variant). Every term comes with its exact gradient with
respect to the quantities the trainer differentiates through.

All losses are batch-averaged so values are comparable across batch sizes.
Treatment indices are 1-based throughout, matching the dataset encoding.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ShapeError
from .net import as_matrix


class MissingTreatmentWarning(UserWarning):
    """Some treatment had no samples in a batch; its columns were zeroed."""


@dataclass
class LossWeights:
    """Scalars weighting the composite objective."""

    beta: float = 1.0
    gamma: float = 1.0
    lam: float = 1.0

    def __post_init__(self):
        for name in ("beta", "gamma", "lam"):
            v = float(getattr(self, name))
            if not np.isfinite(v) or v < 0:
                raise DomainError(f"{name} must be finite and >= 0, got {v}")
            setattr(self, name, v)


@dataclass
class PropensityModel:
    """One weight vector per treatment for the softmax propensity model."""

    theta: np.ndarray  # (K, L)

    def __post_init__(self):
        self.theta = np.asarray(self.theta, dtype=np.float64)
        if self.theta.ndim != 2 or self.theta.shape[0] < 2:
            raise DomainError("theta must be (K, L) with K >= 2")
        if not np.all(np.isfinite(self.theta)):
            raise DomainError("theta must be finite")

    @property
    def n_treatments(self):
        return self.theta.shape[0]


def _log_softmax(logits):
    shifted = logits - logits.max(axis=1, keepdims=True)
    return shifted - np.log(np.exp(shifted).sum(axis=1, keepdims=True))


def propensity_probs(model: PropensityModel, rep):
    """Row-wise softmax of theta_k . rep_n; rows sum to 1."""
    rep = as_matrix(rep, "rep", cols=model.theta.shape[1])
    return np.exp(_log_softmax(rep @ model.theta.T))


def fit_propensity(rep, t, reg, k=None, max_iter=500, tol=1e-6):
    """Fit the multinomial propensity model on a fixed representation.

    Maximises the mean log-likelihood minus (reg / 2N) * ||theta||^2 by
    monotone gradient ascent (backtracking step control) from theta = 0 until
    the gradient norm falls below `tol` or `max_iter` iterations. Deterministic.
    """
    rep = as_matrix(rep, "rep")
    t = np.asarray(t, dtype=np.int64)
    if t.shape != (rep.shape[0],):
        raise ShapeError("t must have one entry per rep row")
    k = int(t.max()) if k is None else int(k)
    if k < 2:
        raise DomainError("need at least two treatments")
    present = set(np.unique(t).tolist())
    missing = sorted(set(range(1, k + 1)) - present)
    if missing or min(present) < 1 or max(present) > k:
        raise DomainError(f"treatments missing from the fitting data: {missing}")
    n, L = rep.shape
    onehot = np.zeros((n, k))
    onehot[np.arange(n), t - 1] = 1.0

    theta = np.zeros((k, L))

    def objective(th):
        logp = _log_softmax(rep @ th.T)
        return logp[np.arange(n), t - 1].mean() - (reg / (2.0 * n)) * np.sum(th * th)

    def gradient(th):
        probs = np.exp(_log_softmax(rep @ th.T))
        return (onehot - probs).T @ rep / n - (reg / n) * th

    obj = objective(theta)
    step = 1.0
    for _ in range(max_iter):
        g = gradient(theta)
        gnorm = np.sqrt(np.sum(g * g))
        if gnorm < tol:
            break
        while step > 1e-12:
            cand = theta + step * g
            cand_obj = objective(cand)
            if cand_obj >= obj:
                theta, obj = cand, cand_obj
                step *= 1.5
                break
            step *= 0.5
        else:
            break
    return PropensityModel(theta)


def loss_ce(rep, model: PropensityModel, marginal):
    """Cross-entropy of the fitted conditional against the treatment marginal.

    Batch mean of -sum_k marginal_k * log p(T_k | rep_n), log-sum-exp
    stabilised. Equals log K exactly when theta is zero.
    """
    marginal = _check_marginal(marginal, model.n_treatments)
    rep = as_matrix(rep, "rep", cols=model.theta.shape[1])
    logp = _log_softmax(rep @ model.theta.T)
    return float(-(logp @ marginal).mean())


def loss_ce_grad_rep(rep, model: PropensityModel, marginal):
    """d(loss_ce)/d(rep): ((probs - marginal) @ theta) / N."""
    marginal = _check_marginal(marginal, model.n_treatments)
    rep = as_matrix(rep, "rep", cols=model.theta.shape[1])
    probs = propensity_probs(model, rep)
    return (probs - marginal) @ model.theta / rep.shape[0]


def _check_marginal(marginal, k):
    m = np.asarray(marginal, dtype=np.float64)
    if m.shape != (k,):
        raise ShapeError(f"marginal must have shape ({k},), got {m.shape}")
    if abs(m.sum() - 1.0) > 1e-8 or np.any(m < 0):
        raise DomainError("marginal must be a probability vector")
    return m


def loss_ae(x, x_hat):
    """Reconstruction error: mean over all N*P entries of the squared residual."""
    x = as_matrix(x, "x")
    x_hat = as_matrix(x_hat, "x_hat", rows=x.shape[0], cols=x.shape[1])
    d = x_hat - x
    return float(np.sum(d * d) / d.size)


def loss_ae_grad(x, x_hat):
    """d(loss_ae)/d(x_hat) = 2 (x_hat - x) / (N P)."""
    x = as_matrix(x, "x")
    x_hat = as_matrix(x_hat, "x_hat", rows=x.shape[0], cols=x.shape[1])
    return 2.0 * (x_hat - x) / x.size


@dataclass
class MeanDiffMatrix:
    """Scaled differences of per-treatment representation means.

    One column per ordered treatment pair (i, j), i != j, in lexicographic
    order; column(i, j) = -column(j, i) exactly. Treatments absent from the
    batch contribute zero columns.
    """

    columns: np.ndarray  # (L, K*(K-1))
    pairs: list[tuple[int, int]]
    counts: np.ndarray  # (K,) samples per treatment in the batch
    scale: float

    @property
    def n_treatments(self):
        return len(self.counts)


def mean_diff_matrix(rep, t, k):
    """Build the mean-difference matrix for a batch.

    scale = 1 / (L * K * (K-1)); column(i, j) = scale * (mu_i - mu_j) where
    mu_i is the mean representation over batch samples with treatment i.
    """
    rep = as_matrix(rep, "rep")
    t = np.asarray(t, dtype=np.int64)
    if t.shape != (rep.shape[0],):
        raise ShapeError("t must have one entry per rep row")
    k = int(k)
    if k < 2:
        raise DomainError("need K >= 2 treatments")
    n, L = rep.shape
    counts = np.bincount(t, minlength=k + 1)[1 : k + 1]
    mu = np.zeros((k, L))
    for i in range(k):
        if counts[i] > 0:
            mu[i] = rep[t == i + 1].mean(axis=0)
    if np.any(counts == 0):
        warnings.warn(
            "some treatments are absent from the batch; their mean-difference "
            "columns are zero",
            MissingTreatmentWarning,
            stacklevel=2,
        )
    scale = 1.0 / (L * k * (k - 1))
    pairs = [(i, j) for i in range(1, k + 1) for j in range(1, k + 1) if i != j]
    cols = np.zeros((L, len(pairs)))
    for c, (i, j) in enumerate(pairs):
        if counts[i - 1] > 0 and counts[j - 1] > 0:
            cols[:, c] = scale * (mu[i - 1] - mu[j - 1])
    return MeanDiffMatrix(columns=cols, pairs=pairs, counts=counts, scale=scale)


def loss_21(m: MeanDiffMatrix):
    """Mixed norm: sum over pair-columns of their Euclidean norms."""
    return float(np.sqrt((m.columns * m.columns).sum(axis=0)).sum())


def loss_21_grad_rep(m: MeanDiffMatrix, t):
    """d(loss_21)/d(rep) for the batch that produced `m`.

    Columns with zero norm contribute nothing (subgradient 0 at the kink).
    """
    t = np.asarray(t, dtype=np.int64)
    L, _ = m.columns.shape
    k = m.n_treatments
    norms = np.sqrt((m.columns * m.columns).sum(axis=0))
    g_mu = np.zeros((k, L))
    for c, (i, j) in enumerate(m.pairs):
        if norms[c] <= 0.0:
            continue
        u = m.scale * (m.columns[:, c] / norms[c])
        g_mu[i - 1] += u
        g_mu[j - 1] -= u
    grad = np.zeros((len(t), L))
    for i in range(k):
        if m.counts[i] > 0:
            grad[t == i + 1] = g_mu[i] / m.counts[i]
    return grad


def loss_decorr(ce, ae, l21, weights: LossWeights):
    """Decorrelation objective: ce + beta * ae + gamma * l21."""
    return float(ce + weights.beta * ae + weights.gamma * l21)


def loss_rmse(y, y_hat):
    """Root mean squared error over factual outcomes."""
    y, y_hat = _check_pair(y, y_hat)
    d = y_hat - y
    return float(np.sqrt(np.sum(d * d) / y.shape[0]))


def loss_rmse_grad(y, y_hat):
    """d(rmse)/d(y_hat) = (y_hat - y) / (N * rmse); zero at a perfect fit."""
    y, y_hat = _check_pair(y, y_hat)
    r = loss_rmse(y, y_hat)
    if r <= 1e-300:
        return np.zeros_like(y_hat)
    return (y_hat - y) / (y.shape[0] * r)


def _check_pair(y, y_hat):
    y = np.asarray(y, dtype=np.float64)
    y_hat = np.asarray(y_hat, dtype=np.float64)
    if y.shape != y_hat.shape or y.ndim != 1:
        raise ShapeError(f"outcome vectors must match: {y.shape} vs {y_hat.shape}")
    return y, y_hat


def loss_rmse_dosage(y, y_hat):
    """Dosage-generalised RMSE: sqrt((1/N) sum_n sum_e (y_ne - yhat_ne)^2).

    `y` and `y_hat` are (N, E) arrays of the dosage-labelled outcomes supplied
    for training. With E = 1 this is the plain RMSE.
    """
    y = np.asarray(y, dtype=np.float64)
    y_hat = np.asarray(y_hat, dtype=np.float64)
    if y.shape != y_hat.shape or y.ndim != 2:
        raise ShapeError(f"outcome matrices must match: {y.shape} vs {y_hat.shape}")
    d = y_hat - y
    return float(np.sqrt(np.sum(d * d) / y.shape[0]))


def loss_total(decorr, rmse, weights: LossWeights):
    """Overall objective: decorrelation loss plus lam * rmse."""
    return float(decorr + weights.lam * rmse)
