"""Synthetic observational data with full counterfactual ground truth.

Two generators share one outcome model. Covariates carry a confounder block z;
treatment assignment follows softmax(kappa * W z), so kappa = 0 removes
confounding entirely and larger kappa makes assignment more predictable from
the covariates. Potential outcomes are

    y(k, e) = (alpha_k . z + s_k * tanh(u_k . z) + c_k) * r_k(d_e) + noise

with the dose-response curve r_k(d) = 1 + a_k d - b_k d^2 evaluated on a
uniform dosage grid in [0, 1]. Every potential outcome is materialised, so the
factual outcome is literally a slice of the counterfactual tensor.

The `syn` generator draws dense Gaussian covariates whose first n_confounders
columns form z. The `news-like` generator draws sparse bag-of-words counts
from a topic mixture and uses the topic scores as z, with treatments assigned
by similarity to per-treatment topic centroids.

Datasets round-trip through four files: covariates.csv (header x1..xP),
assignments.csv (t, e, y), meta.json, and counterfactuals.csv (n, k, e, y).
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (
    ConfigError,
    ConsistencyError,
    DomainError,
    ParseError,
    SplitInfeasibleError,
)

SOURCES = ("syn", "news-like", "external")

COVARIATES_FILE = "covariates.csv"
ASSIGNMENTS_FILE = "assignments.csv"
META_FILE = "meta.json"
COUNTERFACTUALS_FILE = "counterfactuals.csv"

# Fixed sub-stream labels so different draws never share a seed sequence.
_STREAM_GEN = 0
_STREAM_SPLIT = 1


@dataclass
class DatasetMeta:
    """Generation knobs; everything needed to regenerate or validate a dataset."""

    n: int
    p: int
    k: int
    e_levels: int = 1
    n_confounders: int = 5
    kappa: float = 1.0
    sigma: float = 0.1
    seed: int = 0
    source: str = "syn"
    dosage_grid: tuple[float, ...] = ()

    def __post_init__(self):
        if self.source not in SOURCES:
            raise ConfigError(f"unknown source {self.source!r}")
        if min(self.n, self.p, self.k, self.e_levels) < 1:
            raise ConfigError("n, p, k and e_levels must all be >= 1")
        if not 0 <= self.n_confounders <= self.p:
            raise ConfigError("n_confounders must lie in [0, p]")
        if not self.dosage_grid:
            self.dosage_grid = default_dosage_grid(self.e_levels)
        self.dosage_grid = tuple(float(d) for d in self.dosage_grid)
        if len(self.dosage_grid) != self.e_levels:
            raise ConfigError("dosage_grid must have e_levels entries")
        if any(b <= a for a, b in zip(self.dosage_grid, self.dosage_grid[1:])):
            raise ConfigError("dosage_grid must be strictly increasing")

    def to_json(self):
        return {
            "n": self.n,
            "p": self.p,
            "k": self.k,
            "e_levels": self.e_levels,
            "n_confounders": self.n_confounders,
            "kappa": self.kappa,
            "sigma": self.sigma,
            "seed": self.seed,
            "source": self.source,
            "dosage_grid": list(self.dosage_grid),
        }

    @classmethod
    def from_json(cls, obj):
        known = {
            "n",
            "p",
            "k",
            "e_levels",
            "n_confounders",
            "kappa",
            "sigma",
            "seed",
            "source",
            "dosage_grid",
        }
        unknown = set(obj) - known
        if unknown:
            raise ConsistencyError(f"unknown metadata keys: {sorted(unknown)}")
        missing = known - set(obj)
        if missing:
            raise ConsistencyError(f"missing metadata keys: {sorted(missing)}")
        return cls(
            n=int(obj["n"]),
            p=int(obj["p"]),
            k=int(obj["k"]),
            e_levels=int(obj["e_levels"]),
            n_confounders=int(obj["n_confounders"]),
            kappa=float(obj["kappa"]),
            sigma=float(obj["sigma"]),
            seed=int(obj["seed"]),
            source=str(obj["source"]),
            dosage_grid=tuple(float(d) for d in obj["dosage_grid"]),
        )


def default_dosage_grid(e_levels):
    if e_levels == 1:
        return (0.0,)
    return tuple(np.linspace(0.0, 1.0, e_levels).tolist())


@dataclass
class Dataset:
    """Covariates, factual assignments and outcomes, optional full ground truth."""

    X: np.ndarray  # (N, P)
    t: np.ndarray  # (N,) treatment index in 1..K
    e: np.ndarray  # (N,) dosage index in 1..E
    y_factual: np.ndarray  # (N,)
    Y_full: np.ndarray | None  # (N, K, E) or None
    meta: DatasetMeta

    def __post_init__(self):
        self.X = np.asarray(self.X, dtype=np.float64)
        self.t = np.asarray(self.t, dtype=np.int64)
        self.e = np.asarray(self.e, dtype=np.int64)
        self.y_factual = np.asarray(self.y_factual, dtype=np.float64)
        if self.Y_full is not None:
            self.Y_full = np.asarray(self.Y_full, dtype=np.float64)
        self.validate()

    def validate(self):
        m = self.meta
        if self.X.shape != (m.n, m.p):
            raise ConsistencyError(f"X shape {self.X.shape} != (n, p) = {(m.n, m.p)}")
        for name, arr in (("t", self.t), ("e", self.e), ("y", self.y_factual)):
            if arr.shape != (m.n,):
                raise ConsistencyError(f"{name} must have one entry per sample")
        if self.t.min() < 1 or self.t.max() > m.k:
            raise ConsistencyError(f"treatment indices must lie in [1, {m.k}]")
        if self.e.min() < 1 or self.e.max() > m.e_levels:
            raise ConsistencyError(f"dosage indices must lie in [1, {m.e_levels}]")
        if not (np.all(np.isfinite(self.X)) and np.all(np.isfinite(self.y_factual))):
            raise ConsistencyError("covariates and outcomes must be finite")
        if self.Y_full is not None:
            if self.Y_full.shape != (m.n, m.k, m.e_levels):
                raise ConsistencyError(
                    f"Y_full shape {self.Y_full.shape} != {(m.n, m.k, m.e_levels)}"
                )
            factual = self.Y_full[np.arange(m.n), self.t - 1, self.e - 1]
            if not np.array_equal(factual, self.y_factual):
                raise ConsistencyError(
                    "Y_full factual slice does not equal y_factual"
                )

    @property
    def factual_mask(self):
        """Boolean (N, K, E) marking each sample's observed cell."""
        mask = np.zeros((self.meta.n, self.meta.k, self.meta.e_levels), dtype=bool)
        mask[np.arange(self.meta.n), self.t - 1, self.e - 1] = True
        return mask


@dataclass
class Split:
    """Disjoint train/validation/test index lists covering all samples."""

    train_idx: np.ndarray
    val_idx: np.ndarray
    test_idx: np.ndarray


def _categorical(rng, probs):
    """One 1-based draw per row of `probs` by inverse CDF."""
    u = rng.random(probs.shape[0])
    cum = np.cumsum(probs, axis=1)
    return 1 + (u[:, None] > cum).sum(axis=1).astype(np.int64)


def _softmax(logits):
    z = logits - logits.max(axis=1, keepdims=True)
    ez = np.exp(z)
    return ez / ez.sum(axis=1, keepdims=True)


def _potential_outcomes(rng, z, k, grid, sigma, linear=False):
    """Shared outcome model on the confounder scores z: (N, K, E) tensor."""
    n, c = z.shape
    scale = 1.0 / np.sqrt(c)
    alpha = rng.standard_normal((k, c)) * scale
    s = rng.standard_normal(k)  # drawn regardless of `linear` for stream stability
    if linear:
        s = np.zeros(k)
    u = rng.standard_normal((k, c)) * scale
    c0 = rng.standard_normal(k)
    a = rng.uniform(-1.0, 1.0, k)
    b = rng.uniform(0.0, 1.0, k)
    base = z @ alpha.T + s * np.tanh(z @ u.T) + c0  # (N, K)
    d = np.asarray(grid)
    response = 1.0 + a[:, None] * d - b[:, None] * d * d  # (K, E)
    noise = sigma * rng.standard_normal((n, k, len(grid)))
    return base[:, :, None] * response[None, :, :] + noise


def _assign(rng, z, k, kappa, weights):
    logits = kappa * (z @ weights.T)
    return _categorical(rng, _softmax(logits))


def gen_syn(meta: DatasetMeta, linear=False, confounded_dosage=False):
    """Dense Gaussian covariates; confounders are the first n_confounders columns.

    `linear` zeroes the tanh term so outcomes are exactly linear in the
    confounders. `confounded_dosage` routes dosage assignment through the
    confounders as well; by default dosage is uniform.
    """
    if meta.source != "syn":
        raise ConfigError(f"gen_syn expects source 'syn', got {meta.source!r}")
    if meta.n_confounders < 1:
        raise ConfigError("gen_syn needs at least one confounding covariate")
    rng = np.random.default_rng(np.random.SeedSequence([meta.seed, _STREAM_GEN]))
    n, p, k, e_levels = meta.n, meta.p, meta.k, meta.e_levels
    X = rng.standard_normal((n, p))
    z = X[:, : meta.n_confounders]
    scale = 1.0 / np.sqrt(meta.n_confounders)
    w_treat = rng.standard_normal((k, meta.n_confounders)) * scale
    w_dose = rng.standard_normal((e_levels, meta.n_confounders)) * scale
    t = _assign(rng, z, k, meta.kappa, w_treat)
    if confounded_dosage and e_levels > 1:
        e = _assign(rng, z, e_levels, meta.kappa, w_dose)
    else:
        e = rng.integers(1, e_levels + 1, size=n)
    y_full = _potential_outcomes(rng, z, k, meta.dosage_grid, meta.sigma, linear)
    y_factual = y_full[np.arange(n), t - 1, e - 1]
    return Dataset(X=X, t=t, e=e, y_factual=y_factual, Y_full=y_full, meta=meta)


def gen_news_like(meta: DatasetMeta, doc_length=None):
    """Sparse non-negative bag-of-words counts from a topic mixture.

    Documents mix n_confounders topics; word counts are multinomial draws of
    `doc_length` tokens (default max(5, p // 4), which keeps well over half of
    the entries exactly zero). Treatments are assigned by softmax similarity
    between the document's topic mixture and per-treatment topic centroids;
    outcomes use the shared model on the topic scores.
    """
    if meta.source != "news-like":
        raise ConfigError(
            f"gen_news_like expects source 'news-like', got {meta.source!r}"
        )
    n_topics = max(2, meta.n_confounders)
    rng = np.random.default_rng(np.random.SeedSequence([meta.seed, _STREAM_GEN]))
    n, p, k, e_levels = meta.n, meta.p, meta.k, meta.e_levels
    doc_length = int(doc_length) if doc_length else max(5, p // 4)
    topic_word = rng.dirichlet(np.full(p, 0.05), size=n_topics)  # (T, P)
    mixtures = rng.dirichlet(np.full(n_topics, 0.3), size=n)  # (N, T)
    X = rng.multinomial(doc_length, mixtures @ topic_word).astype(np.float64)
    centroids = rng.dirichlet(np.full(n_topics, 0.5), size=k)  # (K, T)
    t = _assign(rng, mixtures, k, meta.kappa * n_topics, centroids)
    e = rng.integers(1, e_levels + 1, size=n)
    y_full = _potential_outcomes(rng, mixtures, k, meta.dosage_grid, meta.sigma)
    y_factual = y_full[np.arange(n), t - 1, e - 1]
    return Dataset(X=X, t=t, e=e, y_factual=y_factual, Y_full=y_full, meta=meta)


def generate(meta: DatasetMeta, **kwargs):
    """Dispatch on meta.source."""
    if meta.source == "syn":
        return gen_syn(meta, **kwargs)
    if meta.source == "news-like":
        return gen_news_like(meta, **kwargs)
    raise ConfigError(f"cannot generate source {meta.source!r}")


def split_dataset(d: Dataset, ratios=(0.6, 0.2, 0.2), seed=0, max_redraws=1000):
    """Random train/val/test split, redrawn until train covers all K treatments."""
    ratios = tuple(float(r) for r in ratios)
    if len(ratios) != 3 or abs(sum(ratios) - 1.0) > 1e-9 or min(ratios) < 0:
        raise ConfigError(f"ratios must be three non-negatives summing to 1: {ratios}")
    n, k = d.meta.n, d.meta.k
    if n < k:
        raise SplitInfeasibleError(f"cannot cover {k} treatments with {n} samples")
    n_train = int(round(ratios[0] * n))
    n_val = int(round(ratios[1] * n))
    rng = np.random.default_rng(np.random.SeedSequence([seed, _STREAM_SPLIT]))
    for _ in range(max_redraws):
        perm = rng.permutation(n)
        train = perm[:n_train]
        if len(np.unique(d.t[train])) == k:
            return Split(
                train_idx=np.sort(train),
                val_idx=np.sort(perm[n_train : n_train + n_val]),
                test_idx=np.sort(perm[n_train + n_val :]),
            )
    raise SplitInfeasibleError(
        f"no split covering all {k} treatments in {max_redraws} draws; "
        "some treatment is too rare for the train ratio"
    )


def subset(d: Dataset, idx):
    """A new Dataset restricted to the given sample indices."""
    idx = np.asarray(idx, dtype=np.int64)
    meta = DatasetMeta(
        n=len(idx),
        p=d.meta.p,
        k=d.meta.k,
        e_levels=d.meta.e_levels,
        n_confounders=d.meta.n_confounders,
        kappa=d.meta.kappa,
        sigma=d.meta.sigma,
        seed=d.meta.seed,
        source=d.meta.source,
        dosage_grid=d.meta.dosage_grid,
    )
    return Dataset(
        X=d.X[idx],
        t=d.t[idx],
        e=d.e[idx],
        y_factual=d.y_factual[idx],
        Y_full=None if d.Y_full is None else d.Y_full[idx],
        meta=meta,
    )


def empirical_treatment_marginal(d: Dataset, idx):
    """Count-based treatment probabilities over the given sample indices."""
    idx = np.asarray(idx, dtype=np.int64)
    if idx.size == 0:
        raise DomainError("cannot compute a marginal over an empty subset")
    counts = np.bincount(d.t[idx], minlength=d.meta.k + 1)[1:]
    return counts / idx.size


# ---------------------------------------------------------------------------
# File round-trip
# ---------------------------------------------------------------------------


def save_dataset(d: Dataset, outdir, force=False):
    """Write the four-file dataset layout under `outdir`."""
    out = Path(outdir)
    if out.exists() and any(out.iterdir()) and not force:
        raise ConfigError(f"refusing to write into non-empty directory {out}")
    out.mkdir(parents=True, exist_ok=True)
    with open(out / COVARIATES_FILE, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow([f"x{j + 1}" for j in range(d.meta.p)])
        for row in d.X:
            w.writerow([repr(float(v)) for v in row])
    with open(out / ASSIGNMENTS_FILE, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["t", "e", "y"])
        for ti, ei, yi in zip(d.t, d.e, d.y_factual):
            w.writerow([int(ti), int(ei), repr(float(yi))])
    with open(out / META_FILE, "w") as f:
        json.dump(d.meta.to_json(), f, indent=2)
        f.write("\n")
    if d.Y_full is not None:
        with open(out / COUNTERFACTUALS_FILE, "w", newline="") as f:
            w = csv.writer(f)
            w.writerow(["n", "k", "e", "y"])
            for ni in range(d.meta.n):
                for ki in range(d.meta.k):
                    for ei in range(d.meta.e_levels):
                        w.writerow(
                            [ni + 1, ki + 1, ei + 1, repr(float(d.Y_full[ni, ki, ei]))]
                        )
    return out


def _read_csv_rows(path, expected_header):
    path = Path(path)
    try:
        f = open(path, newline="")
    except OSError as exc:
        raise ParseError(f"{path}: {exc}") from exc
    with f:
        reader = csv.reader(f)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(f"{path}:1: empty file") from None
        if expected_header is not None and header != expected_header:
            raise ParseError(
                f"{path}:1: expected header {','.join(expected_header)}, "
                f"got {','.join(header)}"
            )
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise ParseError(
                    f"{path}:{lineno}: expected {len(header)} fields, got {len(row)}"
                )
            rows.append((lineno, row))
    return header, rows


def _parse_float(path, lineno, text):
    try:
        return float(text)
    except ValueError:
        raise ParseError(f"{path}:{lineno}: not a number: {text!r}") from None


def _parse_int(path, lineno, text):
    try:
        return int(text)
    except ValueError:
        raise ParseError(f"{path}:{lineno}: not an integer: {text!r}") from None


def _load_covariates(path):
    header, rows = _read_csv_rows(path, None)
    p = len(header)
    if header != [f"x{j + 1}" for j in range(p)]:
        raise ParseError(f"{path}:1: covariate header must be x1..x{p}")
    X = np.empty((len(rows), p))
    for i, (lineno, row) in enumerate(rows):
        X[i] = [_parse_float(path, lineno, v) for v in row]
    return X


def _load_assignments(path):
    _, rows = _read_csv_rows(path, ["t", "e", "y"])
    t = np.empty(len(rows), dtype=np.int64)
    e = np.empty(len(rows), dtype=np.int64)
    y = np.empty(len(rows))
    for i, (lineno, row) in enumerate(rows):
        t[i] = _parse_int(path, lineno, row[0])
        e[i] = _parse_int(path, lineno, row[1])
        y[i] = _parse_float(path, lineno, row[2])
    return t, e, y


def load_external(covariates_path, assignments_path, meta_path=None):
    """Load externally supplied covariates and assignments (no counterfactuals).

    When a metadata file is given, shapes and index bounds are validated
    against it; otherwise K and E are inferred as the largest observed index.
    """
    X = _load_covariates(covariates_path)
    t, e, y = _load_assignments(assignments_path)
    if len(t) != X.shape[0]:
        raise ConsistencyError(
            f"{assignments_path}: {len(t)} rows but {X.shape[0]} covariate rows"
        )
    if t.min() < 1 or e.min() < 1:
        raise ConsistencyError("treatment and dosage indices are 1-based")
    if meta_path is not None:
        with open(meta_path) as f:
            try:
                meta = DatasetMeta.from_json(json.load(f))
            except json.JSONDecodeError as exc:
                raise ParseError(f"{meta_path}: {exc}") from exc
        if meta.p != X.shape[1]:
            raise ConsistencyError(
                f"metadata declares p = {meta.p} but covariates have "
                f"{X.shape[1]} columns"
            )
        if meta.n != X.shape[0]:
            raise ConsistencyError(
                f"metadata declares n = {meta.n} but files have {X.shape[0]} rows"
            )
        if t.max() > meta.k:
            raise ConsistencyError(
                f"treatment index {t.max()} exceeds declared k = {meta.k}"
            )
        if e.max() > meta.e_levels:
            raise ConsistencyError(
                f"dosage index {e.max()} exceeds declared e_levels = {meta.e_levels}"
            )
        meta = DatasetMeta(
            n=X.shape[0],
            p=X.shape[1],
            k=meta.k,
            e_levels=meta.e_levels,
            n_confounders=meta.n_confounders,
            kappa=meta.kappa,
            sigma=meta.sigma,
            seed=meta.seed,
            source=meta.source,
            dosage_grid=meta.dosage_grid,
        )
    else:
        meta = DatasetMeta(
            n=X.shape[0],
            p=X.shape[1],
            k=int(t.max()),
            e_levels=int(e.max()),
            n_confounders=0,
            kappa=0.0,
            sigma=0.0,
            seed=0,
            source="external",
        )
    return Dataset(X=X, t=t, e=e, y_factual=y, Y_full=None, meta=meta)


def _load_counterfactuals(path, n, k, e_levels):
    _, rows = _read_csv_rows(path, ["n", "k", "e", "y"])
    if len(rows) != n * k * e_levels:
        raise ConsistencyError(
            f"{path}: expected {n * k * e_levels} counterfactual rows, got {len(rows)}"
        )
    y_full = np.full((n, k, e_levels), np.nan)
    for lineno, row in rows:
        ni = _parse_int(path, lineno, row[0])
        ki = _parse_int(path, lineno, row[1])
        ei = _parse_int(path, lineno, row[2])
        if not (1 <= ni <= n and 1 <= ki <= k and 1 <= ei <= e_levels):
            raise ConsistencyError(f"{path}:{lineno}: index out of range")
        y_full[ni - 1, ki - 1, ei - 1] = _parse_float(path, lineno, row[3])
    if np.any(np.isnan(y_full)):
        raise ConsistencyError(f"{path}: counterfactual tensor has missing cells")
    return y_full


def load_dataset(dirpath):
    """Load the four-file layout; the counterfactual file is optional."""
    dirpath = Path(dirpath)
    meta_path = dirpath / META_FILE
    if not meta_path.exists():
        raise ParseError(f"{meta_path}: metadata file not found")
    d = load_external(
        dirpath / COVARIATES_FILE, dirpath / ASSIGNMENTS_FILE, meta_path
    )
    cf_path = dirpath / COUNTERFACTUALS_FILE
    if cf_path.exists():
        y_full = _load_counterfactuals(
            cf_path, d.meta.n, d.meta.k, d.meta.e_levels
        )
        d = Dataset(
            X=d.X, t=d.t, e=d.e, y_factual=d.y_factual, Y_full=y_full, meta=d.meta
        )
    return d
