"""Architecture assembly, joint training, ablation variants, checkpoints.

The full model is an encoder/decoder pair over the covariates, a softmax
propensity model on the representation, and one outcome head per dosage level.
Each head consumes the representation concatenated with a learned embedding of
the treatment index; the embedding lookup is exactly a dense layer applied to
the one-hot treatment, without materialising the one-hot.

Training alternates, per epoch, a refit of the propensity weights on the
current representation with Adam steps on everything else, so the
cross-entropy term stays an honest divergence between the conditional
treatment distribution and its marginal while the representation moves.

Variants:
  hici            full composite loss
  onn             outcome regression only, heads consume the raw covariates
  deeptreat_plus  cross-entropy + reconstruction (no mixed norm), plus outcome
  l21_ae          mixed norm + reconstruction (no cross-entropy), plus outcome
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, fields

import numpy as np

from .datagen import Dataset, empirical_treatment_marginal
from .errors import ConfigError, DomainError, NumericError, ParseError, ShapeError
from .metrics import cf_rmse
from .losses import (
    LossWeights,
    PropensityModel,
    fit_propensity,
    loss_ae,
    loss_ae_grad,
    loss_ce,
    loss_ce_grad_rep,
    loss_rmse,
    loss_rmse_grad,
    loss_21,
    loss_21_grad_rep,
    mean_diff_matrix,
)
from .net import (
    INIT_STD,
    AdamState,
    LrSchedule,
    Mlp,
    adam_step,
    as_matrix,
    backward,
    forward,
    forward_cached,
    init_params,
    lr_at,
)

VARIANTS = ("hici", "onn", "deeptreat_plus", "l21_ae")

# Sub-stream labels hung off the run seed; the dataset generator owns 0 and
# the splitter owns 1.
_STREAM_INIT = 2
_STREAM_BATCH = 3

CHECKPOINT_FORMAT = "hici-checkpoint"


@dataclass
class HyperConfig:
    """One training configuration; also the unit of grid expansion."""

    batch_size: int = 128
    total_epochs: int = 200
    learning_rate: float = 0.1
    lr_decay: float = 0.7
    iters_per_decay: int = 1
    enc_layers: int = 2
    enc_width: int = 64
    dec_layers: int = 2
    dec_width: int = 64
    out_layers: int = 2
    out_width: int = 64
    rep_dim: int = 8
    embed_dim: int = 16
    l2_encoder: float = 0.0001
    l2_decoder: float = 0.0001
    l2_outcome: float = 0.0001
    beta: float = 1.0
    gamma: float = 1.0
    lam: float = 10.0
    propensity_reg: float = 0.001
    variant: str = "hici"
    seed: int = 0
    patience: int = 20
    min_delta: float = 1e-4

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ConfigError(f"unknown variant {self.variant!r}")
        for name in ("batch_size", "total_epochs", "iters_per_decay", "enc_layers",
                     "dec_layers", "out_layers", "enc_width", "dec_width",
                     "out_width", "rep_dim", "embed_dim"):
            if int(getattr(self, name)) < 1:
                raise ConfigError(f"{name} must be >= 1")
            setattr(self, name, int(getattr(self, name)))
        if self.learning_rate <= 0:
            raise ConfigError("learning_rate must be > 0")
        if not 0.0 < self.lr_decay <= 1.0:
            raise ConfigError("lr_decay must lie in (0, 1]")
        for name in ("l2_encoder", "l2_decoder", "l2_outcome", "beta", "gamma",
                     "lam", "propensity_reg", "min_delta"):
            if float(getattr(self, name)) < 0:
                raise ConfigError(f"{name} must be >= 0")
        if int(self.patience) < 0:
            raise ConfigError("patience must be >= 0")
        self.patience = int(self.patience)
        self.seed = int(self.seed)

    @property
    def weights(self):
        return LossWeights(beta=self.beta, gamma=self.gamma, lam=self.lam)

    def to_json(self):
        return {f.name: getattr(self, f.name) for f in fields(self)}

    @classmethod
    def from_json(cls, obj):
        known = {f.name for f in fields(cls)}
        unknown = set(obj) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        return cls(**obj)

    def replace(self, **kwargs):
        d = self.to_json()
        d.update(kwargs)
        return HyperConfig(**d)


@dataclass
class VariantSpec:
    """Effective loss assembly for one variant."""

    use_encoder: bool
    ce_on: bool
    beta: float
    gamma: float
    lam: float


def apply_variant(config: HyperConfig) -> VariantSpec:
    """Resolve the variant into effective term coefficients."""
    v = config.variant
    if v == "hici":
        return VariantSpec(True, True, config.beta, config.gamma, config.lam)
    if v == "onn":
        return VariantSpec(False, False, 0.0, 0.0, config.lam)
    if v == "deeptreat_plus":
        return VariantSpec(True, True, config.beta, 0.0, config.lam)
    if v == "l21_ae":
        return VariantSpec(True, False, config.beta, config.gamma, config.lam)
    raise ConfigError(f"unknown variant {v!r}")


@dataclass
class HiCiParams:
    """All trainable state: encoder, decoder, propensity weights, embeddings, heads."""

    encoder: Mlp
    decoder: Mlp
    theta: np.ndarray  # (K, rep_dim) propensity weights, refit per epoch
    treat_embed: list[np.ndarray]  # E tables, each (K, embed_dim)
    heads: list[Mlp]  # E outcome heads
    raw_input: bool = False  # heads consume raw covariates instead of the rep

    def __post_init__(self):
        if self.encoder.out_dim >= self.encoder.in_dim:
            raise ConfigError(
                f"representation dim {self.encoder.out_dim} must be smaller "
                f"than the covariate dim {self.encoder.in_dim}"
            )
        if len(self.treat_embed) != len(self.heads):
            raise ConfigError("need one embedding table per outcome head")

    @property
    def p(self):
        return self.encoder.in_dim

    @property
    def rep_dim(self):
        return self.encoder.out_dim

    @property
    def k(self):
        return self.treat_embed[0].shape[0]

    @property
    def e_levels(self):
        return len(self.heads)

    @property
    def embed_dim(self):
        return self.treat_embed[0].shape[1]

    @property
    def head_rep_dim(self):
        """Width of the head-input slice that carries covariate information."""
        return self.p if self.raw_input else self.rep_dim

    def copy(self):
        return HiCiParams(
            encoder=self.encoder.copy(),
            decoder=self.decoder.copy(),
            theta=self.theta.copy(),
            treat_embed=[t.copy() for t in self.treat_embed],
            heads=[h.copy() for h in self.heads],
            raw_input=self.raw_input,
        )


def init_hici_params(config: HyperConfig, p, k, e_levels, init_seed=None):
    """Fresh parameters for a dataset of the given dimensions."""
    if config.rep_dim >= p:
        raise ConfigError(f"rep_dim {config.rep_dim} must be < p = {p}")
    seed = config.seed if init_seed is None else init_seed
    rng = np.random.default_rng(np.random.SeedSequence([seed, _STREAM_INIT]))
    raw_input = config.variant == "onn"

    def sub_seed():
        return int(rng.integers(0, 2**63 - 1))

    encoder = init_params(
        [p] + [config.enc_width] * config.enc_layers + [config.rep_dim], sub_seed()
    )
    decoder = init_params(
        [config.rep_dim] + [config.dec_width] * config.dec_layers + [p], sub_seed()
    )
    theta = np.zeros((k, config.rep_dim))
    head_in = (p if raw_input else config.rep_dim) + config.embed_dim
    embeds = []
    heads = []
    for _ in range(e_levels):
        embeds.append(rng.normal(0.0, INIT_STD, size=(k, config.embed_dim)))
        heads.append(
            init_params([head_in] + [config.out_width] * config.out_layers + [1],
                        sub_seed())
        )
    return HiCiParams(
        encoder=encoder,
        decoder=decoder,
        theta=theta,
        treat_embed=embeds,
        heads=heads,
        raw_input=raw_input,
    )


def _mlp_arrays(prefix, net):
    out = []
    for i, layer in enumerate(net.layers):
        out.append((f"{prefix}.{i}.weight", layer.weight))
        out.append((f"{prefix}.{i}.bias", layer.bias))
    return out


def param_arrays(params: HiCiParams, include_theta=True):
    """(names, arrays) in declaration order: encoder, decoder, theta, embeds, heads."""
    named = _mlp_arrays("encoder", params.encoder)
    named += _mlp_arrays("decoder", params.decoder)
    if include_theta:
        named.append(("theta", params.theta))
    for j, table in enumerate(params.treat_embed):
        named.append((f"embed.{j}", table))
    for j, head in enumerate(params.heads):
        named += _mlp_arrays(f"head.{j}", head)
    names = [n for n, _ in named]
    arrays = [a for _, a in named]
    return names, arrays


def trainable_param_arrays(params: HiCiParams):
    """Everything Adam updates; the propensity weights are refit, not stepped."""
    return param_arrays(params, include_theta=False)


# ---------------------------------------------------------------------------
# Forward / loss / gradient assembly
# ---------------------------------------------------------------------------


def _check_indices(t, e, k, e_levels, n):
    t = np.asarray(t, dtype=np.int64)
    e = np.asarray(e, dtype=np.int64)
    if t.shape != (n,) or e.shape != (n,):
        raise ShapeError("t and e must have one entry per sample")
    if t.min() < 1 or t.max() > k:
        raise DomainError(f"treatment index out of range [1, {k}]")
    if e.min() < 1 or e.max() > e_levels:
        raise DomainError(f"dosage index out of range [1, {e_levels}]")
    return t, e


def _cell_column(params: HiCiParams, rep, k_idx, e_idx):
    """Predictions for every row under treatment k_idx at dosage e_idx (1-based)."""
    emb = params.treat_embed[e_idx - 1][k_idx - 1]
    inp = np.concatenate([rep, np.tile(emb, (rep.shape[0], 1))], axis=1)
    return forward(params.heads[e_idx - 1], inp)[:, 0]


def _base_rep(params: HiCiParams, x):
    x = as_matrix(x, "X", cols=params.p)
    return x if params.raw_input else forward(params.encoder, x)


def predict_outcome(params: HiCiParams, x, t, e):
    """Factual-style predictions for per-sample (treatment, dosage) assignments.

    Each distinct (k, e) cell is evaluated over the whole batch and gathered,
    so a prediction here is bit-identical to the matching cell of
    predict_all_counterfactuals.
    """
    x = as_matrix(x, "X", cols=params.p)
    n = x.shape[0]
    t, e = _check_indices(t, e, params.k, params.e_levels, n)
    rep = _base_rep(params, x)
    out = np.empty(n)
    for k_idx, e_idx in sorted(set(zip(t.tolist(), e.tolist()))):
        rows = (t == k_idx) & (e == e_idx)
        out[rows] = _cell_column(params, rep, k_idx, e_idx)[rows]
    return out


def predict_all_counterfactuals(params: HiCiParams, x):
    """All potential outcomes as an (N, K, E) tensor."""
    x = as_matrix(x, "X", cols=params.p)
    rep = _base_rep(params, x)
    out = np.empty((x.shape[0], params.k, params.e_levels))
    for k_idx in range(1, params.k + 1):
        for e_idx in range(1, params.e_levels + 1):
            out[:, k_idx - 1, e_idx - 1] = _cell_column(params, rep, k_idx, e_idx)
    return out


def batch_terms(params: HiCiParams, x, t, e, y, vspec: VariantSpec, marginal,
                l2=(0.0, 0.0, 0.0), compute_grads=True):
    """Loss components and (optionally) gradients for one batch.

    Returns (components, grads). Components holds ce/ae/l21/rmse (nan when the
    variant excludes a term), the composite `total`, the weight `penalty`, and
    `objective` = total + penalty. Gradients differentiate `objective` with
    respect to trainable_param_arrays order; the propensity weights are held
    fixed.
    """
    x = as_matrix(x, "X", cols=params.p)
    n = x.shape[0]
    t, e = _check_indices(t, e, params.k, params.e_levels, n)
    y = np.asarray(y, dtype=np.float64)
    if y.shape != (n,):
        raise ShapeError("y must have one entry per sample")
    l2_enc, l2_dec, l2_out = l2

    enc_cache = None
    if vspec.use_encoder:
        rep, enc_in, enc_pre = forward_cached(params.encoder, x)
        enc_cache = (enc_in, enc_pre)
    else:
        rep = x

    ce = ae = l21 = float("nan")
    dec_cache = None
    x_hat = None
    mdm = None
    if vspec.ce_on:
        ce = loss_ce(rep, PropensityModel(params.theta), marginal)
    if vspec.beta > 0:
        x_hat, dec_in, dec_pre = forward_cached(params.decoder, rep)
        dec_cache = (dec_in, dec_pre)
        ae = loss_ae(x, x_hat)
    if vspec.gamma > 0:
        mdm = mean_diff_matrix(rep, t, params.k)
        l21 = loss_21(mdm)

    # Factual predictions through the per-dosage heads.
    y_hat = np.empty(n)
    head_caches = {}
    for e_idx in range(1, params.e_levels + 1):
        rows = np.flatnonzero(e == e_idx)
        if rows.size == 0:
            continue
        emb = params.treat_embed[e_idx - 1][t[rows] - 1]
        inp = np.concatenate([rep[rows], emb], axis=1)
        out, h_in, h_pre = forward_cached(params.heads[e_idx - 1], inp)
        y_hat[rows] = out[:, 0]
        head_caches[e_idx] = (rows, inp, (h_in, h_pre))
    rmse = loss_rmse(y, y_hat)

    total = 0.0
    if vspec.ce_on:
        total += ce
    if vspec.beta > 0:
        total += vspec.beta * ae
    if vspec.gamma > 0:
        total += vspec.gamma * l21
    total += vspec.lam * rmse

    penalty = 0.0
    if vspec.use_encoder and l2_enc > 0:
        penalty += l2_enc * sum(float((l.weight**2).sum()) for l in params.encoder.layers)
    if vspec.beta > 0 and l2_dec > 0:
        penalty += l2_dec * sum(float((l.weight**2).sum()) for l in params.decoder.layers)
    if vspec.lam > 0 and l2_out > 0:
        penalty += l2_out * sum(
            float((l.weight**2).sum()) for h in params.heads for l in h.layers
        )
        penalty += l2_out * sum(float((tab**2).sum()) for tab in params.treat_embed)

    components = {
        "ce": ce,
        "ae": ae,
        "l21": l21,
        "rmse": rmse,
        "total": float(total),
        "penalty": float(penalty),
        "objective": float(total + penalty),
    }
    if not compute_grads:
        return components, None

    enc_grads = [(np.zeros_like(l.weight), np.zeros_like(l.bias))
                 for l in params.encoder.layers]
    dec_grads = [(np.zeros_like(l.weight), np.zeros_like(l.bias))
                 for l in params.decoder.layers]
    emb_grads = [np.zeros_like(tab) for tab in params.treat_embed]
    head_grads = [
        [(np.zeros_like(l.weight), np.zeros_like(l.bias)) for l in h.layers]
        for h in params.heads
    ]
    d_rep = np.zeros_like(rep)

    if vspec.lam > 0:
        d_yhat = vspec.lam * loss_rmse_grad(y, y_hat)
        rep_w = params.head_rep_dim
        for e_idx, (rows, inp, cache) in head_caches.items():
            up = d_yhat[rows][:, None]
            grads, d_inp = backward(params.heads[e_idx - 1], inp, up, cache)
            head_grads[e_idx - 1] = grads
            d_rep[rows] += d_inp[:, :rep_w]
            np.add.at(emb_grads[e_idx - 1], t[rows] - 1, d_inp[:, rep_w:])

    if vspec.beta > 0:
        d_xhat = vspec.beta * loss_ae_grad(x, x_hat)
        dec_grads, d_rep_ae = backward(params.decoder, rep, d_xhat, dec_cache)
        d_rep += d_rep_ae
    if vspec.ce_on:
        d_rep += loss_ce_grad_rep(rep, PropensityModel(params.theta), marginal)
    if vspec.gamma > 0:
        d_rep += vspec.gamma * loss_21_grad_rep(mdm, t)
    if vspec.use_encoder:
        enc_grads, _ = backward(params.encoder, x, d_rep, enc_cache)

    if vspec.use_encoder and l2_enc > 0:
        enc_grads = [(gw + 2.0 * l2_enc * l.weight, gb)
                     for (gw, gb), l in zip(enc_grads, params.encoder.layers)]
    if vspec.beta > 0 and l2_dec > 0:
        dec_grads = [(gw + 2.0 * l2_dec * l.weight, gb)
                     for (gw, gb), l in zip(dec_grads, params.decoder.layers)]
    if vspec.lam > 0 and l2_out > 0:
        head_grads = [
            [(gw + 2.0 * l2_out * l.weight, gb) for (gw, gb), l in zip(grads, h.layers)]
            for grads, h in zip(head_grads, params.heads)
        ]
        emb_grads = [g + 2.0 * l2_out * tab
                     for g, tab in zip(emb_grads, params.treat_embed)]

    flat = []
    for gw, gb in enc_grads:
        flat += [gw, gb]
    for gw, gb in dec_grads:
        flat += [gw, gb]
    flat += emb_grads
    for grads in head_grads:
        for gw, gb in grads:
            flat += [gw, gb]
    return components, flat


def eval_terms(params: HiCiParams, dataset: Dataset, vspec: VariantSpec, marginal):
    """Loss components over a whole dataset, no gradients."""
    comps, _ = batch_terms(
        params, dataset.X, dataset.t, dataset.e, dataset.y_factual,
        vspec, marginal, compute_grads=False,
    )
    return comps


# ---------------------------------------------------------------------------
# Training
# ---------------------------------------------------------------------------


@dataclass
class TrainResult:
    """Outcome of one training run."""

    params: HiCiParams  # weights at the best validation epoch
    best_val_loss: float
    convergence_epoch: int
    curves: dict = field(default_factory=dict)


_COMPONENT_LABELS = {"ce": "L_ce", "ae": "L_ae", "l21": "L_21", "rmse": "L_rmse"}


def _check_components(comps, vspec: VariantSpec, epoch):
    used = ["rmse", "total"]
    if vspec.ce_on:
        used.append("ce")
    if vspec.beta > 0:
        used.append("ae")
    if vspec.gamma > 0:
        used.append("l21")
    for name in used:
        if not np.isfinite(comps[name]):
            label = _COMPONENT_LABELS.get(name, name)
            raise NumericError(f"{label} became non-finite at epoch {epoch}")


def train(config: HyperConfig, train_set: Dataset, val_set: Dataset) -> TrainResult:
    """Joint training with per-epoch propensity refits and early stopping.

    Batches are reshuffled each epoch from the run seed (partial final batch
    kept). Validation uses the composite loss; training stops after `patience`
    consecutive epochs without an improvement greater than `min_delta`, and
    the parameters from the best validation epoch are returned.
    """
    meta = train_set.meta
    k, p, e_levels = meta.k, meta.p, meta.e_levels
    if val_set.meta.k != k or val_set.meta.p != p or val_set.meta.e_levels != e_levels:
        raise ConfigError("train and validation sets disagree on dimensions")
    present = np.unique(train_set.t)
    if len(present) != k:
        raise DomainError("training set must contain every treatment")
    vspec = apply_variant(config)
    if vspec.ce_on and k < 2:
        raise ConfigError("cross-entropy decorrelation needs at least two treatments")

    params = init_hici_params(config, p, k, e_levels)
    names, trainable = trainable_param_arrays(params)
    state = AdamState.for_params(trainable)
    sched = LrSchedule(config.learning_rate, config.lr_decay, config.iters_per_decay)
    marginal = empirical_treatment_marginal(train_set, np.arange(meta.n))
    l2 = (config.l2_encoder, config.l2_decoder, config.l2_outcome)
    batch_rng = np.random.default_rng(
        np.random.SeedSequence([config.seed, _STREAM_BATCH])
    )

    track_cf = val_set.Y_full is not None and k * e_levels > 1
    curves = {
        "epoch": [], "lr": [], "L_ce": [], "L_ae": [], "L_21": [],
        "L_rmse": [], "L_total": [], "val_total": [],
        "cf_rmse": [] if track_cf else None,
    }

    best_val = np.inf
    best_params = None
    best_epoch = 0
    bad_epochs = 0
    n_train = meta.n

    for epoch in range(1, config.total_epochs + 1):
        if vspec.ce_on:
            rep_tr = _base_rep(params, train_set.X)
            params.theta = fit_propensity(
                rep_tr, train_set.t, config.propensity_reg, k=k
            ).theta
        lr = lr_at(sched, epoch - 1)
        order = batch_rng.permutation(n_train)
        sums = {name: 0.0 for name in ("ce", "ae", "l21", "rmse", "total")}
        for start in range(0, n_train, config.batch_size):
            rows = order[start : start + config.batch_size]
            comps, grads = batch_terms(
                params,
                train_set.X[rows],
                train_set.t[rows],
                train_set.e[rows],
                train_set.y_factual[rows],
                vspec,
                marginal,
                l2=l2,
            )
            _check_components(comps, vspec, epoch)
            adam_step(trainable, grads, state, lr, names)
            for name in sums:
                sums[name] += comps[name] * rows.size

        val_comps = eval_terms(params, val_set, vspec, marginal)
        _check_components(val_comps, vspec, epoch)
        val_total = val_comps["total"]

        curves["epoch"].append(epoch)
        curves["lr"].append(lr)
        curves["L_ce"].append(sums["ce"] / n_train)
        curves["L_ae"].append(sums["ae"] / n_train)
        curves["L_21"].append(sums["l21"] / n_train)
        curves["L_rmse"].append(sums["rmse"] / n_train)
        curves["L_total"].append(sums["total"] / n_train)
        curves["val_total"].append(val_total)
        if track_cf:
            preds = predict_all_counterfactuals(params, val_set.X)
            curves["cf_rmse"].append(
                cf_rmse(val_set.Y_full, preds, val_set.factual_mask)
            )

        if val_total < best_val - config.min_delta:
            best_val = val_total
            best_params = params.copy()
            best_epoch = epoch
            bad_epochs = 0
        else:
            bad_epochs += 1
            if bad_epochs >= max(1, config.patience):
                break

    if best_params is None:  # every epoch failed to improve on +inf: impossible,
        best_params = params.copy()  # but keep the contract total anyway
        best_epoch = curves["epoch"][-1]
        best_val = curves["val_total"][-1]
    return TrainResult(
        params=best_params,
        best_val_loss=float(best_val),
        convergence_epoch=best_epoch,
        curves=curves,
    )


# ---------------------------------------------------------------------------
# Checkpoints
# ---------------------------------------------------------------------------


def save_checkpoint(path, params: HiCiParams, config: HyperConfig, epoch):
    """JSON header line plus a flat little-endian float64 payload."""
    names, arrays = param_arrays(params, include_theta=True)
    header = {
        "format": CHECKPOINT_FORMAT,
        "version": 1,
        "config": config.to_json(),
        "seed": config.seed,
        "epoch": int(epoch),
        "p": params.p,
        "k": params.k,
        "e_levels": params.e_levels,
        "names": names,
        "shapes": [list(a.shape) for a in arrays],
    }
    with open(path, "wb") as f:
        f.write(json.dumps(header, sort_keys=True).encode("utf-8"))
        f.write(b"\n")
        for a in arrays:
            f.write(np.ascontiguousarray(a, dtype="<f8").tobytes())
    return path


def load_checkpoint(path):
    """Rebuild (params, config, epoch), validating shapes against the header."""
    with open(path, "rb") as f:
        header_line = f.readline()
        payload = f.read()
    try:
        header = json.loads(header_line.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ParseError(f"{path}: bad checkpoint header: {exc}") from exc
    if header.get("format") != CHECKPOINT_FORMAT:
        raise ParseError(f"{path}: not a checkpoint file")
    config = HyperConfig.from_json(header["config"])
    params = init_hici_params(
        config, int(header["p"]), int(header["k"]), int(header["e_levels"])
    )
    names, arrays = param_arrays(params, include_theta=True)
    if names != header["names"]:
        raise ParseError(f"{path}: parameter names do not match the header")
    shapes = [tuple(s) for s in header["shapes"]]
    if [a.shape for a in arrays] != shapes:
        raise ParseError(f"{path}: parameter shapes do not match the header")
    expected = sum(int(np.prod(s)) for s in shapes) * 8
    if len(payload) != expected:
        raise ParseError(
            f"{path}: payload has {len(payload)} bytes, expected {expected}"
        )
    offset = 0
    for a in arrays:
        count = a.size
        chunk = np.frombuffer(payload, dtype="<f8", count=count, offset=offset)
        a[...] = chunk.reshape(a.shape)
        offset += count * 8
    return params, config, int(header["epoch"])
