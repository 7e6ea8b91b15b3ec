"""Counterfactual regression under high-dimensional covariates and
high-cardinality (optionally dosed) treatments.

A decorrelating autoencoder representation plus treatment-embedding outcome
heads, trained jointly on a composite loss; synthetic data generators with
full counterfactual ground truth; treatment-effect metrics; and an experiment
CLI with grid search, ablations and a run ledger.
"""

from .datagen import (
    Dataset,
    DatasetMeta,
    Split,
    empirical_treatment_marginal,
    gen_news_like,
    gen_syn,
    load_dataset,
    load_external,
    save_dataset,
    split_dataset,
    subset,
)
from .errors import (
    ConfigError,
    ConsistencyError,
    DataError,
    DomainError,
    HiciError,
    NumericError,
    ParseError,
    ReportInputError,
    ShapeError,
    SplitInfeasibleError,
)
from .losses import (
    LossWeights,
    MeanDiffMatrix,
    PropensityModel,
    fit_propensity,
    loss_21,
    loss_ae,
    loss_ce,
    loss_decorr,
    loss_rmse,
    loss_rmse_dosage,
    loss_total,
    mean_diff_matrix,
    propensity_probs,
)
from .metrics import (
    MetricsReport,
    build_report,
    cf_rmse,
    mape_ate,
    mape_ate_dos,
    mise,
    pehe,
)
from .model import (
    HiCiParams,
    HyperConfig,
    TrainResult,
    VARIANTS,
    apply_variant,
    init_hici_params,
    load_checkpoint,
    predict_all_counterfactuals,
    predict_outcome,
    save_checkpoint,
    train,
)
from .net import (
    AdamState,
    DenseLayer,
    LrSchedule,
    Mlp,
    adam_step,
    backward,
    forward,
    init_params,
    lr_at,
)

__version__ = "0.1.0"
