"""Counterfactual recourse under predictive multiplicity.

Sparse and data-support counterfactual engines for tabular binary
classifiers, an epsilon-level-set model family, and the analytics needed to
verify cost guarantees (oracle inequality, multiplicity cost bound, negative
surprise ordering) on real or synthetic data.
"""

from .data import (
    Dataset,
    Feature,
    FeatureSchema,
    ManifoldSpec,
    PercentileTransform,
    credit_schema,
    fit_percentiles,
    load_csv,
    load_schema_file,
    random_orthonormal_manifold,
    save_schema_file,
    split,
    synthesize_credit,
    synthesize_manifold,
    write_csv,
)
from .models import (
    ForestModel,
    LevelSet,
    LinearModel,
    ScoreModel,
    build_level_set,
    empirical_risk,
    load_model,
    save_model,
    train_forest,
    train_linear,
)
from .autoencoder import (
    AutoencoderModel,
    LinearAutoencoder,
    TrainConfig,
    decode,
    encode,
    load_autoencoder,
    save_autoencoder,
    train_autoencoder,
)
from .engines import (
    ActionGrid,
    RecourseRequest,
    RecourseResult,
    brute_force_recourse,
    build_action_grid,
    check_result,
    grid_recourse,
    growing_spheres,
    joint_recourse,
    latent_recourse,
    project_to_support,
)

__all__ = [name for name in dir() if not name.startswith("_")]
