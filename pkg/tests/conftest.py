import pytest

from recoursekit.experiments import build_bundle, normalize_config

SMALL_CONFIG = {
    "dataset": {"type": "synthetic_credit", "n": 600, "seed": 0},
    "linear_epochs": 80,
    "model_grid": {"linear_l2": [1e-3, 1e-2, 1e-1], "linear_seeds": [0, 1]},
    "autoencoder": {"latent_dim": 3, "epochs": 10, "learning_rate": 3e-3,
                    "kl_weight": 0.05, "batch_size": 64},
    "methods": {
        "gs": {"step": 0.1, "budget": 2000, "max_shells": 50},
        "grid": {"resolution": 0.2, "objective": "total_shift"},
        "latent": {"step": 0.1, "budget": 2000, "max_shells": 50},
    },
    "n_explain": 25,
    "seeds": [0],
}


def small_config(**overrides) -> dict:
    cfg = {k: (dict(v) if isinstance(v, dict) else list(v) if isinstance(v, list) else v)
           for k, v in SMALL_CONFIG.items()}
    cfg.update(overrides)
    return cfg


@pytest.fixture(scope="session")
def small_bundle():
    return build_bundle(normalize_config(small_config()), seed=0)
