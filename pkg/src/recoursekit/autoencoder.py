"""KL-regularized autoencoder for tabular rows with per-feature likelihood heads.

The network is a small two-hidden-layer MLP pair (width 32, tanh) written in
numpy with hand-derived gradients. Feature families get different heads:

  count                Poisson rate via softplus, decoded by rounding the rate
  positive_continuous  Gaussian on the standardized log value, decoded by exp
  real                 Gaussian on the standardized value

Encoding returns the latent posterior mean and decoding returns head means,
so both maps are deterministic; sampling only happens inside training. This
is the practical stand-in for a perfect generative map: a single continuous
latent is enough for latent-space counterfactual search.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .data import Dataset, FeatureSchema

HIDDEN_WIDTH = 32
_RATE_FLOOR = 1e-6


class AutoencoderError(RuntimeError):
    pass


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 60
    learning_rate: float = 3e-3
    kl_weight: float = 0.05
    batch_size: int = 64
    seed: int = 0

    def __post_init__(self):
        if self.epochs < 0:
            raise AutoencoderError("epochs must be >= 0")
        if self.batch_size < 1:
            raise AutoencoderError("batch_size must be >= 1")
        if self.kl_weight < 0:
            raise AutoencoderError("kl_weight must be >= 0")


def _softplus(a):
    return np.maximum(a, 0.0) + np.log1p(np.exp(-np.abs(a)))


def _head_layout(schema: FeatureSchema):
    """Per feature: (family, first param index); Gaussian heads take 2 slots."""
    layout = []
    p = 0
    for f in schema.features:
        if f.likelihood == "count":
            layout.append(("count", p))
            p += 1
        else:
            layout.append(("gauss", p))
            p += 2
    return layout, p


def _init_params(d: int, k: int, n_out: int, hidden: int, seed: int) -> dict:
    rng = np.random.default_rng(seed)

    def glorot(n_in, n_o):
        return rng.normal(0.0, math.sqrt(1.0 / n_in), size=(n_in, n_o))

    return {
        "W1": glorot(d, hidden),
        "b1": np.zeros(hidden),
        "W2": glorot(hidden, hidden),
        "b2": np.zeros(hidden),
        "Wm": glorot(hidden, k),
        "bm": np.zeros(k),
        "Wv": glorot(hidden, k) * 0.1,
        "bv": np.zeros(k),
        "U1": glorot(k, hidden),
        "c1": np.zeros(hidden),
        "U2": glorot(hidden, hidden),
        "c2": np.zeros(hidden),
        "Uo": glorot(hidden, n_out),
        "co": np.zeros(n_out),
    }


class AutoencoderModel:
    """Encoder/decoder pair over a schema, with stored standardization."""

    def __init__(self, schema: FeatureSchema, latent_dim: int, params: dict,
                 mean_t: np.ndarray, scale_t: np.ndarray, hidden: int = HIDDEN_WIDTH):
        if latent_dim >= schema.dim:
            raise AutoencoderError("latent dimension must be < feature dimension")
        self.schema = schema
        self.latent_dim = latent_dim
        self.params = params
        self.mean_t = np.asarray(mean_t, dtype=float)
        self.scale_t = np.asarray(scale_t, dtype=float)
        self.hidden = hidden
        self.layout, self.n_out = _head_layout(schema)
        self.loss_history: list[float] = []

    # transformed (pre-standardization) coordinates
    def _to_t(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        T = X.copy()
        for j, f in enumerate(self.schema.features):
            if f.likelihood == "positive_continuous":
                T[:, j] = np.log(X[:, j])
        return T

    def _standardize(self, X: np.ndarray) -> np.ndarray:
        return (self._to_t(X) - self.mean_t) / self.scale_t

    def _encode_forward(self, U: np.ndarray):
        p = self.params
        h1 = np.tanh(U @ p["W1"] + p["b1"])
        h2 = np.tanh(h1 @ p["W2"] + p["b2"])
        mu = h2 @ p["Wm"] + p["bm"]
        lv = h2 @ p["Wv"] + p["bv"]
        return h1, h2, mu, lv

    def _decode_forward(self, Z: np.ndarray):
        p = self.params
        g1 = np.tanh(Z @ p["U1"] + p["c1"])
        g2 = np.tanh(g1 @ p["U2"] + p["c2"])
        out = g2 @ p["Uo"] + p["co"]
        return g1, g2, out

    def encode(self, x: np.ndarray) -> np.ndarray:
        """Latent posterior mean for a single row (no sampling)."""
        x = np.asarray(x, dtype=float)
        if x.shape != (self.schema.dim,):
            raise AutoencoderError(f"expected a {self.schema.dim}-vector, got {x.shape}")
        _, _, mu, _ = self._encode_forward(self._standardize(x[None, :]))
        return mu[0]

    def encode_batch(self, X: np.ndarray) -> np.ndarray:
        _, _, mu, _ = self._encode_forward(self._standardize(X))
        return mu

    def decode(self, z: np.ndarray) -> np.ndarray:
        z = np.asarray(z, dtype=float)
        if not np.all(np.isfinite(z)):
            raise AutoencoderError("non-finite latent code")
        return self.decode_batch(z[None, :])[0]

    def decode_batch(self, Z: np.ndarray) -> np.ndarray:
        """Head means mapped back to original units; always schema-supported."""
        Z = np.atleast_2d(np.asarray(Z, dtype=float))
        _, _, out = self._decode_forward(Z)
        X = np.empty((Z.shape[0], self.schema.dim))
        for j, f in enumerate(self.schema.features):
            fam, p = self.layout[j]
            if fam == "count":
                rate = _softplus(out[:, p]) + _RATE_FLOOR
                X[:, j] = np.maximum(np.floor(rate + 0.5), 0.0)
            else:
                m = out[:, p] * self.scale_t[j] + self.mean_t[j]
                if f.likelihood == "positive_continuous":
                    X[:, j] = np.exp(m)
                else:
                    X[:, j] = m
        return X

    # --- objective and analytic gradients ------------------------------------

    def objective_and_grads(self, X: np.ndarray, eps: np.ndarray, kl_weight: float):
        """Mean negative log-likelihood + kl_weight * KL, with parameter grads.

        eps is the (fixed) reparametrization noise, shape (batch, k).
        """
        p = self.params
        B = X.shape[0]
        U = self._standardize(X)
        h1, h2, mu, lv = self._encode_forward(U)
        sigma = np.exp(0.5 * lv)
        Z = mu + sigma * eps
        g1, g2, out = self._decode_forward(Z)

        nll = np.zeros(B)
        d_out = np.zeros_like(out)
        for j, f in enumerate(self.schema.features):
            fam, q = self.layout[j]
            if fam == "count":
                a = out[:, q]
                rate = _softplus(a) + _RATE_FLOOR
                xj = X[:, j]
                nll += rate - xj * np.log(rate) + _lgamma1p(xj)
                d_out[:, q] = (1.0 - xj / rate) / (1.0 + np.exp(-a))
            else:
                m, lvf = out[:, q], out[:, q + 1]
                r = U[:, j] - m
                inv_v = np.exp(-lvf)
                nll += 0.5 * (math.log(2 * math.pi) + lvf + r * r * inv_v)
                d_out[:, q] = -r * inv_v
                d_out[:, q + 1] = 0.5 * (1.0 - r * r * inv_v)

        kl = 0.5 * np.sum(mu * mu + np.exp(lv) - 1.0 - lv, axis=1)
        objective = float(np.mean(nll + kl_weight * kl))

        # backprop (all grads of the batch mean, hence the final 1/B)
        grads = {}
        d_g2 = d_out @ p["Uo"].T
        grads["Uo"] = g2.T @ d_out
        grads["co"] = d_out.sum(axis=0)
        d_g2p = d_g2 * (1.0 - g2 * g2)
        d_g1 = d_g2p @ p["U2"].T
        grads["U2"] = g1.T @ d_g2p
        grads["c2"] = d_g2p.sum(axis=0)
        d_g1p = d_g1 * (1.0 - g1 * g1)
        d_z = d_g1p @ p["U1"].T
        grads["U1"] = Z.T @ d_g1p
        grads["c1"] = d_g1p.sum(axis=0)

        d_mu = d_z + kl_weight * mu
        d_lv = d_z * (0.5 * sigma * eps) + kl_weight * 0.5 * (np.exp(lv) - 1.0)
        d_h2 = d_mu @ p["Wm"].T + d_lv @ p["Wv"].T
        grads["Wm"] = h2.T @ d_mu
        grads["bm"] = d_mu.sum(axis=0)
        grads["Wv"] = h2.T @ d_lv
        grads["bv"] = d_lv.sum(axis=0)
        d_h2p = d_h2 * (1.0 - h2 * h2)
        d_h1 = d_h2p @ p["W2"].T
        grads["W2"] = h1.T @ d_h2p
        grads["b2"] = d_h2p.sum(axis=0)
        d_h1p = d_h1 * (1.0 - h1 * h1)
        grads["W1"] = U.T @ d_h1p
        grads["b1"] = d_h1p.sum(axis=0)

        for key in grads:
            grads[key] = grads[key] / B
        return objective, grads

    # --- serialization --------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "latent_dim": self.latent_dim,
            "hidden": self.hidden,
            "mean_t": self.mean_t.tolist(),
            "scale_t": self.scale_t.tolist(),
            "params": {k: v.tolist() for k, v in self.params.items()},
            "schema": self.schema.to_dict(),
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "AutoencoderModel":
        from .data import schema_from_dict

        schema, _ = schema_from_dict(obj["schema"])
        params = {k: np.array(v, dtype=float) for k, v in obj["params"].items()}
        return cls(schema, obj["latent_dim"], params, obj["mean_t"], obj["scale_t"],
                   obj["hidden"])


def _lgamma1p(x: np.ndarray) -> np.ndarray:
    return np.array([math.lgamma(v + 1.0) for v in x])


def save_autoencoder(model: AutoencoderModel, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(model.to_dict(), fh)


def load_autoencoder(path) -> AutoencoderModel:
    with open(path, "r", encoding="utf-8") as fh:
        return AutoencoderModel.from_dict(json.load(fh))


def train_autoencoder(train: Dataset, k: int, config: TrainConfig) -> AutoencoderModel:
    """Fit by minibatch Adam on the negative log-likelihood + KL objective.

    Deterministic for a fixed config seed (batch order and reparametrization
    noise both come from the same generator). With epochs = 0 the seeded
    initialization is returned unchanged.
    """
    if train.n == 0:
        raise AutoencoderError("empty training set")
    if k >= train.d:
        raise AutoencoderError("need k < d")

    schema = train.schema
    layout, n_out = _head_layout(schema)
    # standardization in transformed coordinates (log for positive features)
    T = np.empty_like(train.X)
    for j, f in enumerate(schema.features):
        T[:, j] = np.log(train.X[:, j]) if f.likelihood == "positive_continuous" else train.X[:, j]
    mean_t = T.mean(axis=0)
    scale_t = T.std(axis=0)
    scale_t[scale_t == 0.0] = 1.0

    params = _init_params(train.d, k, n_out, HIDDEN_WIDTH, config.seed)
    model = AutoencoderModel(schema, k, params, mean_t, scale_t)

    rng = np.random.default_rng(config.seed + 1)
    adam_m = {key: np.zeros_like(v) for key, v in params.items()}
    adam_v = {key: np.zeros_like(v) for key, v in params.items()}
    beta1, beta2, adam_eps = 0.9, 0.999, 1e-8
    step = 0

    for epoch in range(config.epochs):
        order = rng.permutation(train.n)
        batch_losses = []
        for bi, start in enumerate(range(0, train.n, config.batch_size)):
            idx = order[start:start + config.batch_size]
            X = train.X[idx]
            eps = rng.standard_normal((len(idx), k))
            objective, grads = model.objective_and_grads(X, eps, config.kl_weight)
            if not np.isfinite(objective):
                raise AutoencoderError(f"non-finite objective at epoch {epoch}, batch {bi}")
            batch_losses.append(objective)
            step += 1
            lr_t = config.learning_rate * math.sqrt(1 - beta2**step) / (1 - beta1**step)
            for key, g in grads.items():
                adam_m[key] = beta1 * adam_m[key] + (1 - beta1) * g
                adam_v[key] = beta2 * adam_v[key] + (1 - beta2) * g * g
                params[key] -= lr_t * adam_m[key] / (np.sqrt(adam_v[key]) + adam_eps)
        model.loss_history.append(float(np.mean(batch_losses)))
    return model


class LinearAutoencoder:
    """Exact linear codec x = embedding @ z + offset (pseudo-inverse encoder).

    Drop-in for AutoencoderModel wherever only encode/decode are needed; used
    as the oracle generative map on synthetic manifolds, including the k = d
    identity fixture.
    """

    def __init__(self, schema: FeatureSchema, embedding: np.ndarray, offset: np.ndarray):
        self.schema = schema
        self.embedding = np.asarray(embedding, dtype=float)
        self.offset = np.asarray(offset, dtype=float)
        self.latent_dim = self.embedding.shape[1]
        self._pinv = np.linalg.pinv(self.embedding)

    @classmethod
    def identity(cls, schema: FeatureSchema) -> "LinearAutoencoder":
        d = schema.dim
        return cls(schema, np.eye(d), np.zeros(d))

    def encode(self, x: np.ndarray) -> np.ndarray:
        return self._pinv @ (np.asarray(x, dtype=float) - self.offset)

    def decode(self, z: np.ndarray) -> np.ndarray:
        return self.embedding @ np.asarray(z, dtype=float) + self.offset

    def decode_batch(self, Z: np.ndarray) -> np.ndarray:
        return np.atleast_2d(Z) @ self.embedding.T + self.offset


def encode(model, x: np.ndarray) -> np.ndarray:
    """Latent code (posterior mean) of a single row."""
    return model.encode(x)


def decode(model, z: np.ndarray) -> np.ndarray:
    """Original-unit reconstruction of a single latent code."""
    return model.decode(z)
