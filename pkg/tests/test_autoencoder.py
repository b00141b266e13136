import numpy as np
import pytest

from recoursekit.autoencoder import (
    AutoencoderError,
    LinearAutoencoder,
    TrainConfig,
    _init_params,
    decode,
    encode,
    load_autoencoder,
    save_autoencoder,
    train_autoencoder,
)
from recoursekit.data import (
    Dataset,
    Feature,
    FeatureSchema,
    random_orthonormal_manifold,
    synthesize_credit,
    synthesize_manifold,
)

MIXED_SCHEMA = FeatureSchema(
    (
        Feature("cnt", True, "free", "count"),
        Feature("pos", True, "free", "positive_continuous"),
        Feature("val", True, "free", "real"),
    )
)


def mixed_dataset(n=40, seed=0):
    rng = np.random.default_rng(seed)
    X = np.column_stack(
        [
            rng.poisson(2.0, n).astype(float),
            rng.lognormal(0.0, 0.5, n),
            rng.normal(0.0, 1.0, n),
        ]
    )
    y = np.where(rng.random(n) < 0.5, 1, -1)
    y[0], y[1] = 1, -1
    return Dataset(MIXED_SCHEMA, X, y)


@pytest.fixture(scope="module")
def manifold_ae():
    spec = random_orthonormal_manifold(2, 6, seed=0)
    ds, Z = synthesize_manifold(spec, 600, seed=1)
    cfg = TrainConfig(epochs=200, learning_rate=3e-3, kl_weight=0.01, batch_size=64, seed=0)
    model = train_autoencoder(ds, k=2, config=cfg)
    return spec, ds, Z, model


class TestTraining:
    def test_zero_epochs_is_seeded_init(self):
        ds = mixed_dataset()
        cfg = TrainConfig(epochs=0, seed=5)
        model = train_autoencoder(ds, k=2, config=cfg)
        fresh = _init_params(3, 2, model.n_out, model.hidden, seed=5)
        for key, v in model.params.items():
            assert np.array_equal(v, fresh[key])

    def test_requires_k_below_d(self):
        with pytest.raises(AutoencoderError):
            train_autoencoder(mixed_dataset(), k=3, config=TrainConfig(epochs=1))

    def test_kl_zero_objective_is_pure_reconstruction(self):
        ds = mixed_dataset()
        model = train_autoencoder(ds, k=2, config=TrainConfig(epochs=1, seed=0))
        eps = np.zeros((ds.n, 2))
        with_kl, _ = model.objective_and_grads(ds.X, eps, kl_weight=0.3)
        plain, _ = model.objective_and_grads(ds.X, eps, kl_weight=0.0)
        U = model._standardize(ds.X)
        _, _, mu, lv = model._encode_forward(U)
        kl = 0.5 * np.sum(mu**2 + np.exp(lv) - 1.0 - lv, axis=1).mean()
        assert abs(with_kl - (plain + 0.3 * kl)) < 1e-9

    def test_objective_trend_downward(self, manifold_ae):
        _, _, _, model = manifold_ae
        assert model.loss_history[-1] <= model.loss_history[0]

    def test_deterministic_for_seed(self):
        ds = mixed_dataset(60, seed=2)
        cfg = TrainConfig(epochs=3, seed=11)
        a = train_autoencoder(ds, k=2, config=cfg)
        b = train_autoencoder(ds, k=2, config=cfg)
        for key in a.params:
            assert np.array_equal(a.params[key], b.params[key])


class TestGradients:
    def test_analytic_matches_central_differences(self):
        ds = mixed_dataset(5, seed=3)
        model = train_autoencoder(ds, k=2, config=TrainConfig(epochs=0, seed=1))
        rng = np.random.default_rng(0)
        eps = rng.standard_normal((5, 2))
        kl_w = 0.25
        _, grads = model.objective_and_grads(ds.X, eps, kl_w)
        step = 1e-5
        for key, arr in model.params.items():
            flat = arr.reshape(-1)
            num = np.empty_like(flat)
            for i in range(flat.size):
                orig = flat[i]
                flat[i] = orig + step
                hi, _ = model.objective_and_grads(ds.X, eps, kl_w)
                flat[i] = orig - step
                lo, _ = model.objective_and_grads(ds.X, eps, kl_w)
                flat[i] = orig
                num[i] = (hi - lo) / (2 * step)
            ana = grads[key].reshape(-1)
            denom = np.maximum(np.abs(ana) + np.abs(num), 1e-6)
            rel = np.abs(ana - num) / denom
            assert rel.max() < 1e-4, f"gradient mismatch in {key}: {rel.max()}"


class TestEncodeDecode:
    def test_encode_deterministic(self):
        model = train_autoencoder(mixed_dataset(), k=2, config=TrainConfig(epochs=2, seed=0))
        x = mixed_dataset().X[0]
        assert np.array_equal(encode(model, x), encode(model, x))

    def test_encode_of_mean_vector_is_finite(self):
        ds = mixed_dataset()
        model = train_autoencoder(ds, k=2, config=TrainConfig(epochs=2, seed=0))
        # a schema-valid central row: means of each feature projected to support
        x = np.array([round(ds.X[:, 0].mean()), ds.X[:, 1].mean(), ds.X[:, 2].mean()])
        assert np.all(np.isfinite(encode(model, x)))

    def test_decode_respects_support(self):
        model = train_autoencoder(mixed_dataset(), k=2, config=TrainConfig(epochs=2, seed=0))
        rng = np.random.default_rng(4)
        for _ in range(50):
            x = decode(model, rng.standard_normal(2) * 3)
            assert model.schema.validate_row(x) is None

    def test_count_head_rounds_to_nearest(self):
        # rate 2.4 must decode to 2
        model = train_autoencoder(mixed_dataset(), k=2, config=TrainConfig(epochs=0, seed=0))
        rate = np.array([2.4, 0.2, 2.6])
        assert np.array_equal(np.maximum(np.floor(rate + 0.5), 0.0), [2.0, 0.0, 3.0])

    def test_dimension_mismatch(self):
        model = train_autoencoder(mixed_dataset(), k=2, config=TrainConfig(epochs=0, seed=0))
        with pytest.raises(AutoencoderError):
            encode(model, np.zeros(5))
        with pytest.raises(AutoencoderError):
            decode(model, np.array([np.nan, 0.0]))

    def test_manifold_reconstruction_within_ten_percent(self, manifold_ae):
        spec, ds, Z, model = manifold_ae
        # oracle: exact linear reconstruction via the pseudo-inverse is perfect
        pinv = np.linalg.pinv(spec.embedding)
        exact = (ds.X - spec.offset) @ pinv.T @ spec.embedding.T + spec.offset
        assert np.max(np.abs(exact - ds.X)) < 1e-9
        recon = model.decode_batch(model.encode_batch(ds.X))
        err = np.mean(np.abs(recon - ds.X))
        scale = np.mean(ds.X.std(axis=0))
        assert err <= 0.10 * scale

    def test_duplicate_latents_encode_identically(self, manifold_ae):
        spec, ds, Z, model = manifold_ae
        x = spec.map(Z[0])
        assert np.max(np.abs(model.encode(x) - model.encode(spec.map(Z[0])))) < 1e-2


class TestLinearAutoencoder:
    def test_exact_round_trip(self):
        spec = random_orthonormal_manifold(2, 6, seed=7)
        ds, Z = synthesize_manifold(spec, 30, seed=8)
        ae = LinearAutoencoder(ds.schema, spec.embedding, spec.offset)
        for i in range(ds.n):
            z = ae.encode(ds.X[i])
            assert np.max(np.abs(z - Z[i])) < 1e-9
            assert np.max(np.abs(ae.decode(z) - ds.X[i])) < 1e-9

    def test_identity_fixture(self):
        schema = FeatureSchema((Feature("a"), Feature("b")))
        ae = LinearAutoencoder.identity(schema)
        x = np.array([1.5, -2.0])
        assert np.array_equal(ae.encode(x), x)
        assert np.array_equal(ae.decode(x), x)


class TestSerialization:
    def test_bundle_round_trip_exact(self, tmp_path):
        ds = synthesize_credit(200, seed=0)
        model = train_autoencoder(ds, k=3, config=TrainConfig(epochs=3, seed=0))
        path = tmp_path / "ae.json"
        save_autoencoder(model, path)
        loaded = load_autoencoder(path)
        x = ds.X[0]
        assert np.max(np.abs(encode(model, x) - encode(loaded, x))) < 1e-12
        z = encode(model, x)
        assert np.max(np.abs(decode(model, z) - decode(loaded, z))) < 1e-12
