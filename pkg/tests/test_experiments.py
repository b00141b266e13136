import numpy as np
import pytest

from conftest import small_config
from recoursekit.engines import check_result
from recoursekit.experiments import (
    ConfigError,
    config_hash,
    generate_counterfactuals,
    load_bundle,
    manifold_oracle_table,
    normalize_config,
    power_iteration_top2,
    render_json,
    run_bounds,
    run_costs,
    run_method,
    run_semantics,
    run_transfer,
    save_bundle,
)


class TestConfig:
    def test_defaults_fill(self):
        cfg = normalize_config({})
        assert cfg["epsilon"] == 0.05
        assert cfg["seeds"] == [0, 1, 2, 3, 4]

    def test_unknown_key_rejected(self):
        with pytest.raises(ConfigError):
            normalize_config({"nope": 1})

    def test_unknown_method_rejected(self):
        with pytest.raises(ConfigError):
            normalize_config({"methods": {"dice": {}}})

    def test_hash_stable_under_key_order(self):
        a = config_hash({"a": 1, "b": 2})
        b = config_hash({"b": 2, "a": 1})
        assert a == b


class TestBundle:
    def test_round_trip_through_disk(self, small_bundle, tmp_path):
        path = save_bundle(small_bundle, str(tmp_path))
        loaded = load_bundle(path)
        assert loaded.peer_ids() == small_bundle.peer_ids()
        x = small_bundle.test.X[0]
        for (m1, _), (m2, _) in zip(small_bundle.level_set.peers, loaded.level_set.peers):
            assert abs(m1.score_one(x) - m2.score_one(x)) < 1e-12
        z = small_bundle.ae.encode(x)
        assert np.max(np.abs(loaded.ae.encode(x) - z)) < 1e-12

    def test_peers_within_epsilon(self, small_bundle):
        ls = small_bundle.level_set
        for _, risk in ls.peers:
            assert abs(risk - ls.base_risk) <= ls.epsilon


class TestCounterfactualGeneration:
    def test_all_emitted_rows_pass_recheck(self, small_bundle):
        _pool, per_method = generate_counterfactuals(small_bundle, 10)
        for method, pairs in per_method.items():
            for _i, res in pairs:
                assert check_result(res, (small_bundle.base,), small_bundle.schema) == []

    def test_degenerate_individual_zero_cost(self, small_bundle):
        accepted = np.nonzero(small_bundle.base.decide(small_bundle.test.X) == 1)[0][0]
        x = small_bundle.test.X[accepted]
        for method in small_bundle.methods:
            res = run_method(small_bundle, method, x, seed=0)
            assert res.found and res.norm_cost == 0.0


class TestTransfer:
    def test_deterministic_bytes(self):
        cfg = small_config(n_explain=10)
        a = render_json(run_transfer(cfg))
        b = render_json(run_transfer(cfg))
        assert a == b

    def test_only_base_peer_gives_t_one(self):
        cfg = small_config(n_explain=10, epsilon=-1.0)  # nothing can qualify
        cfg["epsilon"] = 0.0
        cfg["model_grid"] = {"linear_l2": [10.0], "linear_seeds": [0]}
        rep = run_transfer(cfg)
        entry = rep["seeds"][0]["methods"]
        for method in entry:
            if entry[method]["n_found"]:
                base_rows = [p for p in entry[method]["per_peer"]
                             if p["model_id"].startswith("base")]
                assert base_rows[0]["T"] == 1.0

    def test_latent_transfers_best_on_small_run(self):
        rep = run_transfer(small_config())
        means = {m: v[0] for m, v in rep["mean_T_by_method"].items()}
        assert means["latent"] >= means["gs"]
        assert means["latent"] >= means["grid"]


@pytest.fixture(scope="module")
def costs_report():
    return run_costs(small_config())


class TestCosts:

    def test_quantiles_present_and_ordered(self, costs_report):
        report = costs_report
        summary = report["seeds"][0]["summary"]
        for method, entry in summary.items():
            q = entry["cost_total_quantiles"]
            assert q["p5"] <= q["p25"] <= q["p50"] <= q["p75"] <= q["p95"]

    def test_latent_median_highest(self, costs_report):
        report = costs_report
        summary = report["seeds"][0]["summary"]
        latent = summary["latent"]["median_cost_total"]
        assert latent >= summary["gs"]["median_cost_total"]
        assert latent >= summary["grid"]["median_cost_total"]

    def test_grid_cheaper_than_latent_per_individual(self, costs_report):
        report = costs_report
        rows = report["seeds"][0]["rows"]
        paired = [r for r in rows if r["grid"]["found"] and r["latent"]["found"]]
        cheaper = sum(r["grid"]["cost_total"] <= r["latent"]["cost_total"] for r in paired)
        assert cheaper >= 0.8 * len(paired)

    def test_corollary_means(self, costs_report):
        report = costs_report
        corollary = report["seeds"][0]["corollary"]
        assert corollary["gs"]["holds"]
        assert corollary["grid"]["holds"]


class TestBounds:
    def test_small_run_holds_everywhere(self):
        cfg = small_config()
        rep = run_bounds(cfg, n_pairs=3)
        assert rep["bound_pairs"]["holds_count"] == 3
        assert rep["oracle_fixture"]["all_within_bound"]
        assert rep["oracle_fixture"]["corollary_means"]
        per_method = rep["surprise"]["per_method"]
        for tag in per_method:
            assert 0.0 < per_method[tag]["s_bar"] <= 1.0 or per_method[tag]["inconsistent"]

    def test_oracle_table_structure(self):
        table = manifold_oracle_table(n=600, n_points=50, seed=3)
        assert table["n_points"] == 50
        for row in table["rows"]:
            assert row["support_cost"] <= row["bound"]


class TestSemantics:
    def test_histogram_against_itself_identical(self):
        rng = np.random.default_rng(0)
        vals = rng.poisson(2.0, 200).astype(float)
        edges = np.arange(0.0, vals.max() + 2.0)
        a = np.histogram(vals, bins=edges)[0]
        b = np.histogram(vals, bins=edges)[0]
        assert np.array_equal(a, b)

    def test_run_emits_tables(self):
        rep = run_semantics(small_config(n_explain=10))
        assert len(rep["histograms"]) == 3
        for h in rep["histograms"]:
            assert "accepted_correct" in h["counts"]
            assert "cf_latent" in h["counts"]
        assert len(rep["pca"]["components"]) == 2

    def test_missing_semantics_feature(self):
        cfg = small_config()
        cfg["semantics_features"] = ["NoSuchFeature"]
        with pytest.raises(ConfigError):
            run_semantics(cfg)


class TestPowerIterationPCA:
    def test_axis_aligned_components(self):
        rng = np.random.default_rng(1)
        X = np.column_stack([rng.normal(0, 3.0, 400), rng.normal(0, 1.0, 400)])
        comps, eigvals = power_iteration_top2(X)
        assert abs(comps[0] @ np.array([1.0, 0.0])) >= 0.999
        assert abs(comps[1] @ np.array([0.0, 1.0])) >= 0.999

    def test_eigenvalues_match_characteristic_polynomial(self):
        rng = np.random.default_rng(2)
        X = rng.normal(size=(300, 2)) @ np.array([[2.0, 0.7], [0.0, 1.0]])
        comps, eigvals = power_iteration_top2(X)
        C = np.cov(X.T)
        tr, det = np.trace(C), np.linalg.det(C)
        lam1 = (tr + np.sqrt(tr**2 - 4 * det)) / 2
        lam2 = (tr - np.sqrt(tr**2 - 4 * det)) / 2
        assert eigvals[0] == pytest.approx(lam1, abs=1e-6)
        assert eigvals[1] == pytest.approx(lam2, abs=1e-6)

    def test_projected_variance_equals_top2_eigenvalues(self):
        rng = np.random.default_rng(3)
        X = rng.normal(size=(500, 5)) * np.array([3.0, 2.0, 1.0, 0.5, 0.2])
        comps, eigvals = power_iteration_top2(X)
        proj = (X - X.mean(axis=0)) @ comps.T
        total = proj.var(axis=0, ddof=1).sum()
        assert total == pytest.approx(eigvals.sum(), abs=1e-6)
