import numpy as np
import pytest
from hypothesis import given, strategies as st

from recoursekit.data import (
    DataError,
    Dataset,
    Feature,
    FeatureSchema,
    ManifoldSpec,
    SchemaError,
    credit_schema,
    fit_percentiles,
    load_csv,
    load_schema_file,
    planted_credit_scorer,
    random_orthonormal_manifold,
    save_schema_file,
    split,
    synthesize_credit,
    synthesize_manifold,
    write_csv,
)

CREDIT_HEADER = ",".join(credit_schema().names + ["label"])
# Worked single-row example: mutable financial inputs then age/dependents.
TABLE_ROW = [1.00, 3, 0.19, 2700.00, 3, 4, 0, 0, 36, 3]


def _write(tmp_path, text, name="data.csv"):
    p = tmp_path / name
    p.write_text(text, encoding="utf-8")
    return p


class TestSchema:
    def test_duplicate_names_rejected(self):
        with pytest.raises(SchemaError):
            FeatureSchema((Feature("a"), Feature("a")))

    def test_empty_name_rejected(self):
        with pytest.raises(SchemaError):
            Feature("")

    def test_bounds_ordered(self):
        with pytest.raises(SchemaError):
            Feature("a", lower=2.0, upper=1.0)

    def test_all_immutable_rejected(self):
        with pytest.raises(SchemaError):
            FeatureSchema((Feature("a", mutable=False),))

    def test_schema_file_round_trip(self, tmp_path):
        schema = credit_schema()
        path = tmp_path / "schema.json"
        save_schema_file(schema, "label", path)
        loaded, label = load_schema_file(path)
        assert label == "label"
        assert loaded == schema


class TestLoadCsv:
    def test_table_row_exact(self, tmp_path):
        row = ",".join(str(v) for v in TABLE_ROW)
        path = _write(tmp_path, f"{CREDIT_HEADER}\n{row},0\n")
        ds = load_csv(path, credit_schema(), "label")
        assert ds.n == 1
        assert np.array_equal(ds.X[0], np.array(TABLE_ROW, dtype=float))
        assert ds.y[0] == -1  # 0 remapped

    def test_empty_data_section(self, tmp_path):
        path = _write(tmp_path, CREDIT_HEADER + "\n")
        ds = load_csv(path, credit_schema(), "label")
        assert ds.n == 0

    def test_negative_income_rejected_with_row_and_feature(self, tmp_path):
        bad = TABLE_ROW.copy()
        bad[3] = -5
        row = ",".join(str(v) for v in bad)
        path = _write(tmp_path, f"{CREDIT_HEADER}\n{row},1\n")
        with pytest.raises(DataError, match=r"row 0.*MonthlyIncome"):
            load_csv(path, credit_schema(), "label")

    def test_missing_file(self, tmp_path):
        with pytest.raises(DataError, match="no such file"):
            load_csv(tmp_path / "nope.csv", credit_schema(), "label")

    def test_missing_column(self, tmp_path):
        path = _write(tmp_path, "a,b\n1,2\n")
        with pytest.raises(DataError, match="missing columns"):
            load_csv(path, credit_schema(), "label")

    def test_unparsable_cell(self, tmp_path):
        row = ",".join(str(v) for v in TABLE_ROW[:-1]) + ",oops"
        path = _write(tmp_path, f"{CREDIT_HEADER}\n{row},1\n")
        with pytest.raises(DataError, match="unparsable"):
            load_csv(path, credit_schema(), "label")

    def test_bad_label(self, tmp_path):
        row = ",".join(str(v) for v in TABLE_ROW)
        path = _write(tmp_path, f"{CREDIT_HEADER}\n{row},3\n")
        with pytest.raises(DataError, match="label"):
            load_csv(path, credit_schema(), "label")

    def test_round_trip_identity(self, tmp_path):
        ds = synthesize_credit(50, seed=7)
        p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
        write_csv(ds, p1)
        ds2 = load_csv(p1, ds.schema, "label")
        assert np.array_equal(ds.X, ds2.X)
        assert np.array_equal(ds.y, ds2.y)
        write_csv(ds2, p2)
        assert p1.read_text() == p2.read_text()


class TestPercentiles:
    def test_hand_counted_midpoint(self):
        schema = FeatureSchema((Feature("v"),))
        ds = Dataset(schema, np.array([[1.0], [2.0], [3.0]]), np.array([1, -1, 1]))
        q = fit_percentiles(ds)
        assert q.percentile(0, 2.0) == pytest.approx((1 + 0.5) / 3)

    def test_below_all_references(self):
        q = fit_percentiles(
            Dataset(FeatureSchema((Feature("v"),)), np.array([[1.0], [2.0]]), np.array([1, -1]))
        )
        assert q.percentile(0, 0.0) == 0.0
        assert q.percentile(0, 99.0) == 1.0

    def test_uniform_median(self):
        vals = np.linspace(0.0, 1.0, 101).reshape(-1, 1)
        ds = Dataset(FeatureSchema((Feature("v"),)), vals, np.ones(101, dtype=int))
        q = fit_percentiles(ds)
        assert abs(q.percentile(0, 0.5) - 0.5) < 0.01

    def test_empty_dataset_errors(self):
        ds = Dataset(FeatureSchema((Feature("v"),)), np.empty((0, 1)), np.empty(0, dtype=int))
        with pytest.raises(DataError):
            fit_percentiles(ds)

    @given(
        ref=st.lists(st.floats(-50, 50), min_size=1, max_size=30),
        v1=st.floats(-60, 60),
        v2=st.floats(-60, 60),
    )
    def test_monotone_and_in_range(self, ref, v1, v2):
        from recoursekit.data import PercentileTransform

        q = PercentileTransform([np.array(ref)])
        lo, hi = min(v1, v2), max(v1, v2)
        qlo, qhi = q.percentile(0, lo), q.percentile(0, hi)
        assert 0.0 <= qlo <= qhi <= 1.0


class TestSplit:
    def test_sizes(self):
        ds = synthesize_credit(10, seed=0)
        train, test = split(ds, 0.8, seed=1)
        assert (train.n, test.n) == (8, 2)

    def test_deterministic(self):
        ds = synthesize_credit(40, seed=0)
        a = split(ds, 0.8, seed=5)
        b = split(ds, 0.8, seed=5)
        assert np.array_equal(a[0].X, b[0].X) and np.array_equal(a[1].X, b[1].X)

    def test_partition_is_original_multiset(self):
        ds = synthesize_credit(25, seed=3)
        train, test = split(ds, 0.6, seed=9)
        merged = np.vstack([train.X, test.X])
        key = lambda M: sorted(map(tuple, M))
        assert key(merged) == key(ds.X)

    def test_too_small(self):
        ds = synthesize_credit(1, seed=0)
        with pytest.raises(DataError):
            split(ds, 0.5, seed=0)


class TestSyntheticCredit:
    def test_invariants_hold(self):
        ds = synthesize_credit(1000, seed=11)  # Dataset ctor enforces invariants
        assert ds.n == 1000
        assert set(np.unique(ds.y)) <= {-1, 1}

    def test_seeds_differ(self):
        a = synthesize_credit(100, seed=1)
        b = synthesize_credit(100, seed=2)
        assert not np.array_equal(a.X, b.X)

    def test_planted_scorer_beats_chance(self):
        ds = synthesize_credit(2000, seed=4)
        w, b = planted_credit_scorer()
        pred = np.where(ds.X @ w + b > 0, 1, -1)
        assert np.mean(pred != ds.y) < 0.5


class TestManifold:
    def test_zero_latent_gives_offset(self):
        spec = ManifoldSpec(1, 2, np.array([[1.0], [1.0]]), np.array([0.5, -0.5]))
        assert np.array_equal(spec.map(np.zeros(1)), spec.offset)

    def test_identity_arithmetic(self):
        spec = ManifoldSpec(1, 2, np.array([[1.0], [1.0]]), np.zeros(2))
        assert np.array_equal(spec.map(np.array([3.0])), np.array([3.0, 3.0]))

    def test_rows_match_map_exactly(self):
        spec = random_orthonormal_manifold(2, 6, seed=0)
        ds, Z = synthesize_manifold(spec, 50, seed=1)
        for i in range(ds.n):
            assert np.array_equal(ds.X[i], spec.map(Z[i]))

    def test_least_squares_recovers_codes(self):
        spec = random_orthonormal_manifold(3, 8, seed=2)
        ds, Z = synthesize_manifold(spec, 20, seed=3)
        pinv = np.linalg.pinv(spec.embedding)
        for i in range(ds.n):
            z_hat = pinv @ (ds.X[i] - spec.offset)
            assert np.max(np.abs(z_hat - Z[i])) < 1e-9

    def test_rank_deficient_embedding_rejected(self):
        emb = np.array([[1.0, 2.0], [2.0, 4.0], [0.0, 0.0]])
        with pytest.raises(SchemaError):
            ManifoldSpec(2, 3, emb, np.zeros(3))
