"""Tabular datasets, feature schemas, percentile transforms, synthetic generators.

Feature vectors live in R^d with labels in {-1, +1}. A FeatureSchema pins down,
per feature, whether it may be changed at all (mutable), in which direction,
which likelihood family describes it (count / positive_continuous / real), and
optional bounds. Every search space downstream is governed by the schema.

The percentile transform is the midpoint empirical CDF: ties contribute half,
so the transform is deterministic and symmetric under tie reversal, and its
output always lies in [0, 1].
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass

import numpy as np

DIRECTIONS = ("free", "down_only", "up_only")
LIKELIHOODS = ("count", "positive_continuous", "real")


class SchemaError(ValueError):
    """Invalid feature schema definition."""


class DataError(ValueError):
    """Dataset content violates its schema or the file is malformed."""


@dataclass(frozen=True)
class Feature:
    name: str
    mutable: bool = True
    direction: str = "free"
    likelihood: str = "real"
    lower: float | None = None
    upper: float | None = None

    def __post_init__(self):
        if not self.name:
            raise SchemaError("feature name must be non-empty")
        if self.direction not in DIRECTIONS:
            raise SchemaError(f"unknown direction {self.direction!r} for {self.name}")
        if self.likelihood not in LIKELIHOODS:
            raise SchemaError(f"unknown likelihood {self.likelihood!r} for {self.name}")
        if self.lower is not None and self.upper is not None and self.lower > self.upper:
            raise SchemaError(f"lower > upper for feature {self.name}")


@dataclass(frozen=True)
class FeatureSchema:
    """Ordered feature descriptions; the contract every engine searches under."""

    features: tuple[Feature, ...]

    def __post_init__(self):
        names = [f.name for f in self.features]
        if len(set(names)) != len(names):
            raise SchemaError("feature names must be unique")
        if not any(f.mutable for f in self.features):
            raise SchemaError("schema needs at least one mutable feature")

    @property
    def dim(self) -> int:
        return len(self.features)

    @property
    def names(self) -> list[str]:
        return [f.name for f in self.features]

    def mutable_indices(self) -> list[int]:
        return [j for j, f in enumerate(self.features) if f.mutable]

    def immutable_indices(self) -> list[int]:
        return [j for j, f in enumerate(self.features) if not f.mutable]

    def index_of(self, name: str) -> int:
        for j, f in enumerate(self.features):
            if f.name == name:
                return j
        raise KeyError(name)

    def validate_value(self, j: int, v: float) -> str | None:
        """Return a violation message for feature j holding value v, or None."""
        f = self.features[j]
        if not math.isfinite(v):
            return f"{f.name}: non-finite value {v!r}"
        if f.likelihood == "count" and (v < 0 or v != int(v)):
            return f"{f.name}: count value must be a non-negative integer, got {v!r}"
        if f.likelihood == "positive_continuous" and v <= 0:
            return f"{f.name}: positive_continuous value must be > 0, got {v!r}"
        if f.lower is not None and v < f.lower:
            return f"{f.name}: value {v!r} below lower bound {f.lower!r}"
        if f.upper is not None and v > f.upper:
            return f"{f.name}: value {v!r} above upper bound {f.upper!r}"
        return None

    def validate_row(self, row: np.ndarray) -> str | None:
        if len(row) != self.dim:
            return f"row length {len(row)} != schema dim {self.dim}"
        for j in range(self.dim):
            msg = self.validate_value(j, float(row[j]))
            if msg is not None:
                return msg
        return None

    def to_dict(self, label: str = "label") -> dict:
        return {
            "features": [
                {
                    "name": f.name,
                    "mutable": f.mutable,
                    "direction": f.direction,
                    "likelihood": f.likelihood,
                    "lower": f.lower,
                    "upper": f.upper,
                }
                for f in self.features
            ],
            "label": label,
        }


def schema_from_dict(obj: dict) -> tuple[FeatureSchema, str]:
    """Parse the schema-file JSON object; returns (schema, label column name)."""
    try:
        feats = tuple(
            Feature(
                name=f["name"],
                mutable=bool(f["mutable"]),
                direction=f["direction"],
                likelihood=f["likelihood"],
                lower=f.get("lower"),
                upper=f.get("upper"),
            )
            for f in obj["features"]
        )
        label = obj["label"]
    except KeyError as e:
        raise SchemaError(f"schema file missing key: {e}") from e
    return FeatureSchema(feats), label


def load_schema_file(path) -> tuple[FeatureSchema, str]:
    with open(path, "r", encoding="utf-8") as fh:
        return schema_from_dict(json.load(fh))


def save_schema_file(schema: FeatureSchema, label: str, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(schema.to_dict(label), fh, indent=2)
        fh.write("\n")


@dataclass(frozen=True)
class Dataset:
    """An n x d matrix of schema-valid rows with labels in {-1, +1}."""

    schema: FeatureSchema
    X: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        X = np.asarray(self.X, dtype=float)
        y = np.asarray(self.y, dtype=int)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)
        if X.ndim != 2 or X.shape[1] != self.schema.dim:
            raise DataError(f"X must be n x {self.schema.dim}, got {X.shape}")
        if y.shape != (X.shape[0],):
            raise DataError("labels must be one per row")
        if X.shape[0] and not np.isin(y, (-1, 1)).all():
            raise DataError("labels must lie in {-1, +1}")
        for i in range(X.shape[0]):
            msg = self.schema.validate_row(X[i])
            if msg is not None:
                raise DataError(f"row {i}: {msg}")
        X.setflags(write=False)
        y.setflags(write=False)

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def d(self) -> int:
        return self.schema.dim

    def subset(self, idx) -> "Dataset":
        return Dataset(self.schema, self.X[idx], self.y[idx])


def load_csv(path, schema: FeatureSchema, label_column: str) -> Dataset:
    """Load a comma-separated UTF-8 file into a Dataset.

    The header must contain every schema feature and the label column.
    Labels {0, 1} are remapped to {-1, +1}. Rows that violate the schema's
    type constraints abort the load (silent drops would bias downstream
    risk estimates).
    """
    try:
        fh = open(path, "r", encoding="utf-8", newline="")
    except FileNotFoundError as e:
        raise DataError(f"no such file: {path}") from e
    with fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path}: empty file, no header") from None
        missing = [c for c in schema.names + [label_column] if c not in header]
        if missing:
            raise DataError(f"{path}: missing columns {missing}")
        cols = [header.index(n) for n in schema.names]
        label_col = header.index(label_column)

        rows, labels = [], []
        for i, rec in enumerate(reader):
            if not rec:
                continue
            try:
                vals = [float(rec[c]) for c in cols]
                lab = float(rec[label_col])
            except (ValueError, IndexError) as e:
                raise DataError(f"{path}: row {i}: unparsable cell ({e})") from None
            if lab == 0.0:
                lab = -1.0
            if lab not in (-1.0, 1.0):
                raise DataError(f"{path}: row {i}: label {lab!r} not in {{-1,0,+1}}")
            row = np.array(vals, dtype=float)
            msg = schema.validate_row(row)
            if msg is not None:
                raise DataError(f"{path}: row {i}: {msg}")
            rows.append(row)
            labels.append(int(lab))

    X = np.array(rows, dtype=float) if rows else np.empty((0, schema.dim))
    y = np.array(labels, dtype=int)
    return Dataset(schema, X, y)


def write_csv(dataset: Dataset, path, label_column: str = "label") -> None:
    """Write a Dataset so that load_csv reads back the exact same values.

    Floats are written with repr (shortest round-trip decimal text).
    """
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(dataset.schema.names + [label_column])
        for i in range(dataset.n):
            writer.writerow([repr(float(v)) for v in dataset.X[i]] + [int(dataset.y[i])])


class PercentileTransform:
    """Per-feature midpoint empirical CDF fitted on training data.

    Q_j(v) = (#{ref < v} + 0.5 * #{ref == v}) / n, which is monotone in v and
    always in [0, 1].
    """

    def __init__(self, references: list[np.ndarray], names: list[str] | None = None):
        if not references:
            raise DataError("need at least one reference list")
        self.references = []
        for ref in references:
            ref = np.sort(np.asarray(ref, dtype=float))
            if ref.size == 0:
                raise DataError("empty percentile reference list")
            self.references.append(ref)
        self.names = names

    @property
    def dim(self) -> int:
        return len(self.references)

    def percentile(self, j: int, v) -> np.ndarray | float:
        ref = self.references[j]
        v_arr = np.asarray(v, dtype=float)
        less = np.searchsorted(ref, v_arr, side="left")
        leq = np.searchsorted(ref, v_arr, side="right")
        q = (less + 0.5 * (leq - less)) / ref.size
        return float(q) if np.isscalar(v) or v_arr.ndim == 0 else q

    def percentiles(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.dim:
            raise DataError(f"expected {self.dim} features, got {x.shape[-1]}")
        return np.stack(
            [np.asarray(self.percentile(j, x[..., j])) for j in range(self.dim)], axis=-1
        )

    def anchors(self, j: int) -> dict:
        """min/p25/p50/p75/max of the reference list, for slider rendering."""
        ref = self.references[j]
        return {
            "min": float(ref[0]),
            "p25": float(np.quantile(ref, 0.25)),
            "p50": float(np.quantile(ref, 0.50)),
            "p75": float(np.quantile(ref, 0.75)),
            "max": float(ref[-1]),
        }

    def to_dict(self) -> dict:
        return {
            "references": [ref.tolist() for ref in self.references],
            "names": self.names,
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "PercentileTransform":
        return cls([np.array(r, dtype=float) for r in obj["references"]], obj.get("names"))


def fit_percentiles(train: Dataset) -> PercentileTransform:
    """Fit the midpoint-CDF transform on the training rows of each feature."""
    if train.n < 1:
        raise DataError("cannot fit percentiles on an empty dataset")
    return PercentileTransform(
        [train.X[:, j].copy() for j in range(train.d)], names=train.schema.names
    )


def split(dataset: Dataset, train_fraction: float, seed: int) -> tuple[Dataset, Dataset]:
    """Disjoint row partition of sizes (floor(n * fraction), remainder)."""
    if not 0.0 < train_fraction < 1.0:
        raise DataError(f"train_fraction must be in (0, 1), got {train_fraction}")
    if dataset.n < 2:
        raise DataError("need at least 2 rows to split")
    rng = np.random.default_rng(seed)
    perm = rng.permutation(dataset.n)
    n_train = int(dataset.n * train_fraction)
    return dataset.subset(perm[:n_train]), dataset.subset(perm[n_train:])


# --- synthetic credit data -------------------------------------------------

# Mutable financial history features first, immutables (age, dependents) last.
# DebtRatio may only move downward.
CREDIT_FEATURES = (
    Feature("RevolvingUtilization", True, "free", "positive_continuous"),
    Feature("NumTimes30to59Late", True, "free", "count"),
    Feature("DebtRatio", True, "down_only", "positive_continuous"),
    Feature("MonthlyIncome", True, "free", "positive_continuous"),
    Feature("NumOpenCreditLines", True, "free", "count"),
    Feature("NumTimes90Late", True, "free", "count"),
    Feature("NumRealEstateLoans", True, "free", "count"),
    Feature("NumTimes60to89Late", True, "free", "count"),
    Feature("Age", False, "free", "count"),
    Feature("NumDependents", False, "free", "count"),
)

# Planted logistic ground truth (raw-unit weights). Lateness, utilization and
# debt hurt; income helps. Kept on O(1) feature scales so that unit-norm
# search steps are meaningful for every engine.
_CREDIT_POISSON_RATES = {
    "NumTimes30to59Late": 0.8,
    "NumOpenCreditLines": 3.0,
    "NumTimes90Late": 0.5,
    "NumRealEstateLoans": 0.9,
    "NumTimes60to89Late": 0.4,
    "Age": 40.0,
    "NumDependents": 1.0,
}
_CREDIT_LOGNORMAL = {
    "RevolvingUtilization": (-0.6, 0.7),
    "DebtRatio": (-1.0, 0.6),
    "MonthlyIncome": (1.2, 0.5),
}
_CREDIT_WEIGHTS = np.array(
    [-1.4, -1.1, -1.2, 0.9, 0.15, -1.6, 0.25, -1.3, 0.01, -0.05]
)
_CREDIT_BIAS = 1.9


def credit_schema() -> FeatureSchema:
    return FeatureSchema(CREDIT_FEATURES)


def planted_credit_scorer():
    """Raw-unit (weights, bias) of the logistic ground truth behind synthesize_credit."""
    return _CREDIT_WEIGHTS.copy(), _CREDIT_BIAS


def synthesize_credit(n: int, seed: int) -> Dataset:
    """Draw a schema-valid credit-style dataset with planted logistic labels.

    Counts are Poisson, positive-continuous features log-normal. No claim is
    made of matching any real credit data distribution.
    """
    if n < 1:
        raise DataError("n must be >= 1")
    rng = np.random.default_rng(seed)
    schema = credit_schema()
    cols = []
    for f in schema.features:
        if f.likelihood == "count":
            cols.append(rng.poisson(_CREDIT_POISSON_RATES[f.name], size=n).astype(float))
        else:
            mu, sigma = _CREDIT_LOGNORMAL[f.name]
            cols.append(rng.lognormal(mu, sigma, size=n))
    X = np.column_stack(cols)
    eta = X @ _CREDIT_WEIGHTS + _CREDIT_BIAS
    p = 1.0 / (1.0 + np.exp(-eta))
    y = np.where(rng.random(n) < p, 1, -1)
    return Dataset(schema, X, y)


# --- exact low-dimensional manifold ----------------------------------------


@dataclass(frozen=True)
class ManifoldSpec:
    """Linear generative map h(z) = embedding @ z + offset with k < d.

    Labels are planted by a linear rule in latent space. latent_scale controls
    the seeded standard-normal latent sampler.
    """

    latent_dim: int
    ambient_dim: int
    embedding: np.ndarray
    offset: np.ndarray
    latent_scale: float = 1.0
    label_weights: np.ndarray | None = None
    label_bias: float = 0.0

    def __post_init__(self):
        emb = np.asarray(self.embedding, dtype=float)
        off = np.asarray(self.offset, dtype=float)
        object.__setattr__(self, "embedding", emb)
        object.__setattr__(self, "offset", off)
        if not 0 < self.latent_dim < self.ambient_dim:
            raise SchemaError("need 0 < k < d")
        if emb.shape != (self.ambient_dim, self.latent_dim):
            raise SchemaError(f"embedding must be d x k, got {emb.shape}")
        if off.shape != (self.ambient_dim,):
            raise SchemaError("offset must be a d-vector")
        if np.linalg.matrix_rank(emb) < self.latent_dim:
            raise SchemaError("embedding columns must be linearly independent")
        if self.label_weights is not None:
            w = np.asarray(self.label_weights, dtype=float)
            object.__setattr__(self, "label_weights", w)
            if w.shape != (self.latent_dim,):
                raise SchemaError("label_weights must be a k-vector")

    def map(self, z: np.ndarray) -> np.ndarray:
        """h(z) for a single latent code, exactly embedding @ z + offset."""
        return self.embedding @ np.asarray(z, dtype=float) + self.offset

    def schema(self) -> FeatureSchema:
        return FeatureSchema(
            tuple(Feature(f"x{j}", True, "free", "real") for j in range(self.ambient_dim))
        )


def random_orthonormal_manifold(
    latent_dim: int, ambient_dim: int, seed: int, latent_scale: float = 1.0
) -> ManifoldSpec:
    """ManifoldSpec whose embedding has orthonormal columns (QR of a Gaussian)."""
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((ambient_dim, latent_dim))
    Q, R = np.linalg.qr(A)
    Q = Q * np.sign(np.diag(R))
    offset = rng.standard_normal(ambient_dim) * 0.5
    w = rng.standard_normal(latent_dim)
    w /= np.linalg.norm(w)
    return ManifoldSpec(latent_dim, ambient_dim, Q, offset, latent_scale, w, 0.0)


def synthesize_manifold(spec: ManifoldSpec, n: int, seed: int) -> tuple[Dataset, np.ndarray]:
    """Sample latent codes and push them through h; returns (dataset, codes).

    Each row equals spec.map(z) bit-for-bit for its returned code.
    """
    if n < 1:
        raise DataError("n must be >= 1")
    rng = np.random.default_rng(seed)
    Z = rng.standard_normal((n, spec.latent_dim)) * spec.latent_scale
    X = np.empty((n, spec.ambient_dim))
    for i in range(n):
        X[i] = spec.map(Z[i])
    w = spec.label_weights if spec.label_weights is not None else np.ones(spec.latent_dim)
    y = np.where(Z @ w + spec.label_bias > 0, 1, -1)
    return Dataset(spec.schema(), X, y), Z
