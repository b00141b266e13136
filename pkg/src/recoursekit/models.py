"""Binary scorers trained from scratch, plus epsilon-level-set construction.

Every model maps a d-vector to a real score; the decision is +1 iff the score
is strictly positive (ties on the boundary classify negative). A LevelSet
collects near-equally-accurate peers of a base model: the family across which
counterfactual recommendations ought to stay valid.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .data import Dataset


class TrainingError(RuntimeError):
    """Training preconditions violated or the objective diverged."""


class ScoreModel:
    """Deterministic real-valued scorer with sign decisions."""

    family = "abstract"

    def scores(self, X: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def score_one(self, x: np.ndarray) -> float:
        return float(self.scores(np.asarray(x, dtype=float)[None, :])[0])

    def decide(self, X: np.ndarray) -> np.ndarray:
        return np.where(self.scores(X) > 0.0, 1, -1)

    def decide_one(self, x: np.ndarray) -> int:
        return 1 if self.score_one(x) > 0.0 else -1

    @property
    def model_id(self) -> str:
        raise NotImplementedError


class LinearModel(ScoreModel):
    """score(x) = <weights, (x - mean) / scale> + bias."""

    family = "linear"

    def __init__(self, weights, bias, mean=None, scale=None, meta=None):
        self.weights = np.asarray(weights, dtype=float)
        self.bias = float(bias)
        d = self.weights.shape[0]
        self.mean = np.zeros(d) if mean is None else np.asarray(mean, dtype=float)
        self.scale = np.ones(d) if scale is None else np.asarray(scale, dtype=float)
        self.meta = dict(meta or {})
        self.loss_history: list[float] = []

    def scores(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        return ((X - self.mean) / self.scale) @ self.weights + self.bias

    def raw_weights(self) -> tuple[np.ndarray, float]:
        """(w, b) in original feature units, so score(x) = w @ x + b."""
        w = self.weights / self.scale
        b = self.bias - float(w @ self.mean)
        return w, b

    def unit_normalized(self) -> "LinearModel":
        """Same decision boundary, raw weight vector rescaled to unit norm."""
        w, b = self.raw_weights()
        nrm = float(np.linalg.norm(w))
        if nrm == 0.0:
            raise ValueError("zero weight vector cannot be normalized")
        return LinearModel(w / nrm, b / nrm, meta={**self.meta, "unit_norm": True})

    @property
    def model_id(self) -> str:
        if "id" in self.meta:
            return self.meta["id"]
        l2 = self.meta.get("l2_strength", 0.0)
        seed = self.meta.get("seed", 0)
        return f"linear(l2={l2:g},seed={seed})"


def _logistic_objective(Xs, y, w, b, l2):
    margins = y * (Xs @ w + b)
    loss = float(np.mean(np.logaddexp(0.0, -margins))) + l2 * float(w @ w)
    return loss, margins


def train_linear(
    train: Dataset,
    l2_strength: float = 1e-3,
    epochs: int = 300,
    learning_rate: float = 0.5,
    seed: int = 0,
) -> LinearModel:
    """Full-batch gradient descent on mean logistic loss + l2 * ||w||^2.

    The step is backtracked (halved) whenever it would increase the
    objective, so the per-epoch loss trace is non-increasing. Inputs are
    standardized internally; the standardization is stored on the model so
    scoring consumes original units.
    """
    if train.n == 0:
        raise TrainingError("empty training set")
    labels = set(np.unique(train.y).tolist())
    if labels != {-1, 1}:
        raise TrainingError(f"need both labels in training data, got {sorted(labels)}")
    if l2_strength < 0:
        raise TrainingError("l2_strength must be >= 0")

    mean = train.X.mean(axis=0)
    scale = train.X.std(axis=0)
    scale[scale == 0.0] = 1.0
    Xs = (train.X - mean) / scale
    y = train.y.astype(float)

    rng = np.random.default_rng(seed)
    w = rng.normal(0.0, 0.01, size=train.d)
    b = 0.0
    model_meta = {"l2_strength": l2_strength, "epochs": epochs, "seed": seed}

    loss, margins = _logistic_objective(Xs, y, w, b, l2_strength)
    history = [loss]
    lr = learning_rate
    for epoch in range(epochs):
        if not np.isfinite(loss):
            raise TrainingError(f"non-finite loss at epoch {epoch}")
        # dL/ds = -y * sigmoid(-y s)
        grad_s = -y / (1.0 + np.exp(margins)) / train.n
        grad_w = Xs.T @ grad_s + 2.0 * l2_strength * w
        grad_b = float(np.sum(grad_s))
        while True:
            w_new = w - lr * grad_w
            b_new = b - lr * grad_b
            loss_new, margins_new = _logistic_objective(Xs, y, w_new, b_new, l2_strength)
            if np.isfinite(loss_new) and loss_new <= loss + 1e-12:
                break
            lr *= 0.5
            if lr < 1e-12:
                loss_new, margins_new = loss, margins
                w_new, b_new = w, b
                break
        w, b, loss, margins = w_new, b_new, loss_new, margins_new
        history.append(loss)

    model = LinearModel(w, b, mean, scale, meta=model_meta)
    model.loss_history = history
    return model


# --- decision trees / forest -------------------------------------------------


def _gini_best_split(X, y01, idx):
    """Best (feature, threshold, gain) by exhaustive Gini over all features."""
    n = idx.size
    total_pos = int(y01[idx].sum())
    p = total_pos / n
    parent_impurity = 2.0 * p * (1.0 - p)
    if parent_impurity == 0.0:
        return None
    best = None  # (neg_gain, feature, threshold)
    for j in range(X.shape[1]):
        col = X[idx, j]
        order = np.argsort(col, kind="stable")
        vals = col[order]
        pos = y01[idx][order]
        cum_pos = np.cumsum(pos)
        # split after position i (left = first i+1 samples); only where value changes
        cut = np.nonzero(vals[:-1] < vals[1:])[0]
        if cut.size == 0:
            continue
        n_left = cut + 1
        n_right = n - n_left
        pos_left = cum_pos[cut]
        pos_right = total_pos - pos_left
        pl = pos_left / n_left
        pr = pos_right / n_right
        child = (n_left * 2 * pl * (1 - pl) + n_right * 2 * pr * (1 - pr)) / n
        gains = parent_impurity - child
        i_best = int(np.argmax(gains))
        if gains[i_best] <= 1e-12:
            continue
        thr = 0.5 * (vals[cut[i_best]] + vals[cut[i_best] + 1])
        cand = (-gains[i_best], j, float(thr))
        if best is None or cand < best:
            best = cand
    if best is None:
        return None
    neg_gain, j, thr = best
    return j, thr


def _grow_tree(X, y01, idx, depth, max_depth, rng):
    n = idx.size
    mean_label = 2.0 * float(y01[idx].mean()) - 1.0  # leaf value in [-1, 1]
    if depth >= max_depth or n < 2:
        return {"leaf": mean_label}
    found = _gini_best_split(X, y01, idx)
    if found is None:
        return {"leaf": mean_label}
    j, thr = found
    left = idx[X[idx, j] <= thr]
    right = idx[X[idx, j] > thr]
    return {
        "feature": j,
        "threshold": thr,
        "left": _grow_tree(X, y01, left, depth + 1, max_depth, rng),
        "right": _grow_tree(X, y01, right, depth + 1, max_depth, rng),
    }


def _tree_scores(node, X, out, mask):
    if "leaf" in node:
        out[mask] = node["leaf"]
        return
    go_left = mask & (X[:, node["feature"]] <= node["threshold"])
    _tree_scores(node["left"], X, out, go_left)
    _tree_scores(node["right"], X, out, mask & ~go_left)


class ForestModel(ScoreModel):
    """Bagged Gini trees; score = mean leaf value in [-1, +1], threshold 0."""

    family = "forest"

    def __init__(self, trees: list[dict], meta=None):
        if not trees:
            raise TrainingError("forest needs at least one tree")
        self.trees = trees
        self.meta = dict(meta or {})

    def scores(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.ndim != 2:
            X = X[None, :]
        acc = np.zeros(X.shape[0])
        buf = np.empty(X.shape[0])
        for tree in self.trees:
            _tree_scores(tree, X, buf, np.ones(X.shape[0], dtype=bool))
            acc += buf
        return acc / len(self.trees)

    @property
    def model_id(self) -> str:
        if "id" in self.meta:
            return self.meta["id"]
        return (
            f"forest(trees={self.meta.get('n_trees')},"
            f"depth={self.meta.get('max_depth')},seed={self.meta.get('seed', 0)})"
        )


def train_forest(train: Dataset, n_trees: int, max_depth: int, seed: int = 0) -> ForestModel:
    """Grow n_trees bagged trees greedily on Gini impurity (all features considered)."""
    if n_trees < 1:
        raise TrainingError("n_trees must be >= 1")
    if max_depth < 1:
        raise TrainingError("max_depth must be >= 1")
    if train.n == 0 or set(np.unique(train.y).tolist()) != {-1, 1}:
        raise TrainingError("need a non-empty training set with both labels")
    rng = np.random.default_rng(seed)
    y01 = (train.y > 0).astype(float)
    trees = []
    for _ in range(n_trees):
        boot = rng.integers(0, train.n, size=train.n)
        trees.append(_grow_tree(train.X, y01, boot, 0, max_depth, rng))
    return ForestModel(trees, meta={"n_trees": n_trees, "max_depth": max_depth, "seed": seed})


# --- risk and level sets ------------------------------------------------------


def empirical_risk(model: ScoreModel, data: Dataset) -> float:
    """Fraction of rows whose decision disagrees with the label."""
    if data.n == 0:
        raise ValueError("empirical risk of an empty dataset is undefined")
    return float(np.mean(model.decide(data.X) != data.y))


@dataclass(frozen=True)
class LevelSet:
    """Peers whose reference risk sits within epsilon of the base risk."""

    base: ScoreModel
    peers: tuple[tuple[ScoreModel, float], ...]
    epsilon: float
    base_risk: float
    only_base: bool = False

    def models(self) -> list[ScoreModel]:
        return [m for m, _ in self.peers]

    def model_by_id(self, model_id: str) -> ScoreModel:
        for m, _ in self.peers:
            if m.model_id == model_id:
                return m
        raise KeyError(model_id)


def build_level_set(
    base: ScoreModel,
    candidates: list[ScoreModel],
    reference: Dataset,
    epsilon: float,
    two_sided: bool = True,
) -> LevelSet:
    """Filter candidates to the epsilon risk window around the base model.

    two_sided admits risks in [base - eps, base + eps]; the one-sided variant
    admits anything at most base + eps. The base model is always a peer. When
    no candidate qualifies the set degrades to {base} with only_base set.
    """
    if not candidates:
        raise ValueError("need at least one candidate")
    base_risk = empirical_risk(base, reference)
    admitted = [(base, base_risk)]
    seen = {base.model_id}
    for cand in candidates:
        risk = empirical_risk(cand, reference)
        ok = abs(risk - base_risk) <= epsilon if two_sided else risk <= base_risk + epsilon
        if ok and cand.model_id not in seen:
            admitted.append((cand, risk))
            seen.add(cand.model_id)
    admitted.sort(key=lambda mr: (mr[1], mr[0].model_id))
    return LevelSet(
        base=base,
        peers=tuple(admitted),
        epsilon=epsilon,
        base_risk=base_risk,
        only_base=len(admitted) == 1,
    )


# --- serialization ------------------------------------------------------------


def model_to_dict(model: ScoreModel) -> dict:
    if isinstance(model, LinearModel):
        return {
            "family": "linear",
            "weights": model.weights.tolist(),
            "bias": model.bias,
            "mean": model.mean.tolist(),
            "scale": model.scale.tolist(),
            "meta": model.meta,
        }
    if isinstance(model, ForestModel):
        return {"family": "forest", "trees": model.trees, "meta": model.meta}
    raise TypeError(f"cannot serialize {type(model)!r}")


def model_from_dict(obj: dict) -> ScoreModel:
    if obj["family"] == "linear":
        return LinearModel(obj["weights"], obj["bias"], obj["mean"], obj["scale"], obj["meta"])
    if obj["family"] == "forest":
        return ForestModel(obj["trees"], obj["meta"])
    raise ValueError(f"unknown model family {obj['family']!r}")


def save_model(model: ScoreModel, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(model_to_dict(model), fh)


def load_model(path) -> ScoreModel:
    with open(path, "r", encoding="utf-8") as fh:
        return model_from_dict(json.load(fh))
