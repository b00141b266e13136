"""Config-driven experiment pipelines and reproducible bundles.

Each pipeline (transfer, costs, bounds, semantics) trains models from a JSON
config, generates counterfactuals for a shared pool of negatively-decided
test individuals, and emits plot-ready tables as plain dicts. Reports are
deterministic: rerunning an identical config reproduces identical JSON bytes.

A bundle directory holds everything the scoring service needs: schema,
percentile transform, level-set peers with hold-out accuracies, and the
trained autoencoder, content-addressed by the config hash.
"""

from __future__ import annotations

import hashlib
import json
import os

import numpy as np

from . import analytics
from .analytics import (
    cost_report,
    discrepancy,
    evaluate_multiplicity_bound,
    negative_union_mask,
    surprise,
    transferability,
)
from .autoencoder import (
    LinearAutoencoder,
    TrainConfig,
    load_autoencoder,
    save_autoencoder,
    train_autoencoder,
)
from .data import (
    Dataset,
    PercentileTransform,
    fit_percentiles,
    load_csv,
    load_schema_file,
    random_orthonormal_manifold,
    save_schema_file,
    split,
    synthesize_credit,
    synthesize_manifold,
)
from .engines import (
    RecourseRequest,
    build_action_grid,
    check_result,
    grid_recourse,
    growing_spheres,
    latent_recourse,
)
from .models import (
    LevelSet,
    LinearModel,
    build_level_set,
    empirical_risk,
    load_model,
    save_model,
    train_forest,
    train_linear,
)


class ConfigError(ValueError):
    pass


class ExperimentError(RuntimeError):
    pass


DEFAULT_CONFIG = {
    "dataset": {"type": "synthetic_credit", "n": 2000, "seed": 0},
    "train_fraction": 0.8,
    "epsilon": 0.05,
    "model_grid": {
        "linear_l2": [1e-4, 1e-3, 1e-2, 1e-1, 1.0, 3.0, 10.0],
        "linear_seeds": [0, 1],
        "base_l2": 1e-3,
        "forest": None,
    },
    "linear_epochs": 200,
    "autoencoder": {
        "latent_dim": 3,
        "epochs": 40,
        "learning_rate": 3e-3,
        "kl_weight": 0.05,
        "batch_size": 64,
    },
    "methods": {
        "gs": {"step": 0.1, "budget": 4000, "max_shells": 50},
        "grid": {"resolution": 0.2, "objective": "total_shift"},
        "latent": {"step": 0.1, "budget": 4000, "max_shells": 50},
    },
    "n_explain": 100,
    "seeds": [0, 1, 2, 3, 4],
    "semantics_features": ["NumTimes30to59Late", "NumTimes60to89Late", "NumTimes90Late"],
}


def normalize_config(config: dict | None) -> dict:
    """Fill a user config with defaults; unknown keys are an error."""
    config = dict(config or {})
    merged = json.loads(json.dumps(DEFAULT_CONFIG))
    for key, value in config.items():
        if key not in merged:
            raise ConfigError(f"unknown config key {key!r}")
        if isinstance(merged[key], dict) and isinstance(value, dict):
            merged[key].update(value)
        else:
            merged[key] = value
    if not merged["seeds"]:
        raise ConfigError("need at least one seed")
    if not merged["methods"]:
        raise ConfigError("need at least one method")
    for m in merged["methods"]:
        if m not in ("gs", "grid", "latent"):
            raise ConfigError(f"unknown method {m!r}")
    return merged


def config_hash(config: dict) -> str:
    canonical = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()[:12]


def render_json(obj) -> str:
    """Canonical JSON used for every emitted report (byte-stable)."""
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def write_report(report: dict, out_dir: str, name: str) -> str:
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, name)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(render_json(report))
    return path


def _load_dataset(config: dict, seed: int) -> Dataset:
    ds_cfg = config["dataset"]
    if ds_cfg["type"] == "synthetic_credit":
        return synthesize_credit(ds_cfg["n"], seed=ds_cfg["seed"] + seed)
    if ds_cfg["type"] == "csv":
        schema, label = load_schema_file(ds_cfg["schema"])
        return load_csv(ds_cfg["path"], schema, label)
    raise ConfigError(f"unknown dataset type {ds_cfg['type']!r}")


class ExperimentBundle:
    """Trained artifacts for one (config, seed): the unit the service loads."""

    def __init__(self, schema, label, train, test, transform, base, level_set, ae,
                 methods, bundle_id):
        self.schema = schema
        self.label = label
        self.train = train
        self.test = test
        self.transform = transform
        self.base = base
        self.level_set = level_set
        self.ae = ae
        self.methods = methods
        self.bundle_id = bundle_id

    def peer_ids(self) -> list[str]:
        return [m.model_id for m, _ in self.level_set.peers]


def build_bundle(config: dict, seed: int) -> ExperimentBundle:
    config = normalize_config(config)
    data = _load_dataset(config, seed)
    train, test = split(data, config["train_fraction"], seed=seed)
    transform = fit_percentiles(train)

    grid_cfg = config["model_grid"]
    epochs = config["linear_epochs"]
    base = train_linear(train, l2_strength=grid_cfg["base_l2"], epochs=epochs, seed=seed)
    base.meta["id"] = f"base-linear(l2={grid_cfg['base_l2']:g})"
    candidates = []
    # logistic training is convex, so candidate diversity comes from bootstrap
    # resamples of the training rows, not from the (irrelevant) init seed
    for l2 in grid_cfg["linear_l2"]:
        for cand_seed in grid_cfg["linear_seeds"]:
            rng = np.random.default_rng((seed + 1) * 10_007 + cand_seed)
            boot = train.subset(rng.integers(0, train.n, size=train.n))
            if len(set(boot.y.tolist())) < 2:
                continue
            m = train_linear(boot, l2_strength=l2, epochs=epochs, seed=seed + 1 + cand_seed)
            m.meta["id"] = f"linear(l2={l2:g},seed={cand_seed})"
            candidates.append(m)
    if grid_cfg.get("forest"):
        for n_trees in grid_cfg["forest"]["trees"]:
            for depth in grid_cfg["forest"]["depths"]:
                m = train_forest(train, n_trees=n_trees, max_depth=depth, seed=seed)
                m.meta["id"] = f"forest(trees={n_trees},depth={depth})"
                candidates.append(m)
    level_set = build_level_set(base, candidates, train, epsilon=config["epsilon"])
    for model, _risk in level_set.peers:
        model.meta["holdout_accuracy"] = 1.0 - empirical_risk(model, test)

    ae_cfg = config["autoencoder"]
    ae = train_autoencoder(
        train,
        k=ae_cfg["latent_dim"],
        config=TrainConfig(
            epochs=ae_cfg["epochs"],
            learning_rate=ae_cfg["learning_rate"],
            kl_weight=ae_cfg["kl_weight"],
            batch_size=ae_cfg["batch_size"],
            seed=seed,
        ),
    )
    bundle_id = f"{config_hash(config)}-seed{seed}"
    return ExperimentBundle(
        data.schema, "label", train, test, transform, base, level_set, ae,
        config["methods"], bundle_id,
    )


def save_bundle(bundle: ExperimentBundle, out_dir: str) -> str:
    path = os.path.join(out_dir, f"bundle-{bundle.bundle_id}")
    os.makedirs(path, exist_ok=True)
    save_schema_file(bundle.schema, bundle.label, os.path.join(path, "schema.json"))
    with open(os.path.join(path, "transform.json"), "w", encoding="utf-8") as fh:
        json.dump(bundle.transform.to_dict(), fh)
    save_autoencoder(bundle.ae, os.path.join(path, "autoencoder.json"))
    models_dir = os.path.join(path, "models")
    os.makedirs(models_dir, exist_ok=True)
    peer_meta = []
    for i, (model, risk) in enumerate(bundle.level_set.peers):
        fname = f"peer{i:03d}.json"
        save_model(model, os.path.join(models_dir, fname))
        peer_meta.append({"file": fname, "id": model.model_id, "risk": risk,
                          "holdout_accuracy": model.meta.get("holdout_accuracy")})
    meta = {
        "bundle_id": bundle.bundle_id,
        "base_id": bundle.base.model_id,
        "base_risk": bundle.level_set.base_risk,
        "epsilon": bundle.level_set.epsilon,
        "peers": peer_meta,
        "methods": bundle.methods,
    }
    with open(os.path.join(path, "meta.json"), "w", encoding="utf-8") as fh:
        fh.write(render_json(meta))
    return path


def load_bundle(path: str) -> ExperimentBundle:
    with open(os.path.join(path, "meta.json"), "r", encoding="utf-8") as fh:
        meta = json.load(fh)
    schema, label = load_schema_file(os.path.join(path, "schema.json"))
    with open(os.path.join(path, "transform.json"), "r", encoding="utf-8") as fh:
        transform = PercentileTransform.from_dict(json.load(fh))
    ae = load_autoencoder(os.path.join(path, "autoencoder.json"))
    peers = []
    base = None
    for peer in meta["peers"]:
        model = load_model(os.path.join(path, "models", peer["file"]))
        peers.append((model, peer["risk"]))
        if model.model_id == meta["base_id"]:
            base = model
    if base is None:
        raise ExperimentError("bundle base model missing from peers")
    level_set = LevelSet(base=base, peers=tuple(peers), epsilon=meta["epsilon"],
                         base_risk=meta["base_risk"])
    return ExperimentBundle(schema, label, None, None, transform, base, level_set,
                            ae, meta["methods"], meta["bundle_id"])


# --- counterfactual generation over a shared pool -------------------------------


def explain_pool(bundle: ExperimentBundle, n_explain: int) -> np.ndarray:
    """Indices of the first n_explain test rows the base model rejects."""
    neg = np.nonzero(bundle.base.decide(bundle.test.X) == -1)[0]
    return neg[:n_explain]


def run_method(bundle: ExperimentBundle, method: str, x: np.ndarray, seed: int,
               targets=None):
    """Dispatch one recourse request to the configured engine."""
    cfg = bundle.methods[method]
    targets = (bundle.base,) if targets is None else tuple(targets)
    budget = cfg.get("budget", 4000)
    request = RecourseRequest(x=x, targets=targets, schema=bundle.schema,
                              budget=budget, seed=seed)
    if method == "gs":
        return growing_spheres(request, step=cfg["step"], max_shells=cfg.get("max_shells", 50))
    if method == "grid":
        grid = build_action_grid(bundle.schema, bundle.transform, x,
                                 resolution=cfg.get("resolution", 0.2))
        return grid_recourse(request, grid, bundle.transform,
                             objective=cfg.get("objective", "total_shift"))
    if method == "latent":
        return latent_recourse(request, bundle.ae, step=cfg["step"],
                               max_shells=cfg.get("max_shells", 50))
    raise ConfigError(f"unknown method {method!r}")


def generate_counterfactuals(bundle: ExperimentBundle, n_explain: int):
    """Per-method results for one shared pool of rejected individuals.

    Every found result is re-checked independently; a violation is a bug, so
    it raises rather than being dropped.
    """
    pool = explain_pool(bundle, n_explain)
    if pool.size == 0:
        raise ExperimentError("no negatively decided test points to explain")
    per_method = {m: [] for m in bundle.methods}
    for method in bundle.methods:
        for rank, i in enumerate(pool):
            res = run_method(bundle, method, bundle.test.X[i], seed=100_003 + 7 * rank)
            problems = check_result(res, (bundle.base,), bundle.schema)
            if problems:
                raise ExperimentError(f"{method} violated constraints: {problems}")
            per_method[method].append((int(i), res))
    return pool, per_method


# --- pipelines -------------------------------------------------------------------


def run_transfer(config: dict | None) -> dict:
    """Counterfactual validity across the level set, per method and seed."""
    config = normalize_config(config)
    report = {"experiment": "transfer", "config_hash": config_hash(config), "seeds": []}
    for seed in config["seeds"]:
        bundle = build_bundle(config, seed)
        _pool, per_method = generate_counterfactuals(bundle, config["n_explain"])
        seed_entry = {"seed": seed, "base_id": bundle.base.model_id, "methods": {}}
        for method, pairs in per_method.items():
            found = [r for _, r in pairs if r.found]
            if not found:
                seed_entry["methods"][method] = {"n_found": 0, "per_peer": [], "mean_T": None}
                continue
            rep = transferability(found, bundle.level_set)
            per_peer = []
            for model, risk in bundle.level_set.peers:
                entry = rep.per_peer[model.model_id]
                per_peer.append({
                    "model_id": model.model_id,
                    "is_base": model.model_id == bundle.base.model_id,
                    "holdout_accuracy": model.meta.get("holdout_accuracy"),
                    "T": entry["T"],
                    "valid_count": entry["valid_count"],
                })
            per_peer.sort(key=lambda p: (p["holdout_accuracy"], p["model_id"]))
            non_base = [p["T"] for p in per_peer if p["model_id"] != bundle.base.model_id]
            seed_entry["methods"][method] = {
                "n_found": len(found),
                "per_peer": per_peer,
                "mean_T": float(np.mean(non_base)) if non_base else 1.0,
            }
        report["seeds"].append(seed_entry)
    report["mean_T_by_method"] = {
        m: [s["methods"][m]["mean_T"] for s in report["seeds"]]
        for m in config["methods"]
    }
    return report


def _quantiles(values) -> dict:
    qs = [5, 25, 50, 75, 95]
    arr = np.asarray(values, dtype=float)
    return {f"p{q}": float(np.percentile(arr, q)) for q in qs}


def run_costs(config: dict | None) -> dict:
    """Per-individual percentile costs for every method on a shared pool."""
    config = normalize_config(config)
    report = {"experiment": "costs", "config_hash": config_hash(config), "seeds": []}
    for seed in config["seeds"]:
        bundle = build_bundle(config, seed)
        pool, per_method = generate_counterfactuals(bundle, config["n_explain"])
        rows = []
        for rank in range(len(pool)):
            row = {"index": int(pool[rank])}
            for method, pairs in per_method.items():
                _, res = pairs[rank]
                if res.found:
                    cr = cost_report(bundle.transform, res.x, res.x_cf)
                    row[method] = {
                        "found": True,
                        "cost_total": cr.cost_total,
                        "cost_max": cr.cost_max,
                        "norm_cost": cr.norm_cost,
                    }
                else:
                    row[method] = {"found": False}
            rows.append(row)
        summary = {}
        for method in per_method:
            totals = [r[method]["cost_total"] for r in rows if r[method]["found"]]
            maxes = [r[method]["cost_max"] for r in rows if r[method]["found"]]
            summary[method] = {
                "n_found": len(totals),
                "cost_total_quantiles": _quantiles(totals) if totals else None,
                "cost_max_quantiles": _quantiles(maxes) if maxes else None,
                "median_cost_total": float(np.median(totals)) if totals else None,
            }
        # paired mean comparison of norm costs against the data-support method
        corollary = {}
        if "latent" in per_method:
            for sparse_method in ("gs", "grid"):
                if sparse_method not in per_method:
                    continue
                both = [
                    (r[sparse_method]["norm_cost"], r["latent"]["norm_cost"])
                    for r in rows
                    if r[sparse_method]["found"] and r["latent"]["found"]
                ]
                if both:
                    sparse_costs, support_costs = zip(*both)
                    corollary[sparse_method] = {
                        "n_paired": len(both),
                        "mean_sparse": float(np.mean(sparse_costs)),
                        "mean_support": float(np.mean(support_costs)),
                        "holds": analytics.corollary_check(sparse_costs, support_costs),
                    }
        report["seeds"].append(
            {"seed": seed, "rows": rows, "summary": summary, "corollary": corollary}
        )
    return report


def cost_table_csv(costs_report: dict) -> str:
    """Per-individual cost table (one row per individual and seed) as CSV text."""
    methods = sorted(
        {m for s in costs_report["seeds"] for r in s["rows"] for m in r if m != "index"}
    )
    header = ["seed", "index"]
    for m in methods:
        header += [f"{m}_found", f"{m}_cost_total", f"{m}_cost_max", f"{m}_norm_cost"]
    lines = [",".join(header)]
    for s in costs_report["seeds"]:
        for r in s["rows"]:
            cells = [str(s["seed"]), str(r["index"])]
            for m in methods:
                entry = r[m]
                if entry["found"]:
                    cells += ["1", repr(entry["cost_total"]), repr(entry["cost_max"]),
                              repr(entry["norm_cost"])]
                else:
                    cells += ["0", "", "", ""]
            lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def manifold_oracle_table(latent_dim=2, ambient_dim=6, n=2000, n_points=200,
                          step=0.1, budget=10_000, seed=0) -> dict:
    """Sparse vs data-support costs on the exact-manifold fixture.

    The generative map is known exactly, so the latent engine searches through
    a perfect codec and every per-point cost pair can be checked against the
    oracle inequality (support <= 2 * sparse + 2 * step slack).
    """
    spec = random_orthonormal_manifold(latent_dim, ambient_dim, seed=seed)
    data, _codes = synthesize_manifold(spec, n, seed=seed + 1)
    ae = LinearAutoencoder(data.schema, spec.embedding, spec.offset)
    w_x = np.linalg.pinv(spec.embedding).T @ spec.label_weights
    b = spec.label_bias - float(w_x @ spec.offset)
    f = LinearModel(w_x, b)
    f.meta["id"] = "planted"
    neg = np.nonzero(f.decide(data.X) == -1)[0][:n_points]
    w_norm = float(np.linalg.norm(w_x))
    rows = []
    for rank, i in enumerate(neg):
        req = RecourseRequest(data.X[i], (f,), data.schema, budget=budget,
                              seed=1000 + rank)
        sparse = growing_spheres(req, step=step)
        support = latent_recourse(req, ae, step=step)
        if not (sparse.found and support.found):
            raise ExperimentError(f"oracle fixture search failed at point {i}")
        # the sparse optimum of a linear target is the exact boundary distance
        exact_sparse = (abs(f.score_one(data.X[i])) + analytics.STRICT_EPS) / w_norm
        rows.append({
            "index": int(i),
            "sparse_cost": sparse.norm_cost,
            "sparse_exact": exact_sparse,
            "support_cost": support.norm_cost,
            "bound": 2.0 * sparse.norm_cost + 2.0 * step,
        })
    ok = all(r["support_cost"] <= r["bound"] for r in rows)
    return {
        "n_points": len(rows),
        "step": step,
        "rows": rows,
        "all_within_bound": ok,
        "corollary_means": analytics.corollary_check(
            [r["sparse_exact"] for r in rows], [r["support_cost"] for r in rows]
        ),
    }


def run_bounds(config: dict | None, n_pairs: int = 20) -> dict:
    """Multiplicity-bound verification, the oracle-manifold table, and surprise."""
    config = normalize_config(config)
    base_seed = config["seeds"][0]
    data = _load_dataset(config, base_seed)
    train, test = split(data, config["train_fraction"], seed=base_seed)
    epochs = config["linear_epochs"]

    pair_reports = []
    for pair in range(n_pairs):
        f = train_linear(train, l2_strength=1e-3, epochs=epochs, seed=base_seed + 2 * pair)
        g = train_linear(train, l2_strength=1e-1, epochs=epochs, seed=base_seed + 2 * pair + 1)
        f.meta["id"], g.meta["id"] = f"f{pair}", f"g{pair}"
        rep = evaluate_multiplicity_bound(f, g, test)
        pair_reports.append(rep.to_json_dict())

    oracle = manifold_oracle_table(seed=base_seed)

    # negative-surprise comparison: sparse = growing spheres, support = latent
    bundle = build_bundle(config, base_seed)
    f = bundle.base
    g = bundle.level_set.peers[-1][0] if len(bundle.level_set.peers) > 1 else f
    surprise_report = method_surprise(bundle, f, g, config["n_explain"])

    report = {
        "experiment": "bounds",
        "config_hash": config_hash(config),
        "bound_pairs": {
            "n_pairs": n_pairs,
            "holds_count": sum(r["holds"] for r in pair_reports),
            "pairs": pair_reports,
        },
        "oracle_fixture": oracle,
        "surprise": surprise_report,
    }
    return report


def method_surprise(bundle: ExperimentBundle, f, g, n_explain: int) -> dict:
    """Joint vs single engine costs for the sparse and data-support families."""
    X = bundle.test.X
    union = np.nonzero(negative_union_mask(f, g, X))[0][:n_explain]
    if union.size == 0:
        raise ExperimentError("no rejected individuals for surprise evaluation")
    neg_f = union[f.scores(X[union]) <= 0.0]
    neg_g = union[g.scores(X[union]) <= 0.0]
    delta = discrepancy(f, g, X[union])

    def engine_mean(method, targets, idx):
        costs = []
        for rank, i in enumerate(idx):
            res = run_method(bundle, method, X[i], seed=5_000 + 11 * rank, targets=targets)
            if res.found:
                costs.append(res.norm_cost)
        if not costs:
            raise ExperimentError(f"{method}: engine found nothing to average")
        return float(np.mean(costs)), len(costs)

    tags = {"S": "gs", "D": "latent"}
    method_costs, counts = {}, {}
    for tag, method in tags.items():
        if method not in bundle.methods:
            continue
        joint, n_joint = engine_mean(method, (f, g), union)
        single_f, n_f = engine_mean(method, (f,), neg_f)
        single_g, n_g = engine_mean(method, (g,), neg_g)
        method_costs[tag] = {
            "joint": joint, "single_f": single_f, "single_g": single_g,
            "discrepancy": delta,
        }
        counts[tag] = {"joint": n_joint, "single_f": n_f, "single_g": n_g}
    rep = surprise(method_costs)
    out = rep.to_json_dict()
    out["counts"] = counts
    out["f_id"], out["g_id"] = f.model_id, g.model_id
    return out


# --- semantics: histograms and PCA ------------------------------------------------


def power_iteration_top2(X: np.ndarray, tol: float = 1e-8, max_iter: int = 10_000):
    """Top-2 eigenpairs of the centered covariance via power iteration."""
    Xc = X - X.mean(axis=0)
    C = (Xc.T @ Xc) / max(1, X.shape[0] - 1)
    comps, eigvals = [], []
    M = C.copy()
    d = C.shape[0]
    for _ in range(2):
        v = np.ones(d) + 1e-3 * np.arange(d)  # deterministic start
        v /= np.linalg.norm(v)
        for _ in range(max_iter):
            w = M @ v
            nw = np.linalg.norm(w)
            if nw == 0.0:
                break
            w /= nw
            if w @ v < 0:
                w = -w
            if np.linalg.norm(w - v) < tol:
                v = w
                break
            v = w
        lam = float(v @ C @ v) if not comps else float(v @ M @ v)
        comps.append(v)
        eigvals.append(lam)
        M = M - lam * np.outer(v, v)
    return np.vstack(comps), np.array(eigvals)


def run_semantics(config: dict | None) -> dict:
    """Timeliness histograms and 2-component projections of each point set."""
    config = normalize_config(config)
    seed = config["seeds"][0]
    bundle = build_bundle(config, seed)
    names = bundle.schema.names
    for feat in config["semantics_features"]:
        if feat not in names:
            raise ConfigError(f"semantics feature {feat!r} not in schema")

    test = bundle.test
    decisions = bundle.base.decide(test.X)
    accepted_correct = test.X[(decisions == 1) & (test.y == 1)]
    rejected = test.X[decisions == -1]
    _pool, per_method = generate_counterfactuals(bundle, config["n_explain"])
    cf_sets = {
        m: np.vstack([r.x_cf for _, r in pairs if r.found]) if any(r.found for _, r in pairs) else np.empty((0, test.d))
        for m, pairs in per_method.items()
    }

    histograms = []
    for feat in config["semantics_features"]:
        j = bundle.schema.index_of(feat)
        hi = max(1.0, float(test.X[:, j].max()))
        edges = np.arange(0.0, hi + 2.0)
        sets = {"accepted_correct": accepted_correct, "rejected": rejected}
        sets.update({f"cf_{m}": arr for m, arr in cf_sets.items()})
        histograms.append({
            "feature": feat,
            "edges": edges.tolist(),
            "counts": {
                name: np.histogram(arr[:, j], bins=edges)[0].tolist() if len(arr) else []
                for name, arr in sets.items()
            },
        })

    comps, eigvals = power_iteration_top2(test.X, tol=1e-8)
    center = test.X.mean(axis=0)
    projections = {}
    proj_sets = {"accepted_correct": accepted_correct, "rejected": rejected}
    proj_sets.update({f"cf_{m}": arr for m, arr in cf_sets.items()})
    for name, arr in proj_sets.items():
        projections[name] = ((arr - center) @ comps.T).tolist() if len(arr) else []

    return {
        "experiment": "semantics",
        "config_hash": config_hash(config),
        "seed": seed,
        "histograms": histograms,
        "pca": {
            "components": comps.tolist(),
            "eigenvalues": eigvals.tolist(),
            "projections": projections,
        },
    }
