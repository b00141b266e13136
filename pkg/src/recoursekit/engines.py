"""Counterfactual recourse engines.

Three generators produce a schema-valid point that flips every target's
decision to +1:

  growing_spheres   shell sampling around x in feature space (sparse, l2)
  grid_recourse     exact percentile-cost minimizer over a discrete action
                    lattice, for linear targets (best-first with an
                    admissible linear-score bound)
  latent_recourse   shell sampling around encode(x) in the latent space of a
                    generative model (data support)

All engines share the same projection to schema support (immutables pinned,
direction constraints relative to the request's x, counts rounded, bounds
clamped) and the same validity predicate: strictly positive score under every
target. brute_force_recourse exhaustively enumerates a lattice and is the
optimality oracle for grid_recourse.
"""

from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .data import FeatureSchema, PercentileTransform
from .models import LinearModel, ScoreModel

OBJECTIVES = ("total_shift", "max_shift")
_POS_FLOOR = 1e-9


class EngineError(ValueError):
    pass


@dataclass(frozen=True)
class RecourseRequest:
    """One individual, one or two target models, and a search budget."""

    x: np.ndarray
    targets: tuple[ScoreModel, ...]
    schema: FeatureSchema
    budget: int = 10_000
    seed: int = 0

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "targets", tuple(self.targets))
        if x.shape != (self.schema.dim,):
            raise EngineError(f"x must be a {self.schema.dim}-vector")
        if not self.targets:
            raise EngineError("need at least one target model")
        if self.budget < 1:
            raise EngineError("budget must be >= 1")


@dataclass
class RecourseResult:
    x: np.ndarray
    x_cf: np.ndarray
    action: np.ndarray
    validity: dict[str, int]
    evaluations_used: int
    method: str
    norm_cost: float
    found: bool
    latent_code: np.ndarray | None = None
    shell_index: int | None = None
    shell_log: list[tuple[int, int, int]] = field(default_factory=list)
    objective_value: float | None = None

    def to_json_dict(self) -> dict:
        out = {
            "found": self.found,
            "x": [float(v) for v in self.x],
            "x_cf": [float(v) for v in self.x_cf],
            "action": [float(v) for v in self.action],
            "validity": {k: int(v) for k, v in sorted(self.validity.items())},
            "method": self.method,
            "evaluations_used": int(self.evaluations_used),
            "norm_cost": float(self.norm_cost),
        }
        if self.latent_code is not None:
            out["latent_code"] = [float(v) for v in self.latent_code]
        return out


def project_to_support(candidates: np.ndarray, x: np.ndarray, schema: FeatureSchema) -> np.ndarray:
    """Map raw candidate rows into the schema's support, relative to x.

    Immutables are pinned to x exactly; bounds are clamped; counts rounded to
    the nearest admissible integer; positive features floored above zero; the
    direction clamp runs last so its result is final.
    """
    C = np.atleast_2d(np.asarray(candidates, dtype=float)).copy()
    for j, f in enumerate(schema.features):
        if not f.mutable:
            C[:, j] = x[j]
            continue
        col = C[:, j]
        if f.lower is not None:
            col = np.maximum(col, f.lower)
        if f.upper is not None:
            col = np.minimum(col, f.upper)
        if f.likelihood == "count":
            col = np.maximum(np.floor(col + 0.5), 0.0)
            if f.lower is not None:
                col = np.maximum(col, math.ceil(f.lower))
            if f.upper is not None:
                col = np.minimum(col, math.floor(f.upper))
        elif f.likelihood == "positive_continuous":
            floor = f.lower if (f.lower is not None and f.lower > 0) else _POS_FLOOR
            col = np.maximum(col, floor)
        if f.direction == "down_only":
            col = np.minimum(col, x[j])
        elif f.direction == "up_only":
            col = np.maximum(col, x[j])
        C[:, j] = col
    return C


def _validity(targets, x_cf: np.ndarray) -> dict[str, int]:
    return {t.model_id: t.decide_one(x_cf) for t in targets}


def _all_positive(targets, X: np.ndarray) -> np.ndarray:
    ok = np.ones(X.shape[0], dtype=bool)
    for t in targets:
        ok &= t.scores(X) > 0.0
    return ok


def _degenerate_result(request: RecourseRequest, method: str) -> RecourseResult:
    zero = np.zeros_like(request.x)
    return RecourseResult(
        x=request.x.copy(),
        x_cf=request.x.copy(),
        action=zero,
        validity=_validity(request.targets, request.x),
        evaluations_used=0,
        method=method,
        norm_cost=0.0,
        found=True,
        objective_value=0.0,
    )


def _shell_search(request, method, dim, step, max_shells, build_candidates, latent_center=None):
    """Expanding-shell sampling shared by growing_spheres and latent_recourse.

    Samples uniformly on spheres of radius step, 2*step, ... in a dim-space,
    maps each shell point to a schema-supported candidate, and returns the
    first valid candidate of the smallest successful shell.
    """
    if step <= 0:
        raise EngineError("step must be > 0")
    if all(d == +1 for d in _validity(request.targets, request.x).values()):
        return _degenerate_result(request, method)

    rng = np.random.default_rng(request.seed)
    per_shell = max(1, request.budget // max_shells)
    used = 0
    shell_log = []
    for shell in range(1, max_shells + 1):
        if used >= request.budget:
            break
        n = min(per_shell, request.budget - used)
        dirs = rng.standard_normal((n, dim))
        norms = np.linalg.norm(dirs, axis=1)
        norms[norms == 0.0] = 1.0
        pts = dirs / norms[:, None] * (shell * step)
        candidates, codes = build_candidates(pts)
        valid = _all_positive(request.targets, candidates)
        used += n
        shell_log.append((shell, n, int(valid.sum())))
        if valid.any():
            i = int(np.argmax(valid))
            x_cf = candidates[i]
            action = x_cf - request.x
            return RecourseResult(
                x=request.x.copy(),
                x_cf=x_cf,
                action=action,
                validity=_validity(request.targets, x_cf),
                evaluations_used=used,
                method=method,
                norm_cost=float(np.linalg.norm(action)),
                found=True,
                latent_code=None if codes is None else codes[i],
                shell_index=shell,
                shell_log=shell_log,
            )
    return RecourseResult(
        x=request.x.copy(),
        x_cf=request.x.copy(),
        action=np.zeros_like(request.x),
        validity=_validity(request.targets, request.x),
        evaluations_used=used,
        method=method,
        norm_cost=float("inf"),
        found=False,
        shell_log=shell_log,
    )


def growing_spheres(request: RecourseRequest, step: float = 0.1, max_shells: int = 50) -> RecourseResult:
    """Sparse l2 search: expanding shells over the mutable coordinates of x."""
    mutable = request.schema.mutable_indices()
    if not mutable:
        raise EngineError("all features immutable")

    def build(pts):
        C = np.tile(request.x, (pts.shape[0], 1))
        C[:, mutable] += pts
        return project_to_support(C, request.x, request.schema), None

    return _shell_search(request, "gs", len(mutable), step, max_shells, build)


def latent_recourse(request: RecourseRequest, ae, step: float = 0.1, max_shells: int = 50) -> RecourseResult:
    """Data-support search: expanding shells around encode(x) in latent space.

    Decoded candidates get their immutable coordinates overwritten with the
    original values before validity is checked.
    """
    if ae.schema.names != request.schema.names:
        raise EngineError("autoencoder schema does not match request schema")
    z0 = np.asarray(ae.encode(request.x), dtype=float)

    def build(pts):
        codes = z0 + pts
        decoded = ae.decode_batch(codes)
        return project_to_support(decoded, request.x, request.schema), codes

    return _shell_search(request, "latent", z0.shape[0], step, max_shells, build)


# --- action grids and exact search -------------------------------------------


@dataclass(frozen=True)
class ActionGrid:
    """Finite sorted candidate values per mutable feature (absolute values)."""

    feature_indices: tuple[int, ...]
    values: tuple[np.ndarray, ...]

    def __post_init__(self):
        for j, vals in zip(self.feature_indices, self.values):
            if len(vals) == 0:
                raise EngineError(f"empty candidate list for feature {j}")

    @property
    def size(self) -> int:
        n = 1
        for vals in self.values:
            n *= len(vals)
        return n


def build_action_grid(
    schema: FeatureSchema,
    transform: PercentileTransform,
    x: np.ndarray,
    resolution: float = 0.1,
) -> ActionGrid:
    """Percentile lattice of the training data, filtered to the feasible moves of x.

    Candidate values are actual reference-data quantiles (method="nearest", so
    count features stay integral), intersected with bounds and direction
    constraints, plus x's own value so the zero action is always available.
    """
    probs = np.linspace(0.0, 1.0, int(round(1.0 / resolution)) + 1)
    idxs, val_lists = [], []
    for j, f in enumerate(schema.features):
        if not f.mutable:
            continue
        lattice = np.quantile(transform.references[j], probs, method="nearest")
        vals = np.append(lattice, x[j])
        if f.lower is not None:
            vals = vals[vals >= f.lower]
        if f.upper is not None:
            vals = vals[vals <= f.upper]
        if f.direction == "down_only":
            vals = vals[vals <= x[j]]
        elif f.direction == "up_only":
            vals = vals[vals >= x[j]]
        idxs.append(j)
        val_lists.append(np.unique(vals))
    return ActionGrid(tuple(idxs), tuple(val_lists))


def _percentile_shifts(grid: ActionGrid, transform: PercentileTransform, x: np.ndarray):
    shifts = []
    for j, vals in zip(grid.feature_indices, grid.values):
        qx = transform.percentile(j, x[j])
        shifts.append(np.abs(np.asarray(transform.percentile(j, vals)) - qx))
    return shifts


def _assemble(x: np.ndarray, grid: ActionGrid, choice) -> np.ndarray:
    x_cf = x.copy()
    for j, vals, i in zip(grid.feature_indices, grid.values, choice):
        x_cf[j] = vals[i]
    return x_cf


def _result_from_point(request, x_cf, method, evaluations, objective_value):
    action = x_cf - request.x
    return RecourseResult(
        x=request.x.copy(),
        x_cf=x_cf,
        action=action,
        validity=_validity(request.targets, x_cf),
        evaluations_used=evaluations,
        method=method,
        norm_cost=float(np.linalg.norm(action)),
        found=True,
        objective_value=objective_value,
    )


def _not_found(request, method, evaluations):
    return RecourseResult(
        x=request.x.copy(),
        x_cf=request.x.copy(),
        action=np.zeros_like(request.x),
        validity=_validity(request.targets, request.x),
        evaluations_used=evaluations,
        method=method,
        norm_cost=float("inf"),
        found=False,
    )


def grid_recourse(
    request: RecourseRequest,
    grid: ActionGrid,
    transform: PercentileTransform,
    objective: str = "total_shift",
    score_threshold: float = 0.0,
) -> RecourseResult:
    """Exact percentile-cost minimizer over the grid's action lattice.

    Linear targets only. Best-first search over partial assignments; the
    per-target maximum achievable remaining score is an admissible pruning
    bound, so the first valid complete assignment popped is the optimum.
    Ties break by smaller l2 action, then lexicographic feature order.

    The default threshold 0 is the 0.5-probability boundary of a symmetric
    logistic scorer; raise it for probability-calibrated scorers whose
    acceptance cutoff sits elsewhere.
    """
    if objective not in OBJECTIVES:
        raise EngineError(f"objective must be one of {OBJECTIVES}")
    for t in request.targets:
        if not isinstance(t, LinearModel):
            raise EngineError("grid_recourse requires linear targets")
    if score_threshold <= 0.0 and all(
        d == +1 for d in _validity(request.targets, request.x).values()
    ):
        return _degenerate_result(request, "grid")

    x = request.x
    shifts = _percentile_shifts(grid, transform, x)
    n_feat = len(grid.feature_indices)

    # per-target: score(x_cf) = score(x) + sum_j w[j] * (v - x[j])
    base_scores, deltas, suffix_max = [], [], []
    for t in request.targets:
        w, _ = t.raw_weights()
        base_scores.append(t.score_one(x))
        deltas.append(
            [w[j] * (vals - x[j]) for j, vals in zip(grid.feature_indices, grid.values)]
        )
    for ti in range(len(request.targets)):
        mx = [float(np.max(d)) for d in deltas[ti]]
        suf = np.zeros(n_feat + 1)
        for j in range(n_feat - 1, -1, -1):
            suf[j] = suf[j + 1] + mx[j]
        suffix_max.append(suf)

    # infeasible even with every score-maximizing move
    for ti, s0 in enumerate(base_scores):
        if s0 + suffix_max[ti][0] <= score_threshold:
            return _not_found(request, "grid", 0)

    total = objective == "total_shift"
    # heap entries: (objective, l2sq, actions, depth, per-target scores, choice);
    # the first three fields realize the tie-break order
    heap = [(0.0, 0.0, (), 0, tuple(base_scores), ())]
    pops = 0
    while heap:
        obj, l2sq, actions, depth, scores, choice = heapq.heappop(heap)
        pops += 1
        if depth == n_feat:
            if all(s > score_threshold for s in scores):
                x_cf = _assemble(x, grid, choice)
                return _result_from_point(request, x_cf, "grid", pops, obj)
            continue
        vals = grid.values[depth]
        sh = shifts[depth]
        for i in range(len(vals)):
            new_scores = tuple(
                scores[ti] + deltas[ti][depth][i] for ti in range(len(scores))
            )
            if any(
                new_scores[ti] + suffix_max[ti][depth + 1] <= score_threshold
                for ti in range(len(new_scores))
            ):
                continue
            new_obj = obj + sh[i] if total else max(obj, sh[i])
            dv = float(vals[i] - x[grid.feature_indices[depth]])
            heapq.heappush(
                heap,
                (new_obj, l2sq + dv * dv, actions + (dv,), depth + 1, new_scores,
                 choice + (i,)),
            )
    return _not_found(request, "grid", pops)


def brute_force_recourse(
    targets,
    x: np.ndarray,
    grid: ActionGrid,
    transform: PercentileTransform,
    objective: str = "total_shift",
    schema: FeatureSchema | None = None,
) -> RecourseResult:
    """Exhaustive lattice enumeration; the optimality oracle for grid_recourse."""
    if objective not in OBJECTIVES:
        raise EngineError(f"objective must be one of {OBJECTIVES}")
    if grid.size > 1_000_000:
        raise EngineError(f"grid too large for brute force: {grid.size}")
    x = np.asarray(x, dtype=float)
    shifts = _percentile_shifts(grid, transform, x)
    total = objective == "total_shift"

    best = None
    evaluations = 0
    for choice in itertools.product(*(range(len(v)) for v in grid.values)):
        evaluations += 1
        x_cf = _assemble(x, grid, choice)
        if not all(t.decide_one(x_cf) == 1 for t in targets):
            continue
        per = [shifts[t][i] for t, i in enumerate(choice)]
        obj = float(sum(per)) if total else float(max(per)) if per else 0.0
        action = x_cf - x
        key = (obj, float(action @ action), tuple(float(a) for a in action))
        if best is None or key < best[0]:
            best = (key, x_cf)

    if best is None:
        validity = {t.model_id: t.decide_one(x) for t in targets}
        return RecourseResult(
            x=x.copy(), x_cf=x.copy(), action=np.zeros_like(x), validity=validity,
            evaluations_used=evaluations, method="brute_force", norm_cost=float("inf"),
            found=False,
        )
    key, x_cf = best
    action = x_cf - x
    return RecourseResult(
        x=x.copy(), x_cf=x_cf, action=action,
        validity={t.model_id: t.decide_one(x_cf) for t in targets},
        evaluations_used=evaluations, method="brute_force",
        norm_cost=float(np.linalg.norm(action)), found=True, objective_value=key[0],
    )


def joint_recourse(f: ScoreModel, g: ScoreModel, x, schema: FeatureSchema, engine, *,
                   budget: int = 10_000, seed: int = 0, **engine_kwargs) -> RecourseResult:
    """Run an engine with both models as targets: validity needs f and g positive.

    The domain is anyone rejected by at least one model; when both already
    accept x the request degenerates to a zero action.
    """
    request = RecourseRequest(x=x, targets=(f, g), schema=schema, budget=budget, seed=seed)
    return engine(request, **engine_kwargs)


def check_result(result: RecourseResult, targets, schema: FeatureSchema) -> list[str]:
    """Independent re-check of a found result; returns violation messages."""
    problems = []
    if not result.found:
        return problems
    for t in targets:
        if t.decide_one(result.x_cf) != 1:
            problems.append(f"target {t.model_id} still rejects x_cf")
    for j, f in enumerate(schema.features):
        dx = result.x_cf[j] - result.x[j]
        if not f.mutable and dx != 0.0:
            problems.append(f"immutable {f.name} moved by {dx}")
        if f.direction == "down_only" and dx > 0:
            problems.append(f"down_only {f.name} moved up by {dx}")
        if f.direction == "up_only" and dx < 0:
            problems.append(f"up_only {f.name} moved down by {dx}")
    msg = schema.validate_row(result.x_cf)
    if msg is not None:
        problems.append(f"support violation: {msg}")
    return problems
