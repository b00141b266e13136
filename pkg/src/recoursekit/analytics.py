"""Cost metrics and bound verification for recourse under model multiplicity.

Percentile shift costs, transferability across an epsilon-level set,
discrepancy between two scorers over their negatively-decided individuals,
the components and right-hand side of the multiplicity cost bound, exact
minimal-action costs for linear pairs via closed-form projection onto
half-space intersections, the negative-surprise ordering check, and a small
toolkit of the inequalities everything rests on.

Strict positivity of a counterfactual's score is realized as score >= 1e-9
(STRICT_EPS) in every derived distance; distances to closed regions use the
boundary itself.
"""

from __future__ import annotations

import numpy as np
from dataclasses import dataclass

from .data import Dataset, PercentileTransform
from .models import LinearModel, ScoreModel

STRICT_EPS = 1e-9


class AnalyticsError(ValueError):
    pass


# --- percentile costs ---------------------------------------------------------


@dataclass(frozen=True)
class CostReport:
    cost_total: float
    cost_max: float
    norm_cost: float

    def to_json_dict(self) -> dict:
        return {
            "cost_total": self.cost_total,
            "cost_max": self.cost_max,
            "norm_cost": self.norm_cost,
        }


def cost_total(transform: PercentileTransform, x, x_cf) -> float:
    """Total percentile shift: sum_j |Q_j(x_cf_j) - Q_j(x_j)|."""
    x, x_cf = np.asarray(x, dtype=float), np.asarray(x_cf, dtype=float)
    if x.shape != x_cf.shape or x.shape != (transform.dim,):
        raise AnalyticsError("dimension mismatch")
    return float(np.sum(np.abs(transform.percentiles(x_cf) - transform.percentiles(x))))


def cost_max(transform: PercentileTransform, x, x_cf) -> float:
    """Maximum percentile shift: max_j |Q_j(x_cf_j) - Q_j(x_j)|."""
    x, x_cf = np.asarray(x, dtype=float), np.asarray(x_cf, dtype=float)
    if x.shape != x_cf.shape or x.shape != (transform.dim,):
        raise AnalyticsError("dimension mismatch")
    return float(np.max(np.abs(transform.percentiles(x_cf) - transform.percentiles(x))))


def cost_report(transform: PercentileTransform, x, x_cf) -> CostReport:
    action = np.asarray(x_cf, dtype=float) - np.asarray(x, dtype=float)
    return CostReport(
        cost_total=cost_total(transform, x, x_cf),
        cost_max=cost_max(transform, x, x_cf),
        norm_cost=float(np.linalg.norm(action)),
    )


# --- transferability and discrepancy -------------------------------------------


@dataclass(frozen=True)
class TransferReport:
    n_explained: int
    per_peer: dict[str, dict]  # model_id -> {"valid_count": int, "T": float}

    def to_json_dict(self) -> dict:
        return {"n_explained": self.n_explained, "per_peer": self.per_peer}


def transferability(results, level_set) -> TransferReport:
    """Fraction of counterfactuals that stay positive under every peer model."""
    if not results:
        raise AnalyticsError("no recourse results to evaluate")
    if not all(r.found for r in results):
        raise AnalyticsError("transferability expects found results only")
    X_cf = np.vstack([r.x_cf for r in results])
    per_peer = {}
    for model, _risk in level_set.peers:
        valid = int(np.sum(model.decide(X_cf) == 1))
        per_peer[model.model_id] = {
            "valid_count": valid,
            "T": valid / len(results),
        }
    return TransferReport(n_explained=len(results), per_peer=per_peer)


def negative_union_mask(f: ScoreModel, g: ScoreModel, X: np.ndarray) -> np.ndarray:
    """Rows negatively decided by at least one of the two models."""
    return (f.scores(X) <= 0.0) | (g.scores(X) <= 0.0)


def discrepancy(f: ScoreModel, g: ScoreModel, X: np.ndarray) -> float:
    """Mean |f(x) - g(x)| over rows already restricted to the negative union."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[0] == 0:
        raise AnalyticsError("empty domain sample")
    return float(np.mean(np.abs(f.scores(X) - g.scores(X))))


# --- bound components -----------------------------------------------------------


@dataclass(frozen=True)
class BoundParameters:
    alpha: float
    gamma: float = 1.0

    def __post_init__(self):
        if not self.alpha > 0:
            raise AnalyticsError("alpha must be > 0")
        if not 0.0 <= self.gamma <= 1.0:
            raise AnalyticsError("gamma must lie in [0, 1]")


@dataclass(frozen=True)
class BoundComponents:
    """Everything the multiplicity bound consumes, for one model on one sample."""

    pi: float              # false-omission rate P(y = +1 | decided negative)
    risk_neg: float        # risk restricted to the negatively-decided set
    c_max: float           # max |score| over the negatively-decided set
    c_pos_mean: float      # mean score over negatives with true label +1
    c_neg_mean: float      # mean score over negatives with true label -1
    n_neg: int
    n_pos_cell: int
    n_neg_cell: int
    empty_pos_cell: bool = False
    empty_neg_cell: bool = False

    def to_json_dict(self) -> dict:
        return {
            "pi": self.pi,
            "risk_neg": self.risk_neg,
            "c_max": self.c_max,
            "c_pos_mean": self.c_pos_mean,
            "c_neg_mean": self.c_neg_mean,
            "n_neg": self.n_neg,
            "n_pos_cell": self.n_pos_cell,
            "n_neg_cell": self.n_neg_cell,
            "empty_pos_cell": self.empty_pos_cell,
            "empty_neg_cell": self.empty_neg_cell,
        }


def bound_components(model: ScoreModel, data: Dataset) -> BoundComponents:
    """Estimate the bound's per-model quantities on a labeled sample.

    Empty expectation cells contribute 0 and are flagged, keeping the report
    total instead of NaN.
    """
    scores = model.scores(data.X)
    neg = scores <= 0.0
    n_neg = int(neg.sum())
    if n_neg == 0:
        raise AnalyticsError("model decides no point negatively on this sample")
    y = data.y
    pos_cell = neg & (y == 1)
    neg_cell = neg & (y == -1)
    pi = float(pos_cell.sum() / n_neg)
    c_max = float(np.max(np.abs(scores[neg])))
    empty_pos = not pos_cell.any()
    empty_neg = not neg_cell.any()
    c_pos = 0.0 if empty_pos else float(np.mean(scores[pos_cell]))
    c_neg = 0.0 if empty_neg else float(np.mean(scores[neg_cell]))
    # risk restricted to the negative set: pi * P(score <= 0 | pos cell)
    #                                      + (1 - pi) * P(score > 0 | neg cell)
    p_le = 0.0 if empty_pos else float(np.mean(scores[pos_cell] <= 0.0))
    p_gt = 0.0 if empty_neg else float(np.mean(scores[neg_cell] > 0.0))
    risk_neg = pi * p_le + (1.0 - pi) * p_gt
    return BoundComponents(
        pi=pi,
        risk_neg=risk_neg,
        c_max=c_max,
        c_pos_mean=c_pos,
        c_neg_mean=c_neg,
        n_neg=n_neg,
        n_pos_cell=int(pos_cell.sum()),
        n_neg_cell=int(neg_cell.sum()),
        empty_pos_cell=empty_pos,
        empty_neg_cell=empty_neg,
    )


def single_model_bound(cf: BoundComponents, alpha: float) -> float:
    """Upper bound on the expected single-model recourse cost (linear case)."""
    return alpha * (
        cf.pi * cf.c_pos_mean
        - (1.0 - cf.pi) * cf.c_neg_mean
        + 2.0 * cf.c_max * cf.risk_neg
    )


def multiplicity_bound(
    cf: BoundComponents, cg: BoundComponents, delta: float, params: BoundParameters
) -> float:
    """Right-hand side of the two-model cost bound.

    alpha * 8^(1-gamma) * [ 2 R_f c^max_f + 2 R_g c^max_g
                            + pi_f c_D+(f) + pi_g c_D+(g)
                            - (1-pi_f) c_D-(f) - (1-pi_g) c_D-(g)
                            + delta ]^gamma
    """
    bracket = (
        2.0 * cf.risk_neg * cf.c_max
        + 2.0 * cg.risk_neg * cg.c_max
        + cf.pi * cf.c_pos_mean
        + cg.pi * cg.c_pos_mean
        - (1.0 - cf.pi) * cf.c_neg_mean
        - (1.0 - cg.pi) * cg.c_neg_mean
        + delta
    )
    if bracket < 0.0:
        raise AnalyticsError(
            "negative bracket in multiplicity bound; component breakdown: "
            f"f={cf.to_json_dict()}, g={cg.to_json_dict()}, delta={delta}"
        )
    return params.alpha * 8.0 ** (1.0 - params.gamma) * bracket**params.gamma


# --- exact projections for linear pairs ----------------------------------------


def _region_constraints(f: LinearModel, g: LinearModel, signs: tuple[int, int],
                        strict_eps: float):
    """(u, c) rows meaning u @ x >= c; sign +1 wants score > 0, -1 wants <= 0."""
    rows = []
    for model, sign in ((f, signs[0]), (g, signs[1])):
        w, b = model.raw_weights()
        if sign > 0:
            rows.append((w, -b + strict_eps))
        else:
            rows.append((-w, b))
    return rows


def region_distance(x: np.ndarray, constraints, tol: float = 1e-9) -> float | None:
    """Exact distance from x to the intersection of two half-spaces.

    Closed-form: zero if feasible, otherwise the best feasible single
    projection, otherwise the projection onto the intersection of the two
    boundary hyperplanes (2x2 Gram solve). Returns None when the region is
    empty (antiparallel, incompatible constraints).
    """
    x = np.asarray(x, dtype=float)
    (u1, c1), (u2, c2) = constraints
    s1, s2 = float(u1 @ x), float(u2 @ x)
    v1, v2 = c1 - s1, c2 - s2
    if v1 <= 0.0 and v2 <= 0.0:
        return 0.0
    candidates = []
    for (ua, ca, va), (ub, cb) in (((u1, c1, v1), (u2, c2)), ((u2, c2, v2), (u1, c1))):
        if va <= 0.0:
            continue
        na2 = float(ua @ ua)
        p = x + (va / na2) * ua
        if float(ub @ p) >= cb - tol * (1.0 + abs(cb)):
            candidates.append(float(np.linalg.norm(p - x)))
    if not candidates:
        U = np.vstack([u1, u2])
        G = U @ U.T
        try:
            lam = np.linalg.solve(G, np.array([v1, v2]))
        except np.linalg.LinAlgError:
            return None  # parallel normals and no feasible single projection
        p = x + U.T @ lam
        candidates.append(float(np.linalg.norm(p - x)))
    return min(candidates)


_REGION_SIGNS = ((1, 1), (1, -1), (-1, 1), (-1, -1))


def _assumption_residual(fs: float, gs: float, signs: tuple[int, int]) -> float:
    a = -fs if signs[0] > 0 else fs
    b = -gs if signs[1] > 0 else gs
    return max(0.0, max(a, b))


def calibrate_alpha(
    f: LinearModel,
    g: LinearModel,
    sample: np.ndarray,
    gamma: float = 1.0,
    strict_eps: float = STRICT_EPS,
) -> float:
    """Smallest alpha making all four residual-distance inequalities hold.

    For every sample point and every sign pattern of the two linear models,
    dist(x, region) <= alpha * residual^gamma must hold; distances are exact
    half-space projections. Regions that are empty, or residuals below 1e-12,
    yield no constraint. Raises when every relevant region is empty.
    """
    if not isinstance(f, LinearModel) or not isinstance(g, LinearModel):
        raise AnalyticsError("alpha calibration requires linear models")
    X = np.atleast_2d(np.asarray(sample, dtype=float))
    fs, gs = f.scores(X), g.scores(X)
    alpha = 0.0
    any_constraint = False
    for signs in _REGION_SIGNS:
        constraints = _region_constraints(f, g, signs, strict_eps)
        for i in range(X.shape[0]):
            dist = region_distance(X[i], constraints)
            if dist is None:
                continue
            residual = _assumption_residual(float(fs[i]), float(gs[i]), signs)
            if residual < 1e-12:
                continue
            any_constraint = True
            alpha = max(alpha, dist / residual**gamma)
    if not any_constraint:
        raise AnalyticsError("alpha undefined: every region empty or residual zero")
    return alpha


def assumption_violations(
    f: LinearModel, g: LinearModel, sample: np.ndarray, alpha: float,
    gamma: float = 1.0, strict_eps: float = STRICT_EPS,
) -> int:
    """Count of (point, region) pairs where dist > alpha * residual^gamma."""
    X = np.atleast_2d(np.asarray(sample, dtype=float))
    fs, gs = f.scores(X), g.scores(X)
    bad = 0
    for signs in _REGION_SIGNS:
        constraints = _region_constraints(f, g, signs, strict_eps)
        for i in range(X.shape[0]):
            dist = region_distance(X[i], constraints)
            if dist is None:
                continue
            residual = _assumption_residual(float(fs[i]), float(gs[i]), signs)
            if residual < 1e-12:
                continue
            if dist > alpha * residual**gamma * (1.0 + 1e-12):
                bad += 1
    return bad


def empirical_multiplicity_cost(
    f: ScoreModel,
    g: ScoreModel,
    sample: np.ndarray,
    mode: str = "exact_linear",
    engine=None,
    strict_eps: float = STRICT_EPS,
) -> float:
    """Mean minimal-norm action moving each sample point into H_f^+ ∩ H_g^+.

    exact_linear computes the closed-form projection (linear models only).
    engine mode runs the supplied engine per point and averages the found
    norm costs; the value is an upper estimate of the true mean.
    """
    X = np.atleast_2d(np.asarray(sample, dtype=float))
    if X.shape[0] == 0:
        raise AnalyticsError("empty domain sample")
    if mode == "exact_linear":
        if not isinstance(f, LinearModel) or not isinstance(g, LinearModel):
            raise AnalyticsError("exact_linear mode requires linear models")
        constraints = _region_constraints(f, g, (1, 1), strict_eps)
        total = 0.0
        for i in range(X.shape[0]):
            dist = region_distance(X[i], constraints)
            if dist is None:
                raise AnalyticsError("infeasible intersection: H_f^+ ∩ H_g^+ empty")
            total += dist
        return total / X.shape[0]
    if mode == "engine":
        if engine is None:
            raise AnalyticsError("engine mode needs an engine callable")
        costs = []
        for i in range(X.shape[0]):
            res = engine(X[i])
            if not res.found:
                raise AnalyticsError(f"engine found no recourse for sample row {i}")
            costs.append(res.norm_cost)
        return float(np.mean(costs))
    raise AnalyticsError(f"unknown mode {mode!r}")


@dataclass(frozen=True)
class BoundReport:
    components_f: BoundComponents
    components_g: BoundComponents
    discrepancy: float
    params: BoundParameters
    rhs: float
    lhs_monte_carlo: float
    lhs_sample_size: int
    holds: bool

    def to_json_dict(self) -> dict:
        return {
            "components_f": self.components_f.to_json_dict(),
            "components_g": self.components_g.to_json_dict(),
            "discrepancy": self.discrepancy,
            "params": {"alpha": self.params.alpha, "gamma": self.params.gamma},
            "rhs": self.rhs,
            "lhs_monte_carlo": self.lhs_monte_carlo,
            "lhs_sample_size": self.lhs_sample_size,
            "holds": self.holds,
        }


def evaluate_multiplicity_bound(f: LinearModel, g: LinearModel, data: Dataset) -> BoundReport:
    """Calibrate alpha, assemble all components, and compare LHS against RHS.

    Everything is computed on the same evaluation sample: alpha and the exact
    LHS on the rows negatively decided by at least one model, the per-model
    components on each model's own negative rows.
    """
    mask = negative_union_mask(f, g, data.X)
    if not mask.any():
        raise AnalyticsError("no negatively decided rows in evaluation data")
    S = data.X[mask]
    alpha = calibrate_alpha(f, g, S, gamma=1.0)
    params = BoundParameters(alpha=alpha, gamma=1.0)
    comp_f = bound_components(f, data)
    comp_g = bound_components(g, data)
    delta = discrepancy(f, g, S)
    rhs = multiplicity_bound(comp_f, comp_g, delta, params)
    lhs = empirical_multiplicity_cost(f, g, S, mode="exact_linear")
    return BoundReport(
        components_f=comp_f,
        components_g=comp_g,
        discrepancy=delta,
        params=params,
        rhs=rhs,
        lhs_monte_carlo=lhs,
        lhs_sample_size=int(mask.sum()),
        holds=lhs <= rhs,
    )


# --- negative surprise -----------------------------------------------------------


@dataclass(frozen=True)
class MethodSurprise:
    lhs_joint_cost: float
    single_cost_f: float
    single_cost_g: float
    discrepancy: float
    s_bar: float
    inconsistent: bool

    def to_json_dict(self) -> dict:
        return {
            "lhs_joint_cost": self.lhs_joint_cost,
            "single_cost_f": self.single_cost_f,
            "single_cost_g": self.single_cost_g,
            "discrepancy": self.discrepancy,
            "s_bar": self.s_bar,
            "inconsistent": self.inconsistent,
        }


@dataclass(frozen=True)
class SurpriseReport:
    per_method: dict[str, MethodSurprise]
    prop3_condition_met: bool | None
    ordering_verdict: str

    def to_json_dict(self) -> dict:
        return {
            "per_method": {k: v.to_json_dict() for k, v in self.per_method.items()},
            "prop3_condition_met": self.prop3_condition_met,
            "ordering_verdict": self.ordering_verdict,
        }


def surprise(method_costs: dict[str, dict]) -> SurpriseReport:
    """Normalized inverse cost of negative surprise per method, with ordering.

    method_costs maps a method tag to {joint, single_f, single_g,
    discrepancy}. s_bar = single_f / joint lies in (0, 1] when the engine
    behaved; joint < single_f is flagged as an inconsistency (possible for
    sampled engines, impossible for nested exact constraints) rather than
    clamped. When tags "S" and "D" are both present, the ordering
    precondition (equal discrepancies within 1e-6 and the D ratio strictly
    below the S ratio) and the empirical verdict are evaluated.
    """
    per_method = {}
    for tag, c in method_costs.items():
        joint, single_f = float(c["joint"]), float(c["single_f"])
        if single_f <= 0.0:
            raise AnalyticsError(f"{tag}: single-model cost must be > 0")
        per_method[tag] = MethodSurprise(
            lhs_joint_cost=joint,
            single_cost_f=single_f,
            single_cost_g=float(c["single_g"]),
            discrepancy=float(c.get("discrepancy", 0.0)),
            s_bar=single_f / joint,
            inconsistent=joint < single_f,
        )
    condition = None
    verdict = "inconclusive"
    if "S" in per_method and "D" in per_method:
        S, D = per_method["S"], per_method["D"]
        ratio_s = S.single_cost_g / S.single_cost_f
        ratio_d = D.single_cost_g / D.single_cost_f
        condition = abs(S.discrepancy - D.discrepancy) <= 1e-6 and ratio_d < ratio_s
        if S.s_bar > D.s_bar:
            verdict = "S_more_robust"
        elif D.s_bar > S.s_bar:
            verdict = "D_more_robust"
    return SurpriseReport(per_method=per_method, prop3_condition_met=condition,
                          ordering_verdict=verdict)


# --- inequality toolkit ------------------------------------------------------------


def _tol(*values: float) -> float:
    return 1e-12 * max(1.0, *(abs(v) for v in values))


def max_identity(a: float, b: float) -> bool:
    """max(a, b) == (a + b + |a - b|) / 2 within 1e-12."""
    return abs(max(a, b) - 0.5 * (a + b + abs(a - b))) <= _tol(a, b)


def power_mean(zs, gamma: float) -> bool:
    """sum z_i^gamma <= n^(1-gamma) * (sum z_i)^gamma for z >= 0, gamma in [0,1]."""
    zs = np.asarray(zs, dtype=float)
    if np.any(zs < 0):
        raise AnalyticsError("power_mean requires non-negative inputs")
    if not 0.0 <= gamma <= 1.0:
        raise AnalyticsError("gamma must lie in [0, 1]")
    lhs = float(np.sum(zs**gamma))
    rhs = float(len(zs) ** (1.0 - gamma) * np.sum(zs) ** gamma)
    return lhs <= rhs + _tol(lhs, rhs)


def jensen_power(samples, gamma: float) -> bool:
    """E[X^gamma] <= E[X]^gamma for non-negative X and gamma in [0,1]."""
    samples = np.asarray(samples, dtype=float)
    if np.any(samples < 0):
        raise AnalyticsError("jensen_power requires non-negative samples")
    if not 0.0 <= gamma <= 1.0:
        raise AnalyticsError("gamma must lie in [0, 1]")
    lhs = float(np.mean(samples**gamma))
    rhs = float(np.mean(samples) ** gamma)
    return lhs <= rhs + _tol(lhs, rhs)


def corollary_check(sparse_costs, support_costs) -> bool:
    """Mean sparse cost <= mean support cost over paired individuals."""
    sparse_costs = np.asarray(sparse_costs, dtype=float)
    support_costs = np.asarray(support_costs, dtype=float)
    if sparse_costs.shape != support_costs.shape:
        raise AnalyticsError("paired cost lists must have equal length")
    return float(np.mean(sparse_costs)) <= float(np.mean(support_costs))
