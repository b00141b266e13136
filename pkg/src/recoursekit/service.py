"""Stateless HTTP JSON facade over a pre-built experiment bundle.

Endpoints:

  GET  /schema    feature schema plus per-feature percentile anchors
  POST /score     per-peer score/decision/accuracy for one feature vector
  POST /recourse  one counterfactual request routed to the matching engine

Responses are rendered through the same canonical serializer the CLI uses,
so identical inputs produce byte-identical JSON through either surface.
Search failure is an honest domain outcome and maps to 422, not 500.
"""

from __future__ import annotations

import json

import numpy as np
from fastapi import FastAPI, Request, Response
from fastapi.middleware.cors import CORSMiddleware

from .analytics import cost_report
from .engines import EngineError, RecourseRequest, build_action_grid, grid_recourse, \
    growing_spheres, latent_recourse
from .experiments import ExperimentBundle
from .models import LinearModel

METHODS = ("gs", "grid", "latent")


def render_wire(obj) -> str:
    """Canonical wire format shared by the service and the CLI."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def schema_payload(bundle: ExperimentBundle) -> dict:
    anchors = {
        name: bundle.transform.anchors(j)
        for j, name in enumerate(bundle.schema.names)
    }
    body = bundle.schema.to_dict(bundle.label)
    body["anchors"] = anchors
    body["base_id"] = bundle.base.model_id
    return body


def _validate_x(bundle: ExperimentBundle, payload: dict) -> tuple[np.ndarray | None, list[str]]:
    errors = []
    x = payload.get("x")
    if not isinstance(x, list) or len(x) != bundle.schema.dim:
        return None, [f"x: need a list of {bundle.schema.dim} numbers"]
    try:
        arr = np.array([float(v) for v in x], dtype=float)
    except (TypeError, ValueError):
        return None, ["x: entries must be numbers"]
    for j in range(bundle.schema.dim):
        msg = bundle.schema.validate_value(j, float(arr[j]))
        if msg is not None:
            errors.append(msg)
    return (None, errors) if errors else (arr, [])


def score_payload(bundle: ExperimentBundle, payload: dict) -> tuple[int, dict]:
    x, errors = _validate_x(bundle, payload)
    if errors:
        return 400, {"errors": errors}
    scores = []
    for model, _risk in bundle.level_set.peers:
        s = model.score_one(x)
        scores.append(
            {
                "id": model.model_id,
                "score": s,
                "decision": 1 if s > 0.0 else -1,
                "holdout_accuracy": model.meta.get("holdout_accuracy"),
            }
        )
    return 200, {"scores": scores}


def recourse_payload(bundle: ExperimentBundle, payload: dict) -> tuple[int, dict]:
    x, errors = _validate_x(bundle, payload)
    if errors:
        return 400, {"errors": errors}
    method = payload.get("method")
    if method not in METHODS or method not in bundle.methods:
        return 400, {"errors": [f"method: must be one of {sorted(bundle.methods)}"]}
    target_ids = payload.get("targets") or [bundle.base.model_id]
    peer_ids = set(bundle.peer_ids())
    unknown = [t for t in target_ids if t not in peer_ids]
    if unknown:
        return 400, {"errors": [f"targets: unknown model ids {unknown}"]}
    targets = tuple(bundle.level_set.model_by_id(t) for t in dict.fromkeys(target_ids))
    objective = payload.get("objective", "total_shift")
    if objective not in ("total_shift", "max_shift"):
        return 400, {"errors": ["objective: must be total_shift or max_shift"]}
    if method == "grid" and not all(isinstance(t, LinearModel) for t in targets):
        return 400, {"errors": ["targets: grid method requires linear targets"]}
    seed = payload.get("seed", 0)
    if not isinstance(seed, int):
        return 400, {"errors": ["seed: must be an integer"]}

    cfg = bundle.methods[method]
    request = RecourseRequest(x=x, targets=targets, schema=bundle.schema,
                              budget=cfg.get("budget", 4000), seed=seed)
    try:
        if method == "gs":
            result = growing_spheres(request, step=cfg.get("step", 0.1),
                                     max_shells=cfg.get("max_shells", 50))
        elif method == "latent":
            result = latent_recourse(request, bundle.ae, step=cfg.get("step", 0.1),
                                     max_shells=cfg.get("max_shells", 50))
        else:
            grid = build_action_grid(bundle.schema, bundle.transform, x,
                                     resolution=cfg.get("resolution", 0.2))
            result = grid_recourse(request, grid, bundle.transform, objective=objective)
    except EngineError as e:
        return 400, {"errors": [str(e)]}

    body = {"result": result.to_json_dict()}
    if result.found:
        body["costs"] = cost_report(bundle.transform, x, result.x_cf).to_json_dict()
        return 200, body
    body["costs"] = None
    return 422, body


def create_app(bundle: ExperimentBundle) -> FastAPI:
    app = FastAPI(title="recoursekit service")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    def wire(status: int, body: dict) -> Response:
        return Response(content=render_wire(body), status_code=status,
                        media_type="application/json")

    @app.get("/schema")
    def get_schema():
        return wire(200, schema_payload(bundle))

    @app.post("/score")
    async def post_score(request: Request):
        try:
            payload = json.loads(await request.body())
        except json.JSONDecodeError:
            return wire(400, {"errors": ["body: invalid JSON"]})
        return wire(*score_payload(bundle, payload))

    @app.post("/recourse")
    async def post_recourse(request: Request):
        try:
            payload = json.loads(await request.body())
        except json.JSONDecodeError:
            return wire(400, {"errors": ["body: invalid JSON"]})
        return wire(*recourse_payload(bundle, payload))

    return app


def serve(bundle_dir: str, port: int, host: str = "127.0.0.1") -> None:
    import uvicorn

    from .experiments import load_bundle

    app = create_app(load_bundle(bundle_dir))
    uvicorn.run(app, host=host, port=port, log_level="warning")
