"""Secondary acceptance: service/CLI parity on recorded recourse requests.

Fifty (x, method, targets, seed) requests are evaluated twice against the
same saved bundle: through the HTTP service and through the offline CLI
subcommand. The two JSON bodies must agree byte-for-byte.
"""

import json
import subprocess
import sys

import numpy as np
import pytest
from fastapi.testclient import TestClient

from conftest import small_config
from recoursekit.data import synthesize_credit
from recoursekit.experiments import build_bundle, load_bundle, normalize_config, save_bundle
from recoursekit.service import create_app


@pytest.fixture(scope="module")
def saved_bundle(tmp_path_factory):
    out = tmp_path_factory.mktemp("bundle_out")
    cfg = normalize_config(small_config(n_explain=5))
    bundle = build_bundle(cfg, seed=0)
    path = save_bundle(bundle, str(out))
    return path


@pytest.fixture(scope="module")
def recorded_requests(saved_bundle):
    bundle = load_bundle(saved_bundle)
    probe = synthesize_credit(400, seed=314)
    decisions = bundle.base.decide(probe.X)
    rejected = np.nonzero(decisions == -1)[0]
    accepted = np.nonzero(decisions == 1)[0]
    peer_ids = bundle.peer_ids()
    other = [p for p in peer_ids if p != bundle.base.model_id]

    requests = []
    methods = ["gs", "grid", "latent"]
    for k in range(50):
        if k % 10 == 9:
            idx = int(accepted[k % len(accepted)])  # degenerate: already accepted
        else:
            idx = int(rejected[k % len(rejected)])
        req = {
            "x": [float(v) for v in probe.X[idx]],
            "method": methods[k % 3],
            "targets": [bundle.base.model_id],
            "seed": k,
        }
        if k % 5 == 0 and other and req["method"] != "grid":
            req["targets"] = [bundle.base.model_id, other[k % len(other)]]
        if req["method"] == "grid" and k % 4 == 0:
            req["objective"] = "max_shift"
        requests.append(req)
    return requests


def cli_response(bundle_dir, request_obj, tmp_path, tag):
    req_path = tmp_path / f"req_{tag}.json"
    req_path.write_text(json.dumps(request_obj))
    proc = subprocess.run(
        [sys.executable, "-m", "recoursekit.cli", "recourse",
         "--bundle", str(bundle_dir), "--request", str(req_path)],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0, proc.stderr
    return proc.stdout.strip()


def test_11_service_cli_parity(saved_bundle, recorded_requests, tmp_path):
    client = TestClient(create_app(load_bundle(saved_bundle)))
    mismatches = 0
    for k, req in enumerate(recorded_requests):
        via_http = client.post("/recourse", json=req).content.decode()
        via_cli = cli_response(saved_bundle, req, tmp_path, k)
        if via_http != via_cli:
            mismatches += 1
    line = (f"[ACCEPTANCE 11] service and CLI agree byte-for-byte: "
            f"{'PASS' if mismatches == 0 else 'FAIL'}  "
            f"({len(recorded_requests)} requests, mismatches={mismatches})")
    print(line)
    assert mismatches == 0, line
