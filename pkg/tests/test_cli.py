import json
import subprocess
import sys

import pytest

from conftest import small_config

TINY = small_config(
    n_explain=8,
    model_grid={"linear_l2": [1e-3, 1e-2], "linear_seeds": [0]},
)


def run_cli(args, **kw):
    return subprocess.run(
        [sys.executable, "-m", "recoursekit.cli", *args],
        capture_output=True, text=True, **kw
    )


@pytest.fixture(scope="module")
def tiny_config_path(tmp_path_factory):
    path = tmp_path_factory.mktemp("cfg") / "config.json"
    path.write_text(json.dumps(TINY))
    return path


class TestPipelineCommands:
    def test_transfer_writes_report_and_bundle(self, tiny_config_path, tmp_path):
        out = tmp_path / "out"
        r = run_cli(["transfer", "--config", str(tiny_config_path), "--out", str(out)])
        assert r.returncode == 0, r.stderr
        report = json.loads((out / "transfer.json").read_text())
        assert report["experiment"] == "transfer"
        bundles = list(out.glob("bundle-*/meta.json"))
        assert bundles, "bundle directory missing"

    def test_rerun_is_byte_identical(self, tiny_config_path, tmp_path):
        out1, out2 = tmp_path / "a", tmp_path / "b"
        for out in (out1, out2):
            r = run_cli(["costs", "--config", str(tiny_config_path), "--out", str(out)])
            assert r.returncode == 0, r.stderr
        assert (out1 / "costs.json").read_bytes() == (out2 / "costs.json").read_bytes()

    def test_seed_flag_overrides(self, tiny_config_path, tmp_path):
        out = tmp_path / "out"
        r = run_cli(["semantics", "--config", str(tiny_config_path),
                     "--out", str(out), "--seed", "2"])
        assert r.returncode == 0, r.stderr
        report = json.loads((out / "semantics.json").read_text())
        assert report["seed"] == 2


class TestExitCodes:
    def test_unknown_config_key_is_2(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps({"not_a_key": 1}))
        r = run_cli(["transfer", "--config", str(bad), "--out", str(tmp_path / "o")])
        assert r.returncode == 2

    def test_missing_config_file_is_2(self, tmp_path):
        r = run_cli(["transfer", "--config", str(tmp_path / "nope.json"),
                     "--out", str(tmp_path / "o")])
        assert r.returncode == 2

    def test_domain_error_is_3(self, tmp_path):
        # single-class CSV breaks training: a domain failure, not a config one
        csv = tmp_path / "one_class.csv"
        from recoursekit.data import credit_schema, save_schema_file, synthesize_credit, write_csv
        from recoursekit.data import Dataset
        ds = synthesize_credit(50, seed=0)
        ones = Dataset(ds.schema, ds.X[ds.y == 1], ds.y[ds.y == 1])
        write_csv(ones, csv)
        schema_path = tmp_path / "schema.json"
        save_schema_file(credit_schema(), "label", schema_path)
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({
            "dataset": {"type": "csv", "path": str(csv), "schema": str(schema_path)},
            "seeds": [0],
        }))
        r = run_cli(["transfer", "--config", str(cfg), "--out", str(tmp_path / "o")])
        assert r.returncode == 3, r.stderr


class TestRecourseCommand:
    def test_offline_recourse_emits_wire_json(self, tiny_config_path, tmp_path):
        out = tmp_path / "out"
        r = run_cli(["transfer", "--config", str(tiny_config_path), "--out", str(out)])
        assert r.returncode == 0, r.stderr
        bundle_dir = sorted(out.glob("bundle-*"))[0]
        meta = json.loads((bundle_dir / "meta.json").read_text())

        from recoursekit.experiments import load_bundle
        import numpy as np
        bundle = load_bundle(str(bundle_dir))
        # bundles store no raw data; probe with a synthetic rejected row
        from recoursekit.data import synthesize_credit
        ds = synthesize_credit(200, seed=99)
        idx = np.nonzero(bundle.base.decide(ds.X) == -1)[0][0]
        req = tmp_path / "req.json"
        req.write_text(json.dumps({
            "x": [float(v) for v in ds.X[idx]],
            "method": "gs",
            "targets": [meta["base_id"]],
            "seed": 0,
        }))
        r = run_cli(["recourse", "--bundle", str(bundle_dir), "--request", str(req)])
        assert r.returncode == 0, r.stderr
        body = json.loads(r.stdout)
        assert "result" in body and body["result"]["method"] == "gs"
