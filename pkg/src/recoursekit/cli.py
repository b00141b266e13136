"""Command-line entry point.

Subcommands: transfer, costs, bounds, semantics run the experiment pipelines
from a JSON config and write reports (plot data, not plots) into --out;
serve starts the HTTP facade on a saved bundle; recourse evaluates a single
recourse request against a bundle and prints the exact JSON the service
would return (the offline oracle for service parity).

Exit codes: 0 success, 2 configuration error, 3 experiment-domain error.
"""

from __future__ import annotations

import argparse
import json
import sys

from .analytics import AnalyticsError
from .autoencoder import AutoencoderError
from .data import DataError, SchemaError
from .engines import EngineError
from .models import TrainingError
from .experiments import (
    ConfigError,
    ExperimentError,
    build_bundle,
    load_bundle,
    normalize_config,
    run_bounds,
    run_costs,
    run_semantics,
    run_transfer,
    save_bundle,
    write_report,
)

EXIT_CONFIG = 2
EXIT_DOMAIN = 3

PIPELINES = {
    "transfer": run_transfer,
    "costs": run_costs,
    "bounds": run_bounds,
    "semantics": run_semantics,
}


def _read_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except json.JSONDecodeError as e:
        raise ConfigError(f"config is not valid JSON: {e}") from None


def _run_pipeline(name: str, args) -> int:
    config = _read_config(args.config)
    if args.seed is not None:
        config["seeds"] = [args.seed]
    config = normalize_config(config)
    report = PIPELINES[name](config)
    path = write_report(report, args.out, f"{name}.json")
    print(f"wrote {path}")
    if name == "costs":
        from .experiments import cost_table_csv
        import os

        csv_path = os.path.join(args.out, "costs.csv")
        with open(csv_path, "w", encoding="utf-8") as fh:
            fh.write(cost_table_csv(report))
        print(f"wrote {csv_path}")
    bundle_path = save_bundle(build_bundle(config, config["seeds"][0]), args.out)
    print(f"bundle at {bundle_path}")
    return 0


def _run_recourse(args) -> int:
    from .service import recourse_payload, render_wire

    bundle = load_bundle(args.bundle)
    if args.request == "-":
        payload = json.loads(sys.stdin.read())
    else:
        with open(args.request, "r", encoding="utf-8") as fh:
            payload = json.load(fh)
    status, body = recourse_payload(bundle, payload)
    print(render_wire(body))
    return 0 if status in (200, 422) else EXIT_CONFIG


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="recoursekit")
    sub = parser.add_subparsers(dest="command", required=True)

    for name in PIPELINES:
        p = sub.add_parser(name, help=f"run the {name} pipeline")
        p.add_argument("--config", default=None, help="JSON experiment config")
        p.add_argument("--out", default="out", help="output directory")
        p.add_argument("--seed", type=int, default=None, help="override config seeds")

    p_serve = sub.add_parser("serve", help="serve the HTTP facade over a bundle")
    p_serve.add_argument("--bundle", required=True)
    p_serve.add_argument("--port", type=int, default=8000)
    p_serve.add_argument("--host", default="127.0.0.1")

    p_rec = sub.add_parser("recourse", help="evaluate one recourse request offline")
    p_rec.add_argument("--bundle", required=True)
    p_rec.add_argument("--request", required=True, help="request JSON path or - for stdin")

    args = parser.parse_args(argv)
    try:
        if args.command == "serve":
            from .service import serve

            serve(args.bundle, args.port, args.host)
            return 0
        if args.command == "recourse":
            return _run_recourse(args)
        return _run_pipeline(args.command, args)
    except (ConfigError, SchemaError, json.JSONDecodeError) as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except (ExperimentError, DataError, EngineError, AnalyticsError,
            TrainingError, AutoencoderError) as e:
        print(f"experiment error: {e}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
