"""Command-line experiment runner: a thin client of the HTTP service.

By default requests run against an in-process app instance; --server points
the same client at a remote deployment. The client only moves payloads and
writes the returned tables to disk, so local and remote runs share one code
path and one contract.

Exit codes: 0 success, 2 spec/usage error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings
from pathlib import Path
from typing import Any

import httpx
import yaml

from nomalab import __version__
from nomalab.experiments import JOBS_ENV_VAR, ResultTable

EXIT_OK = 0
EXIT_SPEC = 2
EXIT_NUMERIC = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nomalab",
        description=(
            "Run a NOMA coverage/throughput experiment sweep and write "
            "plot-ready result tables with full provenance."
        ),
    )
    source = parser.add_mutually_exclusive_group()
    source.add_argument("--spec", type=Path, help="YAML experiment file")
    source.add_argument("--recipe", help="built-in recipe name")
    parser.add_argument(
        "--list-recipes", action="store_true", help="print available recipes and exit"
    )
    parser.add_argument(
        "--out",
        type=Path,
        default=Path("."),
        help="output directory (default: current directory)",
    )
    parser.add_argument("--trials", type=int, help="Monte Carlo trials per sweep point")
    parser.add_argument("--seed", type=int, help="root random seed")
    parser.add_argument(
        "--jobs",
        type=int,
        help=f"parallel sweep workers (default: ${JOBS_ENV_VAR} or 1)",
    )
    parser.add_argument(
        "--format",
        choices=("csv", "json"),
        default="csv",
        help="data file format (default: csv)",
    )
    parser.add_argument(
        "--server",
        help="base URL of a running service (default: run in-process)",
    )
    parser.add_argument(
        "--version", action="version", version=f"%(prog)s {__version__}"
    )
    return parser


def _client(server: str | None) -> httpx.Client:
    if server is None:
        with warnings.catch_warnings():
            # starlette's httpx compatibility shim warns on import; that is
            # upstream housekeeping, not something the user can act on.
            warnings.filterwarnings(
                "ignore", message="Using `httpx` with `starlette.testclient`"
            )
            from fastapi.testclient import TestClient

        from nomalab.service import create_app

        return TestClient(create_app())
    return httpx.Client(base_url=server, timeout=3600.0)


def _error_exit(resp: httpx.Response) -> int:
    try:
        body = resp.json()
        detail = body.get("detail", resp.text)
        error_type = body.get("error_type")
    except ValueError:
        detail, error_type = resp.text, None
    print(f"error: {detail}", file=sys.stderr)
    if error_type == "numeric" or resp.status_code >= 500:
        return EXIT_NUMERIC
    return EXIT_SPEC


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)

    try:
        with _client(args.server) as client:
            if args.list_recipes:
                resp = client.get("/recipes")
                if resp.status_code != 200:
                    return _error_exit(resp)
                for name in resp.json()["recipes"]:
                    print(name)
                return EXIT_OK

            if args.spec is None and args.recipe is None:
                parser.error("one of --spec or --recipe is required")

            payload: dict[str, Any] = {
                "trials": args.trials,
                "seed": args.seed,
                "jobs": args.jobs,
            }
            if args.recipe is not None:
                payload["recipe"] = args.recipe
            else:
                try:
                    data = yaml.safe_load(args.spec.read_text(encoding="utf-8"))
                except OSError as exc:
                    print(f"error: cannot read spec file: {exc}", file=sys.stderr)
                    return EXIT_SPEC
                except yaml.YAMLError as exc:
                    print(f"error: spec file is not valid YAML: {exc}", file=sys.stderr)
                    return EXIT_SPEC
                if not isinstance(data, dict):
                    print("error: experiment spec must be a mapping", file=sys.stderr)
                    return EXIT_SPEC
                payload["spec"] = data

            resp = client.post("/experiments/run", json=payload)
    except httpx.HTTPError as exc:
        print(f"error: cannot reach service: {exc}", file=sys.stderr)
        return EXIT_NUMERIC

    if resp.status_code != 200:
        return _error_exit(resp)

    body = resp.json()
    table = ResultTable.from_json_obj(body)
    args.out.mkdir(parents=True, exist_ok=True)
    data_path = args.out / f"{body['name']}.{args.format}"
    data_path.write_text(
        table.to_csv() if args.format == "csv" else table.to_json(),
        encoding="utf-8",
    )
    sidecar_path = args.out / f"{body['name']}.meta.json"
    sidecar_path.write_text(
        json.dumps(body["sidecar"], indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
    )
    for warning in body["warnings"]:
        print(f"warning: {warning}", file=sys.stderr)
    print(f"wrote {data_path}")
    print(f"wrote {sidecar_path}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
