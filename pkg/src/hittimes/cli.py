"""Command-line front end: a thin client of the compute service.

Every subcommand builds a JSON request, posts it to the service (an
in-process ASGI instance by default, or a remote base URL via --server) and
renders the response to files/stdout.  Exit codes: 0 all requested checks
passed, 1 a verification failed or an input broke a domain invariant, 2 usage
or I/O or schema errors.
"""

from __future__ import annotations

import argparse
import asyncio
import json
import os
import sys
from pathlib import Path
from typing import Any

import httpx

from . import io
from .rationals import parse_rational
from .errors import SchemaError

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_USAGE = 2

SEED_ENV_VAR = "HITTIMES_SEED"


class CliFailure(Exception):
    def __init__(self, code: int, message: str) -> None:
        super().__init__(message)
        self.code = code


def _post(path: str, payload: dict, server: str | None) -> dict:
    async def go() -> httpx.Response:
        if server:
            async with httpx.AsyncClient(base_url=server, timeout=600.0) as client:
                return await client.post(path, json=payload)
        from .service.app import create_app

        transport = httpx.ASGITransport(app=create_app())
        async with httpx.AsyncClient(
            transport=transport, base_url="http://hittimes.internal", timeout=600.0
        ) as client:
            return await client.post(path, json=payload)

    try:
        resp = asyncio.run(go())
    except httpx.HTTPError as exc:
        raise CliFailure(EXIT_USAGE, f"service unreachable: {exc}") from exc
    if resp.status_code == 200:
        return resp.json()
    try:
        detail = resp.json().get("detail", resp.text)
    except ValueError:
        detail = resp.text
    if resp.status_code == 400:
        raise CliFailure(EXIT_VIOLATION, f"invariant violation: {detail}")
    raise CliFailure(EXIT_USAGE, f"request rejected ({resp.status_code}): {detail}")


def _load_json(path: str) -> Any:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise CliFailure(EXIT_USAGE, f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise CliFailure(EXIT_USAGE, f"{path} is not valid JSON: {exc}") from exc


def _emit(obj: dict, out: str | None) -> None:
    text = json.dumps(obj, indent=2)
    if out:
        Path(out).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)


def _write(path: str, text: str) -> None:
    Path(path).write_text(text, encoding="utf-8")


def _echo_config(config: dict) -> None:
    print(f"# config {json.dumps(config, sort_keys=True)}", file=sys.stderr)


def _curve_csv_from_obj(obj: dict, comments: list[str] | None = None) -> str:
    return io.curve_csv(io.parse_curve(obj), comments)


def _cmd_cyclic(args: argparse.Namespace, which: str) -> int:
    system_obj = _load_json(args.system)
    resp = _post(f"/cyclic/{which}", {"system": system_obj}, args.server)
    cdf_obj = resp["cdf"]
    if args.csv:
        _write(args.csv, _curve_csv_from_obj(cdf_obj))
    if args.format == "csv" and not args.out:
        print(_curve_csv_from_obj(cdf_obj), end="")
    else:
        _emit(cdf_obj, args.out)
    return EXIT_OK


def _cmd_check_cdf(args: argparse.Namespace) -> int:
    payload: dict = {"cdf": _load_json(args.cdf)}
    if args.alpha:
        payload["alpha"] = args.alpha
    resp = _post("/check/cdf", payload, args.server)
    _emit(resp, args.out)
    return EXIT_OK if resp["pass"] else EXIT_VIOLATION


def _cmd_check_classf(args: argparse.Namespace) -> int:
    resp = _post("/check/class-f", {"target": _load_json(args.target)}, args.server)
    _emit(resp, args.out)
    return EXIT_OK if resp["pass"] else EXIT_VIOLATION


def _cmd_stamp(args: argparse.Namespace) -> int:
    resp = _post(
        "/stamp", {"law": _load_json(args.law), "verify": args.verify}, args.server
    )
    if args.out_system:
        _emit(resp["system"], args.out_system)
    if args.out_stamp:
        _emit(resp["stamp"], args.out_stamp)
    if not (args.out_system or args.out_stamp):
        _emit(resp, None)
    if args.verify and resp["verified"] is not True:
        print("round-trip verification failed", file=sys.stderr)
        return EXIT_VIOLATION
    return EXIT_OK


def _cmd_rationalize(args: argparse.Namespace) -> int:
    payload = {"curve": _load_json(args.curve), "eps": args.eps}
    resp = _post("/rationalize", payload, args.server)
    _emit(resp["law"], args.out)
    if args.report:
        print(json.dumps(resp["report"], sort_keys=True), file=sys.stderr)
    return EXIT_OK if resp["report"]["star_ok"] else EXIT_VIOLATION


def _parse_builtin(text: str) -> dict:
    name, _, rest = text.partition(":")
    params = [p for p in rest.split(",") if p] if rest else []
    for p in params:
        try:
            parse_rational(p)
        except SchemaError as exc:
            raise CliFailure(EXIT_USAGE, f"bad builtin parameter {p!r}: {exc}") from exc
    return {"name": name, "params": params}


def _cmd_realize(args: argparse.Namespace) -> int:
    payload: dict = {
        "eps_list": [e for e in args.eps_list.split(",") if e],
        "margin": args.margin,
        "emit_sets": bool(args.emit_sets),
    }
    if os.path.exists(args.target):
        payload["target"] = _load_json(args.target)
    else:
        builtin = _parse_builtin(args.target)
        builtin["mesh"] = args.mesh
        payload["builtin"] = builtin
    resp = _post("/realize", payload, args.server)
    _echo_config(resp["config"])
    if args.csv_dir:
        Path(args.csv_dir).mkdir(parents=True, exist_ok=True)
        for i, stage in enumerate(resp["stages"]):
            comments = [f"stage {i} eps={stage['eps']} m={stage['m']} q={stage['q']}"]
            _write(
                str(Path(args.csv_dir) / f"stage_{i}.csv"),
                _curve_csv_from_obj(stage["hitting"], comments),
            )
    if args.emit_sets:
        Path(args.emit_sets).mkdir(parents=True, exist_ok=True)
        for i, stage in enumerate(resp["stages"]):
            _emit(stage["system"], str(Path(args.emit_sets) / f"set_{i}.json"))
    slim = {
        "config": resp["config"],
        "stages": [
            {k: v for k, v in stage.items() if k != "system"}
            for stage in resp["stages"]
        ],
    }
    _emit(slim, args.out)
    return EXIT_OK


def _cmd_simulate(args: argparse.Namespace) -> int:
    payload = {
        "system": _load_json(args.system),
        "samples": args.samples,
        "seed": args.seed,
        "horizon": args.horizon,
    }
    resp = _post("/simulate", payload, args.server)
    _echo_config(resp["config"])
    empirical = resp["empirical"]
    comments = [
        f"seed={args.seed} samples={args.samples} horizon={args.horizon}",
        f"censored={empirical['censored']}",
    ]
    if args.csv:
        _write(args.csv, _curve_csv_from_obj(empirical, comments))
    if args.format == "csv" and not args.out:
        print(_curve_csv_from_obj(empirical, comments), end="")
    else:
        _emit(resp, args.out)
    return EXIT_OK


def _cmd_distance(args: argparse.Namespace) -> int:
    payload: dict = {
        "a": _load_json(args.a),
        "b": _load_json(args.b),
        "metric": args.metric,
    }
    if args.horizon:
        payload["horizon"] = args.horizon
    resp = _post("/distance", payload, args.server)
    _emit(resp, args.out)
    return EXIT_OK


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    uvicorn.run("hittimes.service.app:app", host=args.host, port=args.port)
    return EXIT_OK


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV_VAR, "0")
    try:
        return int(raw)
    except ValueError:
        return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hittimes",
        description="Exact hitting/return-time statistics: checks, stamps, "
        "tower realizations and Monte Carlo cross-checks.",
    )
    parser.add_argument("--server", help="base URL of a running service (default: in-process)")
    sub = parser.add_subparsers(dest="command", required=True)

    for which in ("hitting", "return"):
        p = sub.add_parser(which, help=f"exact {which}-time CDF of a cyclic system")
        p.add_argument("system", help="CyclicSystem JSON file")
        p.add_argument("--out", help="write the StepCDF JSON here (default stdout)")
        p.add_argument("--csv", help="also write a two-column staircase CSV here")
        p.add_argument("--format", choices=("json", "csv"), default="json")
        p.set_defaults(func=lambda a, w=which: _cmd_cyclic(a, w))

    p = sub.add_parser("check-cdf", help="staircase conditions + increment inequality")
    p.add_argument("cdf", help="StepCDF JSON file")
    p.add_argument("--alpha", help="spacing to use for the inequality (default: first jump)")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_check_cdf)

    p = sub.add_parser("check-classf", help="admissible limit-class membership")
    p.add_argument("target", help="TargetF JSON file")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_check_classf)

    p = sub.add_parser("stamp", help="build the cyclic system and stamp of a staircase law")
    p.add_argument("law", help="RationalF JSON file ({'alpha': 'p/q', 'betas': [...]})")
    p.add_argument("--verify", action="store_true", help="verify the round trip exactly")
    p.add_argument("--out-system", help="write the CyclicSystem JSON here")
    p.add_argument("--out-stamp", help="write the stamp offsets JSON here")
    p.set_defaults(func=_cmd_stamp)

    p = sub.add_parser("rationalize", help="staircase approximation of a target or step CDF")
    p.add_argument("curve", help="TargetF or StepCDF JSON file")
    p.add_argument("--eps", required=True, help="tolerance as p/q")
    p.add_argument("--out")
    p.add_argument("--report", action="store_true", help="print N, q, K and the star verdict")
    p.set_defaults(func=_cmd_rationalize)

    p = sub.add_parser("realize", help="realize a target as tower hitting CDFs, stage by stage")
    p.add_argument("--target", required=True, help="TargetF JSON file or builtin (exp1, capped_linear:c, scaled_exp:a,l)")
    p.add_argument("--eps-list", required=True, help="comma-separated tolerances, decreasing")
    p.add_argument("--mesh", default="1/128", help="sampling mesh for builtin targets")
    p.add_argument("--margin", type=int, default=2, help="extra tower doublings")
    p.add_argument("--out", help="write the trace JSON here (default stdout)")
    p.add_argument("--csv-dir", help="write per-stage staircase CSVs into this directory")
    p.add_argument("--emit-sets", metavar="DIR", help="write each stage's marked set JSON here")
    p.set_defaults(func=_cmd_realize)

    p = sub.add_parser("simulate", help="Monte Carlo hitting-time sample")
    p.add_argument("--system", required=True, help="SystemSpec JSON file")
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--seed", type=int, default=_default_seed(),
                   help=f"RNG seed (default from ${SEED_ENV_VAR} or 0)")
    p.add_argument("--horizon", type=int, default=10000)
    p.add_argument("--out")
    p.add_argument("--csv")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("distance", help="distance between two curve files")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--metric", choices=("ks", "sup", "levy"), required=True)
    p.add_argument("--horizon", help="horizon for the sup metric (default: past all breakpoints)")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_distance)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=_cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliFailure as exc:
        print(f"hittimes: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
