"""Command-line client for the workbench.

Every data-plane command talks to the HTTP API: a remote server when
`--server` is given, otherwise the in-process app over an ASGI transport.
`serve` is the exception; it hosts the TCP stimulus bridge itself, and
`serve-http` hosts the HTTP API.
"""

from __future__ import annotations

import argparse
import asyncio
import json
import sys
from pathlib import Path

import httpx

from covrl import __version__
from covrl.errors import CovrlError


class ApiClient:
    def __init__(self, server: str | None = None):
        self.server = server

    def request(self, method: str, path: str, payload: dict | None = None) -> dict:
        if self.server:
            with httpx.Client(base_url=self.server, timeout=600.0) as client:
                response = client.request(method, path, json=payload)
        else:
            response = asyncio.run(self._local(method, path, payload))
        if response.status_code >= 400:
            try:
                detail = response.json().get("detail", {})
            except json.JSONDecodeError:
                detail = {"message": response.text}
            message = detail.get("message", str(detail)) if isinstance(detail, dict) else str(detail)
            raise CovrlError(f"{path}: {message}")
        return response.json()

    async def _local(self, method: str, path: str, payload: dict | None):
        from covrl.service import create_app

        transport = httpx.ASGITransport(app=create_app())
        async with httpx.AsyncClient(transport=transport,
                                     base_url="http://covrl.internal",
                                     timeout=600.0) as client:
            return await client.request(method, path, json=payload)


def _cmd_designs(args, client: ApiClient) -> int:
    rows = client.request("GET", "/designs")
    for row in rows:
        ports = " ".join(f"{p['name']}:{p['width']}{p['direction'][0]}" for p in row["ports"])
        print(f"{row['name']:10s} coverage={row['coverage_type']:6s} "
              f"actions={','.join(row['action_ports'])} ports=[{ports}]")
    return 0


def _cmd_parse(args, client: ApiClient) -> int:
    source = Path(args.infile).read_text(encoding="utf-8")
    result = client.request("POST", "/parse", {"source": source})
    fmt = args.format
    if fmt is None:
        fmt = "json" if args.out and args.out.endswith(".json") else "xml"
    text = result["json_text"] if fmt == "json" else result["xml_text"]
    if args.out:
        Path(args.out).write_text(text if text.endswith("\n") else text + "\n",
                                  encoding="utf-8")
        print(f"wrote {args.out}")
    else:
        print(text, end="" if text.endswith("\n") else "\n")
    return 0


def _cmd_tbgen(args, client: ApiClient) -> int:
    payload: dict = {}
    if args.ports:
        payload["ports_spec"] = Path(args.ports).read_text(encoding="utf-8")
    elif args.design:
        payload["design"] = args.design
    else:
        print("tbgen: need --ports or --design", file=sys.stderr)
        return 2
    if args.template:
        payload["template"] = Path(args.template).read_text(encoding="utf-8")
    result = client.request("POST", "/testbench", payload)
    if args.out:
        Path(args.out).write_text(result["testbench"], encoding="utf-8")
        print(f"wrote {args.out}")
    else:
        print(result["testbench"], end="")
    return 0


def _cmd_maxcov(args, client: ApiClient) -> int:
    payload = {"design": args.design, "budget": args.budget, "seeds": args.seeds}
    if args.coverage_type:
        payload["coverage_type"] = args.coverage_type
    result = client.request("POST", "/coverage/max", payload)
    line = (f"{result['design']},{result['coverage_type']},{result['max_percent']},"
            f"{result['budget']},{result['method']}")
    print("design,coverage_type,max_percent,budget,method")
    print(line)
    return 0


def _cmd_run(args, client: ApiClient) -> int:
    from covrl.rlenv import parse_env_config

    config = parse_env_config(Path(args.config).read_text(encoding="utf-8"))
    payload = {
        "design": config.top_module,
        "policy": config.learning_policy,
        "scheme": config.reward_scheme,
        "seed": config.seed,
        "max_steps": config.max_steps,
        "coverage_type": config.coverage_type,
        "probe_budget": args.probe_budget,
        "include_coverage_dump": bool(args.coverage_dump),
        "include_value_trace": bool(args.value_trace),
    }
    result = client.request("POST", "/runs", payload)
    steps = result["stimuli_to_max"]
    status = f"reached max ({result['max_percent']}%) after {steps} stimuli" \
        if not result["censored"] else \
        f"censored at {result['steps']} steps (max {result['max_percent']}%)"
    print(f"{result['design']} {result['policy']}/{result['scheme']} seed={result['seed']}: {status}")
    out_dir = Path(args.out or ".")
    out_dir.mkdir(parents=True, exist_ok=True)
    name = (f"trajectory_{result['design']}_{result['policy']}_"
            f"{result['scheme']}_{result['seed']}.csv")
    (out_dir / name).write_text(result["trajectory_csv"], encoding="utf-8")
    print(f"wrote {out_dir / name}")
    if args.coverage_dump:
        Path(args.coverage_dump).write_text(result["coverage_dump_csv"], encoding="utf-8")
        print(f"wrote {args.coverage_dump}")
    if args.value_trace:
        Path(args.value_trace).write_text(result["value_trace_csv"], encoding="utf-8")
        print(f"wrote {args.value_trace}")
    return 0


def _cmd_compare(args, client: ApiClient) -> int:
    payload = {
        "designs": [d.strip() for d in args.designs.split(",") if d.strip()],
        "seeds": args.seeds,
        "probe_budget": args.probe_budget,
    }
    result = client.request("POST", "/compare", payload)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    for name, text in sorted(result["files"].items()):
        (out_dir / name).write_text(text, encoding="utf-8")
    print(f"wrote {len(result['files'])} files to {out_dir}")
    print((out_dir / "summary.csv").read_text(encoding="utf-8"), end="")
    return 0


def _cmd_serve(args, client: ApiClient) -> int:
    from covrl.bridge.server import BridgeLimits, BridgeServer, session_factory
    from covrl.corpus import load_design
    from covrl.experiment.runner import default_agent_config
    from covrl.rlenv import parse_env_config

    config = parse_env_config(Path(args.config).read_text(encoding="utf-8"))
    entry = load_design(config.top_module)
    factory = session_factory(config, default_agent_config(config.learning_policy),
                              entry.ports)
    server = BridgeServer(args.host, args.port, factory,
                          BridgeLimits(max_sessions=args.sessions),
                          transcript_path=args.transcript)
    host, port = server.address
    print(f"bridge for {config.top_module!r} listening on {host}:{port}", flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    return 0


def _cmd_serve_http(args, client: ApiClient) -> int:
    import uvicorn

    from covrl.service import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port, log_level="info")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="covrl",
        description="Coverage-directed stimulus generation workbench")
    parser.add_argument("--version", action="version", version=f"covrl {__version__}")
    parser.add_argument("--server", default=None,
                        help="workbench HTTP API base URL (default: in-process)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("designs", help="list corpus designs")
    p.set_defaults(func=_cmd_designs)

    p = sub.add_parser("parse", help="parse HDL and emit the port spec")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", default=None)
    p.add_argument("--format", choices=["xml", "json"], default=None)
    p.set_defaults(func=_cmd_parse)

    p = sub.add_parser("tbgen", help="render a testbench from a port spec")
    p.add_argument("--ports", default=None, help="port spec file (.xml or .json)")
    p.add_argument("--design", default=None, help="corpus design name")
    p.add_argument("--template", default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_tbgen)

    p = sub.add_parser("maxcov", help="probe maximum achievable coverage")
    p.add_argument("--design", required=True)
    p.add_argument("--budget", type=int, default=4096)
    p.add_argument("--seeds", type=int, default=3)
    p.add_argument("--coverage-type", default=None)
    p.set_defaults(func=_cmd_maxcov)

    p = sub.add_parser("run", help="run one episode from an env config file")
    p.add_argument("--config", required=True)
    p.add_argument("--out", default=None, help="directory for the trajectory CSV")
    p.add_argument("--probe-budget", type=int, default=4096)
    p.add_argument("--coverage-dump", default=None,
                   help="write the per-cycle coverage CSV here")
    p.add_argument("--value-trace", default=None,
                   help="write the per-cycle value trace CSV here")
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("compare", help="RL vs random across designs and seeds")
    p.add_argument("--designs", required=True, help="comma-separated corpus names")
    p.add_argument("--seeds", type=int, default=3)
    p.add_argument("--out", required=True)
    p.add_argument("--probe-budget", type=int, default=4096)
    p.set_defaults(func=_cmd_compare)

    p = sub.add_parser("serve", help="host the TCP stimulus bridge")
    p.add_argument("--port", type=int, required=True)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--config", required=True, help="env config file")
    p.add_argument("--transcript", default=None)
    p.add_argument("--sessions", type=int, default=None,
                   help="serve N sessions then exit (default: forever)")
    p.set_defaults(func=_cmd_serve)

    p = sub.add_parser("serve-http", help="host the workbench HTTP API")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--host", default="127.0.0.1")
    p.set_defaults(func=_cmd_serve_http)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    client = ApiClient(server=args.server)
    try:
        return args.func(args, client)
    except CovrlError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
