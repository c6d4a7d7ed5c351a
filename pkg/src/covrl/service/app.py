"""FastAPI application wrapping the workbench core."""

from __future__ import annotations

import threading
from dataclasses import replace
from fractions import Fraction

from fastapi import FastAPI, HTTPException

import covrl
from covrl import errors
from covrl.bridge.server import BridgeLimits, BridgeServer, session_factory
from covrl.corpus import DESIGN_NAMES, load_corpus, load_design
from covrl.experiment.compare import build_comparison, trajectory_csv
from covrl.experiment.maxcov import find_max_coverage
from covrl.experiment.runner import default_agent_config, run_one
from covrl.hdl.design import parse_design
from covrl.hdl.ports import emit_port_spec, extract_ports, load_port_spec
from covrl.sim.coverage import format_percent
from covrl.service.schemas import (
    BridgeSessionInfo,
    BridgeSessionRequest,
    CompareRequest,
    CompareResponse,
    DesignInfo,
    MaxCoverageRequest,
    MaxCoverageResponse,
    ParseRequest,
    ParseResponse,
    PortModel,
    RunRequest,
    RunResponse,
    TestbenchRequest,
    TestbenchResponse,
)
from covrl.tbgen.engine import Template
from covrl.tbgen.testbench import render_testbench


def _bad_request(exc: Exception, status: int = 422) -> HTTPException:
    detail = {"error": type(exc).__name__, "message": str(exc)}
    if isinstance(exc, errors.HdlSyntaxError):
        detail["line"] = exc.line
        detail["col"] = exc.col
    elif isinstance(exc, errors.UnsupportedConstruct) and exc.line:
        detail["line"] = exc.line
        detail["col"] = exc.col
    return HTTPException(status_code=status, detail=detail)


def _port_models(ports) -> list[PortModel]:
    return [PortModel(name=p.name, direction=p.direction, width=p.width, role=p.role)
            for p in ports.ports]


class _BridgeRegistry:
    def __init__(self):
        self._lock = threading.Lock()
        self._servers: dict[int, tuple[BridgeServer, str]] = {}
        self._next_id = 1

    def add(self, server: BridgeServer, design: str) -> int:
        with self._lock:
            session_id = self._next_id
            self._next_id += 1
            self._servers[session_id] = (server, design)
            return session_id

    def get(self, session_id: int) -> tuple[BridgeServer, str]:
        with self._lock:
            if session_id not in self._servers:
                raise HTTPException(status_code=404, detail={"error": "UnknownSession",
                                                             "message": str(session_id)})
            return self._servers[session_id]

    def remove(self, session_id: int) -> tuple[BridgeServer, str]:
        server = self.get(session_id)
        with self._lock:
            del self._servers[session_id]
        return server


def create_app() -> FastAPI:
    app = FastAPI(title="covrl workbench", version=covrl.__version__)
    bridges = _BridgeRegistry()

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok", "version": covrl.__version__}

    @app.get("/designs", response_model=list[DesignInfo])
    def designs() -> list[DesignInfo]:
        out = []
        for entry in load_corpus():
            out.append(DesignInfo(
                name=entry.name,
                ports=_port_models(entry.ports),
                action_ports=list(entry.env_config.ports),
                coverage_type=entry.env_config.coverage_type,
                learning_policy=entry.env_config.learning_policy,
                reward_scheme=entry.env_config.reward_scheme,
                max_steps=entry.env_config.max_steps,
                counts=entry.golden["counts"],
                max_coverage=entry.golden["max_coverage"],
            ))
        return out

    @app.post("/parse", response_model=ParseResponse)
    def parse(request: ParseRequest) -> ParseResponse:
        try:
            ir = parse_design(request.source)
            ports = extract_ports(ir)
        except errors.CovrlError as exc:
            raise _bad_request(exc) from exc
        return ParseResponse(
            design=ir.name,
            ports=_port_models(ports),
            xml_text=emit_port_spec(ports, "xml"),
            json_text=emit_port_spec(ports, "json"),
        )

    @app.post("/testbench", response_model=TestbenchResponse)
    def testbench(request: TestbenchRequest) -> TestbenchResponse:
        try:
            if request.ports_spec is not None:
                ports = load_port_spec(request.ports_spec)
            elif request.source is not None:
                ports = extract_ports(parse_design(request.source))
            elif request.design is not None:
                ports = load_design(request.design).ports
            else:
                raise errors.ConfigError("provide design, source, or ports_spec")
            template = Template(request.template) if request.template else None
            text = render_testbench(ports, template)
        except errors.CovrlError as exc:
            raise _bad_request(exc) from exc
        return TestbenchResponse(design=ports.design_name, testbench=text)

    @app.post("/coverage/max", response_model=MaxCoverageResponse)
    def coverage_max(request: MaxCoverageRequest) -> MaxCoverageResponse:
        try:
            entry = load_design(request.design)
            coverage_type = request.coverage_type or entry.env_config.coverage_type
            record = find_max_coverage(entry, coverage_type, request.budget,
                                       request.seeds)
        except errors.CovrlError as exc:
            raise _bad_request(exc) from exc
        except ValueError as exc:
            raise _bad_request(exc) from exc
        return MaxCoverageResponse(
            design=record.design, coverage_type=record.coverage_type,
            max_percent=record.percent_text, budget=record.budget,
            method=record.method)

    @app.post("/runs", response_model=RunResponse)
    def runs(request: RunRequest) -> RunResponse:
        try:
            entry = load_design(request.design)
            config = entry.env_config
            if request.policy is not None:
                config = replace(config, learning_policy=request.policy)
            if request.scheme is not None:
                config = replace(config, reward_scheme=request.scheme)
            if request.seed is not None:
                config = replace(config, seed=request.seed)
            if request.max_steps is not None:
                config = replace(config, max_steps=request.max_steps)
            if request.coverage_type is not None:
                config = replace(config, coverage_type=request.coverage_type)
            agent_config = default_agent_config(config.learning_policy)
            if request.agent is not None:
                overrides = {k: (tuple(v) if k == "hidden" else v)
                             for k, v in request.agent.model_dump(exclude_none=True).items()}
                agent_config = agent_config.with_overrides(**overrides)
            max_record = find_max_coverage(entry, config.coverage_type,
                                           request.probe_budget)
            record = run_one(entry, config, agent_config, max_record,
                             collect_dump=request.include_coverage_dump,
                             collect_trace=request.include_value_trace)
        except errors.CovrlError as exc:
            raise _bad_request(exc) from exc
        return RunResponse(
            design=record.design, policy=record.policy, scheme=record.scheme,
            seed=record.seed,
            max_percent=format_percent(record.max_percent.numerator,
                                       100 * record.max_percent.denominator),
            stimuli_to_max=record.stimuli_to_max, censored=record.censored,
            steps=record.steps, trajectory_csv=trajectory_csv(record),
            coverage_dump_csv="\n".join(record.coverage_dump) + "\n"
                              if record.coverage_dump else None,
            value_trace_csv="\n".join(record.value_trace) + "\n"
                            if record.value_trace else None,
        )

    @app.post("/compare", response_model=CompareResponse)
    def compare_endpoint(request: CompareRequest) -> CompareResponse:
        policies = request.policies or ["ppo", "a2c", "dqn"]
        schemes = request.schemes or ["optimistic", "penalty"]
        combos = [(p, s) for p in policies for s in schemes]
        try:
            files = build_comparison(request.designs, request.seeds, combos,
                                     request.probe_budget, request.probe_seeds)
        except errors.CovrlError as exc:
            raise _bad_request(exc) from exc
        return CompareResponse(files=files)

    @app.post("/bridge/sessions", response_model=BridgeSessionInfo)
    def bridge_start(request: BridgeSessionRequest) -> BridgeSessionInfo:
        try:
            entry = load_design(request.design)
            config = entry.env_config
            if request.policy is not None:
                config = replace(config, learning_policy=request.policy)
            if request.scheme is not None:
                config = replace(config, reward_scheme=request.scheme)
            if request.seed is not None:
                config = replace(config, seed=request.seed)
            if request.max_steps is not None:
                config = replace(config, max_steps=request.max_steps)
            if request.target_percent is not None:
                config = replace(config, target_percent=Fraction(str(request.target_percent)))
            factory = session_factory(config, default_agent_config(config.learning_policy),
                                      entry.ports)
            server = BridgeServer(request.host, request.port, factory,
                                  BridgeLimits(max_sessions=request.max_sessions))
            server.start()
        except OSError as exc:
            raise _bad_request(exc, status=409) from exc
        except errors.CovrlError as exc:
            raise _bad_request(exc) from exc
        session_id = bridges.add(server, entry.name)
        host, port = server.address
        return BridgeSessionInfo(id=session_id, host=host, port=port,
                                 design=entry.name, running=True,
                                 sessions_served=server.sessions_served)

    @app.get("/bridge/sessions/{session_id}", response_model=BridgeSessionInfo)
    def bridge_status(session_id: int) -> BridgeSessionInfo:
        server, design = bridges.get(session_id)
        host, port = "", 0
        running = server.running
        if running:
            try:
                host, port = server.address
            except OSError:
                running = False
        return BridgeSessionInfo(id=session_id, host=host, port=port, design=design,
                                 running=running,
                                 sessions_served=server.sessions_served)

    @app.delete("/bridge/sessions/{session_id}")
    def bridge_stop(session_id: int) -> dict:
        server, _ = bridges.remove(session_id)
        server.stop()
        return {"stopped": session_id}

    return app
