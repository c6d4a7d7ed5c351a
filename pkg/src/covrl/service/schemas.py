"""Request/response models for the workbench HTTP API."""

from __future__ import annotations

from pydantic import BaseModel, Field


class PortModel(BaseModel):
    name: str
    direction: str
    width: int
    role: str


class DesignInfo(BaseModel):
    name: str
    ports: list[PortModel]
    action_ports: list[str]
    coverage_type: str
    learning_policy: str
    reward_scheme: str
    max_steps: int
    counts: dict[str, int]
    max_coverage: dict


class ParseRequest(BaseModel):
    source: str


class ParseResponse(BaseModel):
    design: str
    ports: list[PortModel]
    xml_text: str
    json_text: str


class TestbenchRequest(BaseModel):
    design: str | None = None
    source: str | None = None
    ports_spec: str | None = None  # serialized .ports.xml / .ports.json text
    template: str | None = None


class TestbenchResponse(BaseModel):
    design: str
    testbench: str


class MaxCoverageRequest(BaseModel):
    design: str
    coverage_type: str | None = None
    budget: int = 4096
    seeds: int = 3


class MaxCoverageResponse(BaseModel):
    design: str
    coverage_type: str
    max_percent: str
    budget: int
    method: str


class AgentOverrides(BaseModel):
    lr: float | None = None
    gamma: float | None = None
    hidden: list[int] | None = None
    rollout: int | None = None
    entropy_coef: float | None = None
    clip_ratio: float | None = None
    epochs: int | None = None
    replay_capacity: int | None = None
    batch_size: int | None = None
    epsilon_start: float | None = None
    epsilon_end: float | None = None
    epsilon_decay_steps: int | None = None
    target_sync: int | None = None


class RunRequest(BaseModel):
    design: str
    policy: str | None = None
    scheme: str | None = None
    seed: int | None = None
    max_steps: int | None = None
    coverage_type: str | None = None
    probe_budget: int = 4096
    agent: AgentOverrides | None = None
    include_coverage_dump: bool = False
    include_value_trace: bool = False


class RunResponse(BaseModel):
    design: str
    policy: str
    scheme: str
    seed: int
    max_percent: str
    stimuli_to_max: int | None
    censored: bool
    steps: int
    trajectory_csv: str
    coverage_dump_csv: str | None = None
    value_trace_csv: str | None = None


class CompareRequest(BaseModel):
    designs: list[str]
    seeds: int = Field(ge=1, default=3)
    policies: list[str] | None = None
    schemes: list[str] | None = None
    probe_budget: int = 4096
    probe_seeds: int = 3


class CompareResponse(BaseModel):
    files: dict[str, str]  # filename -> CSV text


class BridgeSessionRequest(BaseModel):
    design: str
    port: int = 0  # 0 picks a free port
    host: str = "127.0.0.1"
    policy: str | None = None
    scheme: str | None = None
    seed: int | None = None
    max_steps: int | None = None
    target_percent: float | None = None
    max_sessions: int | None = 1


class BridgeSessionInfo(BaseModel):
    id: int
    host: str
    port: int
    design: str
    running: bool
    sessions_served: int


class ErrorDetail(BaseModel):
    error: str
    message: str
    line: int | None = None
    col: int | None = None
