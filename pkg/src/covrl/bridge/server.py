"""TCP stimulus server: one client at a time, strict session phases.

A session accepts exactly one Hello (validated against the configured design
and action ports), then serves Request/Stimulus rounds until the reported
coverage reaches the target or the step budget runs out, then sends Done.
Malformed or out-of-phase frames get an Error frame and the connection is
closed. The external simulator owns coverage in this mode: the scalar in
each Request is both the agent's observation and the reward input.
"""

from __future__ import annotations

import logging
import socket
import threading
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from covrl.agents import AgentConfig, Transition, new_agent
from covrl.bridge.protocol import (
    Done, Error, Hello, Request, Stimulus, WireMessage,
    decode_message, encode_message,
)
from covrl.errors import MalformedFrame
from covrl.hdl.ports import PortSpec, PortSpecSet
from covrl.rlenv import EnvConfig, compute_reward, decode_action

log = logging.getLogger(__name__)


class BridgeSession:
    """Protocol state machine plus the agent loop for one client."""

    def __init__(self, design: str, action_ports: list[PortSpec], agent,
                 reward_scheme: str, target_percent: Fraction, max_steps: int):
        self.design = design
        self.action_ports = action_ports
        self.agent = agent
        self.reward_scheme = reward_scheme
        self.target_percent = Fraction(target_percent)
        self.max_steps = max_steps
        self.phase = "awaiting-hello"
        self.steps = 0
        self.prev_coverage: Fraction | None = None
        self.prev_obs: np.ndarray | None = None
        self.last_action: int | None = None
        self.actions: list[int] = []

    def handle(self, message: WireMessage) -> WireMessage:
        """Returns the reply; Error/Done also move the session to closed."""
        if self.phase == "awaiting-hello":
            if not isinstance(message, Hello):
                self.phase = "closed"
                return Error(code="protocol", detail="expected hello first")
            if message.design != self.design:
                self.phase = "closed"
                return Error(code="unknown-design", detail=message.design)
            expected = tuple((p.name, p.width) for p in self.action_ports)
            if message.ports != expected:
                self.phase = "closed"
                return Error(code="port-mismatch",
                             detail=f"expected {list(expected)}")
            self.phase = "serving"
            return None  # no ack; the client follows up with a request
        if self.phase != "serving":
            return Error(code="protocol", detail="session closed")
        if not isinstance(message, Request):
            self.phase = "closed"
            return Error(code="protocol", detail="expected request")
        return self._serve_request(message)

    def _serve_request(self, request: Request) -> WireMessage:
        coverage = request.coverage_percent()
        obs = np.array([float(coverage / 100)])
        at_target = coverage >= self.target_percent
        out_of_budget = self.steps >= self.max_steps
        if self.last_action is not None:
            reward = compute_reward(self.prev_coverage, coverage, self.reward_scheme)
            self.agent.observe(Transition(
                obs=self.prev_obs, action=self.last_action, reward=reward,
                next_obs=obs, done=at_target or out_of_budget))
            self.agent.update()
        if at_target:
            self.phase = "closed"
            return Done(reason="target-reached")
        if out_of_budget:
            self.phase = "closed"
            return Done(reason="budget-exhausted")
        action = self.agent.select_action(obs)
        self.actions.append(action)
        self.last_action = action
        self.prev_obs = obs
        self.prev_coverage = coverage
        self.steps += 1
        values = decode_action(action, self.action_ports)
        return Stimulus(values=tuple(
            (p.name, values[p.name].bits) for p in self.action_ports))


def session_factory(env_config: EnvConfig, agent_config: AgentConfig,
                    ports: PortSpecSet):
    """Builds a fresh agent+session per connection (observation is the scalar
    reported coverage; the external simulator owns the coverage numbers)."""
    action_ports = [ports.get(name) for name in env_config.ports]

    def factory() -> BridgeSession:
        agent = new_agent(agent_config, obs_dim=1,
                          action_space=1 << sum(p.width for p in action_ports),
                          seed=env_config.seed)
        return BridgeSession(
            design=env_config.top_module,
            action_ports=action_ports,
            agent=agent,
            reward_scheme=env_config.reward_scheme,
            target_percent=env_config.target_percent,
            max_steps=env_config.max_steps,
        )
    return factory


@dataclass
class BridgeLimits:
    max_sessions: int | None = None  # None serves until stopped


class BridgeServer:
    def __init__(self, host: str, port: int, factory,
                 limits: BridgeLimits | None = None,
                 transcript_path: str | Path | None = None):
        self.factory = factory
        self.limits = limits or BridgeLimits()
        self.transcript_path = Path(transcript_path) if transcript_path else None
        self._sock = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
        self._sock.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        try:
            self._sock.bind((host, port))
        except OSError:
            self._sock.close()
            raise
        self._sock.listen(1)
        self._stop = threading.Event()
        self._thread: threading.Thread | None = None
        self.sessions_served = 0

    @property
    def address(self) -> tuple[str, int]:
        return self._sock.getsockname()

    @property
    def running(self) -> bool:
        return self._thread is not None and self._thread.is_alive()

    def _log(self, fh, prefix: str, payload: bytes) -> None:
        if fh is not None:
            fh.write(prefix + payload.decode("utf-8").rstrip("\n") + "\n")
            fh.flush()

    def _serve_connection(self, conn: socket.socket, fh) -> None:
        session = self.factory()
        reader = conn.makefile("rb")
        try:
            for raw in reader:
                self._log(fh, "< ", raw)
                try:
                    message = decode_message(raw)
                except MalformedFrame as exc:
                    reply = Error(code="malformed", detail=exc.excerpt)
                    payload = encode_message(reply)
                    conn.sendall(payload)
                    self._log(fh, "> ", payload)
                    return
                reply = session.handle(message)
                if reply is None:
                    continue
                payload = encode_message(reply)
                conn.sendall(payload)
                self._log(fh, "> ", payload)
                if isinstance(reply, (Done, Error)):
                    return
        finally:
            reader.close()
            conn.close()

    def _accept_loop(self) -> None:
        fh = None
        if self.transcript_path is not None:
            fh = open(self.transcript_path, "w", encoding="utf-8", newline="")
        try:
            self._sock.settimeout(0.2)
            while not self._stop.is_set():
                if (self.limits.max_sessions is not None
                        and self.sessions_served >= self.limits.max_sessions):
                    break
                try:
                    conn, peer = self._sock.accept()
                except socket.timeout:
                    continue
                except OSError:
                    break
                log.info("bridge session from %s", peer)
                try:
                    self._serve_connection(conn, fh)
                finally:
                    self.sessions_served += 1
        finally:
            if fh is not None:
                fh.close()
            self._sock.close()

    def start(self) -> None:
        self._thread = threading.Thread(target=self._accept_loop, daemon=True)
        self._thread.start()

    def wait(self, timeout: float | None = None) -> None:
        if self._thread is not None:
            self._thread.join(timeout)

    def stop(self) -> None:
        self._stop.set()
        if self._thread is not None:
            self._thread.join(timeout=5)

    def serve_forever(self) -> None:
        self._accept_loop()


def serve(address: tuple[str, int], factory, limits: BridgeLimits | None = None,
          transcript_path: str | Path | None = None) -> BridgeServer:
    """Bind, start serving in a background thread, and return the server."""
    server = BridgeServer(address[0], address[1], factory, limits, transcript_path)
    server.start()
    return server
