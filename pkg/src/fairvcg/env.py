"""Line-delimited JSON environment protocol for external weight controllers.

One request or reply per line.  Requests:

    {"cmd": "reset", "seed": 7, "config": {...optional overrides...}}
    {"cmd": "step", "weights": [w1, ..., wM]}
    {"cmd": "close"}

Replies:

    {"event": "state", "auction": j, "state": {...}}
    {"event": "step", "state": {...}, "reward": f, "done": b, "info": {...}}
    {"event": "error", "message": "..."}

The state object carries, in order: bids, packages, values, vacancy, capacity,
wins, requests, utility.  Malformed input earns an error reply, never a crash;
the session survives until close or end of input.
"""

from __future__ import annotations

import json
import socket
import sys
from dataclasses import dataclass

import numpy as np

from .config import ExperimentConfig, build_experiment
from .engine import Simulation
from .errors import ConfigError, ContractViolation


class ProtocolError(ValueError):
    """Raised when a request line does not follow the wire schema."""


@dataclass
class EnvState:
    """Observable state: the staged round plus per-MNO history."""

    bids: list[float]
    packages: list[int]
    values: list[float]
    vacancy: list[int]
    capacity: int
    wins: list[int]
    requests: list[int]
    utility: list[float]
    auction: int

    def to_payload(self) -> dict:
        return {
            "bids": self.bids,
            "packages": self.packages,
            "values": self.values,
            "vacancy": self.vacancy,
            "capacity": self.capacity,
            "wins": self.wins,
            "requests": self.requests,
            "utility": self.utility,
        }


@dataclass
class EnvStep:
    """One transition: next state, scalar reward, terminal flag, auction details."""

    state: EnvState
    reward: float
    done: bool
    info: dict


class AuctionEnv:
    """Reset/step interface over a Simulation, weights supplied per step."""

    def __init__(self):
        self._sim: Simulation | None = None
        self._episode_length = 0
        self._weight_floor = 0.05
        self._done = False

    def _observe(self) -> EnvState:
        sim = self._sim
        return EnvState(
            bids=[float(b) for b in sim.round_bids.bids],
            packages=[int(p) for p in sim.round_bids.packages],
            values=[float(v) for v in sim.round_bids.values],
            vacancy=[int(v) for v in sim.snapshot.vacancy],
            capacity=int(sim.snapshot.capacity),
            wins=[led.wins for led in sim.ledgers],
            requests=[led.requests for led in sim.ledgers],
            utility=[float(led.cumulative_utility) for led in sim.ledgers],
            auction=sim.auction_index,
        )

    def reset(self, seed: int, overrides: dict | None = None) -> EnvState:
        """Start a fresh episode; overrides follow the experiment config schema."""
        experiment: ExperimentConfig = build_experiment(overrides)
        self._sim = Simulation(experiment.simulation, seed)
        self._episode_length = experiment.simulation.episode_length
        self._weight_floor = experiment.simulation.policy.weight_floor
        self._done = False
        return self._observe()

    def step(self, weights: list[float]) -> EnvStep:
        """Clear the staged auction with the given weights (clipped to [floor, 1])."""
        if self._sim is None:
            raise ProtocolError("no episode: send reset first")
        if self._done:
            raise ProtocolError("episode finished: send reset to start a new one")
        m = self._sim.config.num_mnos
        arr = np.asarray(weights, dtype=float)
        if arr.shape != (m,):
            raise ProtocolError(f"weights must list {m} numbers")
        if not np.all(np.isfinite(arr)):
            raise ProtocolError("weights must be finite")
        arr = np.clip(arr, self._weight_floor, 1.0)
        cleared = self._sim.auction_index
        outcome = self._sim.step(arr)
        self._done = cleared >= self._episode_length
        winners = sorted(outcome.winners)
        info = {
            "winners": winners,
            "payments": [float(outcome.payments[w]) for w in winners],
            "social_value": float(outcome.social_value),
        }
        return EnvStep(state=self._observe(), reward=float(outcome.fairness), done=self._done, info=info)


def decode_request(line: str) -> dict:
    """Parse and validate one request line into its message dict."""
    try:
        msg = json.loads(line)
    except json.JSONDecodeError as exc:
        raise ProtocolError(f"malformed JSON: {exc}") from None
    if not isinstance(msg, dict) or "cmd" not in msg:
        raise ProtocolError("request must be an object with a cmd field")
    cmd = msg["cmd"]
    if cmd == "reset":
        if "seed" not in msg or not isinstance(msg["seed"], int) or msg["seed"] < 0:
            raise ProtocolError("reset needs a non-negative integer seed")
        extra = set(msg) - {"cmd", "seed", "config"}
        if extra:
            raise ProtocolError(f"unexpected reset fields: {sorted(extra)}")
        if "config" in msg and not isinstance(msg["config"], dict):
            raise ProtocolError("reset config must be an object")
    elif cmd == "step":
        if "weights" not in msg or not isinstance(msg["weights"], list):
            raise ProtocolError("step needs a weights array")
        extra = set(msg) - {"cmd", "weights"}
        if extra:
            raise ProtocolError(f"unexpected step fields: {sorted(extra)}")
    elif cmd == "close":
        if set(msg) != {"cmd"}:
            raise ProtocolError("close takes no other fields")
    else:
        raise ProtocolError(f"unknown cmd {cmd!r}")
    return msg


def encode_request(msg: dict) -> str:
    return json.dumps(msg)


def encode_reply(msg: dict) -> str:
    return json.dumps(msg)


def decode_reply(line: str) -> dict:
    """Parse and validate one reply line into its message dict."""
    try:
        msg = json.loads(line)
    except json.JSONDecodeError as exc:
        raise ProtocolError(f"malformed JSON: {exc}") from None
    if not isinstance(msg, dict) or msg.get("event") not in ("state", "step", "error"):
        raise ProtocolError("reply must be an object with event state|step|error")
    return msg


class ProtocolSession:
    """Transport-independent request handling for one client session."""

    def __init__(self):
        self.env = AuctionEnv()
        self.closed = False

    def handle_line(self, line: str) -> str | None:
        """Reply line for one request line, or None when the session closes."""
        try:
            msg = decode_request(line)
            if msg["cmd"] == "close":
                self.closed = True
                return None
            if msg["cmd"] == "reset":
                state = self.env.reset(msg["seed"], msg.get("config"))
                reply = {"event": "state", "auction": state.auction, "state": state.to_payload()}
            else:
                step = self.env.step(msg["weights"])
                reply = {
                    "event": "step",
                    "state": step.state.to_payload(),
                    "reward": step.reward,
                    "done": step.done,
                    "info": step.info,
                }
        except (ProtocolError, ConfigError, ContractViolation) as exc:
            reply = {"event": "error", "message": str(exc)}
        except Exception as exc:  # keep the session alive whatever the request did
            reply = {"event": "error", "message": f"internal error: {exc}"}
        return encode_reply(reply)


def serve_lines(read_line, write_line) -> None:
    """Drive one session over line callables until close or end of input."""
    session = ProtocolSession()
    while not session.closed:
        line = read_line()
        if line is None or line == "":
            break
        line = line.strip()
        if not line:
            continue
        reply = session.handle_line(line)
        if reply is not None:
            write_line(reply)


def serve_stdio() -> None:
    """Serve one session over stdin/stdout."""
    def read_line():
        return sys.stdin.readline() or None

    def write_line(reply: str):
        sys.stdout.write(reply + "\n")
        sys.stdout.flush()

    serve_lines(read_line, write_line)


def serve_tcp(port: int, host: str = "127.0.0.1") -> None:
    """Serve one client connection over TCP, then return.

    Binding port 0 picks a free port; the chosen address is announced on
    stderr as "listening on host:port" before accepting.
    """
    with socket.socket(socket.AF_INET, socket.SOCK_STREAM) as server:
        server.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        server.bind((host, port))
        server.listen(1)
        actual = server.getsockname()[1]
        print(f"listening on {host}:{actual}", file=sys.stderr, flush=True)
        conn, _ = server.accept()
        with conn, conn.makefile("r") as reader, conn.makefile("w") as writer:

            def read_line():
                return reader.readline() or None

            def write_line(reply: str):
                writer.write(reply + "\n")
                writer.flush()

            try:
                serve_lines(read_line, write_line)
            except (BrokenPipeError, ConnectionResetError):
                pass
