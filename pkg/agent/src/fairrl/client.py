"""Client for the line-JSON auction-environment protocol.

Talks to a server over stdio (spawning it as a subprocess) or TCP. The agent
side never imports the environment package; the wire is the only coupling.
"""

from __future__ import annotations

import json
import socket
import subprocess
import sys


class ProtocolError(RuntimeError):
    """The server reported an error or sent something off-schema."""


DEFAULT_SERVER_CMD = [sys.executable, "-m", "fairvcg", "serve", "--stdio"]


class EnvClient:
    """One environment session over `stdio` or `tcp://host:port`.

    `stdio` spawns the server command as a child process (default:
    `python -m fairvcg serve --stdio`, so the environment package must be
    installed); `tcp://host:port` connects to an already-running server.
    """

    def __init__(self, address: str = "stdio", server_cmd: list[str] | None = None):
        self.address = address
        self._proc: subprocess.Popen | None = None
        self._sock: socket.socket | None = None
        if address == "stdio":
            self._proc = subprocess.Popen(
                server_cmd or DEFAULT_SERVER_CMD,
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                text=True,
                bufsize=1,
            )
            self._reader = self._proc.stdout
            self._writer = self._proc.stdin
        elif address.startswith("tcp://"):
            host, _, port = address[len("tcp://"):].partition(":")
            if not host or not port.isdigit():
                raise ProtocolError(f"bad tcp address {address!r}, want tcp://host:port")
            self._sock = socket.create_connection((host, int(port)), timeout=60)
            self._reader = self._sock.makefile("r")
            self._writer = self._sock.makefile("w")
        else:
            raise ProtocolError(f"unknown env address {address!r}, want stdio or tcp://host:port")

    def _rpc(self, msg: dict) -> dict:
        try:
            self._writer.write(json.dumps(msg) + "\n")
            self._writer.flush()
            line = self._reader.readline()
        except (OSError, ValueError) as exc:  # broken pipe, closed file, ...
            raise ProtocolError(f"transport failure: {exc}") from None
        if not line:
            raise ProtocolError("server closed the connection")
        try:
            reply = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ProtocolError(f"unparseable reply: {exc}") from None
        if not isinstance(reply, dict) or "event" not in reply:
            raise ProtocolError("reply is not an event object")
        if reply["event"] == "error":
            raise ProtocolError(reply.get("message", "unspecified server error"))
        return reply

    def reset(self, seed: int, config: dict | None = None) -> dict:
        """Start an episode; returns the first observable state dict."""
        msg = {"cmd": "reset", "seed": seed}
        if config is not None:
            msg["config"] = config
        reply = self._rpc(msg)
        if reply["event"] != "state":
            raise ProtocolError(f"expected state reply to reset, got {reply['event']}")
        return reply["state"]

    def step(self, weights: list[float]) -> tuple[dict, float, bool, dict]:
        """Clear one auction; returns (state, reward, done, info)."""
        reply = self._rpc({"cmd": "step", "weights": [float(w) for w in weights]})
        if reply["event"] != "step":
            raise ProtocolError(f"expected step reply, got {reply['event']}")
        return reply["state"], float(reply["reward"]), bool(reply["done"]), reply["info"]

    def close(self) -> None:
        """End the session; safe to call more than once."""
        try:
            if self._writer and not self._writer.closed:
                self._writer.write(json.dumps({"cmd": "close"}) + "\n")
                self._writer.flush()
        except (BrokenPipeError, ValueError, OSError):
            pass
        if self._proc is not None:
            try:
                self._proc.wait(timeout=10)
            except subprocess.TimeoutExpired:
                self._proc.kill()
                self._proc.wait()
            self._proc = None
        if self._sock is not None:
            self._sock.close()
            self._sock = None

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()
