"""Run an ASGI app on a background thread.

Used both by the single-binary boot (object store, doc store, and
gateway each get a real listening socket, keeping the architecture's
network boundaries real on one host) and by tests that need actual HTTP
servers. Port 0 binds an ephemeral port; ``base_url`` reports the real
one.
"""

from __future__ import annotations

import socket
import threading
import time

import uvicorn


class ServerHandle:
    def __init__(self, app, host: str = "127.0.0.1", port: int = 0, log_level: str = "warning"):
        self._config = uvicorn.Config(
            app, host=host, port=port, log_level=log_level, access_log=False
        )
        self._server = uvicorn.Server(self._config)
        self._thread: threading.Thread | None = None
        self._host = host

    def start(self, timeout: float = 15.0) -> "ServerHandle":
        self._thread = threading.Thread(target=self._server.run, daemon=True)
        self._thread.start()
        deadline = time.monotonic() + timeout
        while not self._server.started:
            if time.monotonic() > deadline:
                raise RuntimeError("server failed to start within timeout")
            if not self._thread.is_alive():
                raise RuntimeError("server thread exited during startup")
            time.sleep(0.01)
        return self

    @property
    def port(self) -> int:
        for srv in self._server.servers:
            for sock in srv.sockets:
                if sock.family in (socket.AF_INET, socket.AF_INET6):
                    return sock.getsockname()[1]
        raise RuntimeError("server has no bound socket")

    @property
    def base_url(self) -> str:
        return f"http://{self._host}:{self.port}"

    def stop(self, timeout: float = 10.0) -> None:
        self._server.should_exit = True
        if self._thread is not None:
            self._thread.join(timeout)


def parse_listen(listen: str) -> tuple[str, int]:
    """'host:port' -> (host, port); bare ':8080' binds all interfaces."""
    host, _, port = listen.rpartition(":")
    if not port.isdigit():
        raise ValueError(f"invalid listen address: {listen!r} (want host:port)")
    return host or "0.0.0.0", int(port)
