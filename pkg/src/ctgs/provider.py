"""Line protocol for serving and consuming next-token distributions.

Plain TCP, newline-delimited ASCII:

    client: HELLO <catalog checksum>
    server: OK                         (or ERR <message> on mismatch)
    client: NEXT <space-separated context token ids>
    server: DIST <catalog-size space-separated log-probabilities>
            (or ERR <message>)

The client validates every vector: it must have exactly catalog-size
entries and its exponentials must sum to within 1e-4 of one (then it is
renormalized exactly); anything else is rejected.
"""

from __future__ import annotations

import socket
import socketserver
import threading

import numpy as np

from .errors import CatalogMismatch, MalformedDistribution, ProviderUnreachable
from .models import Distribution, ProviderHandle

_RENORM_TOL = 1e-4


def _read_line(fh) -> str:
    line = fh.readline()
    if not line:
        raise ProviderUnreachable("connection closed by provider")
    return line.decode("ascii", "replace").rstrip("\n")


class ProviderClient:
    """One connection to a provider; one in-flight request at a time."""

    def __init__(self, handle: ProviderHandle, timeout: float = 10.0,
                 expected_size: int | None = None):
        self.handle = handle
        self._expected_size = expected_size
        self._lock = threading.Lock()
        try:
            self._sock = socket.create_connection(
                (handle.host, handle.port), timeout=timeout
            )
        except OSError as e:
            raise ProviderUnreachable(f"{handle.host}:{handle.port}: {e}") from None
        self._fh = self._sock.makefile("rb")
        self._send(f"HELLO {handle.checksum}")
        reply = _read_line(self._fh)
        if reply != "OK":
            self.close()
            raise CatalogMismatch(reply.removeprefix("ERR ").strip() or "handshake refused")

    def _send(self, line: str) -> None:
        try:
            self._sock.sendall(line.encode("ascii") + b"\n")
        except OSError as e:
            raise ProviderUnreachable(str(e)) from None

    def fetch(self, context) -> Distribution:
        """Request P(next | context); see module docstring for validation."""
        with self._lock:
            self._send("NEXT " + " ".join(str(int(t)) for t in context))
            reply = _read_line(self._fh)
        if reply.startswith("ERR"):
            raise MalformedDistribution(reply.removeprefix("ERR").strip())
        if not reply.startswith("DIST "):
            raise MalformedDistribution(f"unexpected reply {reply[:40]!r}")
        fields = reply[5:].split()
        try:
            logp = np.asarray([float(x) for x in fields], dtype=np.float64)
        except ValueError:
            raise MalformedDistribution("non-numeric log-probability") from None
        return _validate_vector(logp, self._expected_size)

    def close(self) -> None:
        try:
            self._fh.close()
            self._sock.close()
        except OSError:
            pass


def _validate_vector(logp: np.ndarray, expected_size: int | None) -> Distribution:
    if expected_size is not None and logp.size != expected_size:
        raise MalformedDistribution(
            f"expected {expected_size} log-probabilities, got {logp.size}"
        )
    probs = np.exp(logp)
    total = float(probs.sum())
    if not np.isfinite(total) or abs(total - 1.0) > _RENORM_TOL:
        raise MalformedDistribution(f"probabilities sum to {total}, not within 1e-4 of 1")
    return Distribution(probs / total, validate=False)


class ProviderModel:
    """Session-facing adapter: a remote provider behind the same
    ``next_distribution`` surface as the built-in model."""

    def __init__(self, handle: ProviderHandle, catalog):
        if handle.checksum != catalog.checksum:
            raise CatalogMismatch(
                "handle serves a different catalog than this session uses"
            )
        self.catalog = catalog
        self._client = ProviderClient(handle, expected_size=catalog.size)

    def next_distribution(self, context) -> Distribution:
        return self._client.fetch(context)

    def description(self) -> str:
        return f"provider({self._client.handle.host}:{self._client.handle.port})"

    def close(self) -> None:
        self._client.close()


def fetch_distribution(handle: ProviderHandle, context, catalog_size: int | None = None) -> Distribution:
    """One-shot convenience: connect, handshake, fetch, close."""
    client = ProviderClient(handle, expected_size=catalog_size)
    try:
        return client.fetch(context)
    finally:
        client.close()


class _ProviderRequestHandler(socketserver.StreamRequestHandler):
    def handle(self):
        server: ModelServer = self.server  # type: ignore[assignment]
        line = self.rfile.readline()
        if not line:
            return
        parts = line.decode("ascii", "replace").split()
        if len(parts) != 2 or parts[0] != "HELLO":
            self.wfile.write(b"ERR expected HELLO <checksum>\n")
            return
        if parts[1] != server.model.catalog.checksum:
            self.wfile.write(b"ERR catalog checksum mismatch\n")
            return
        self.wfile.write(b"OK\n")
        while True:
            line = self.rfile.readline()
            if not line:
                return
            text = line.decode("ascii", "replace").strip()
            if not text.startswith("NEXT"):
                self.wfile.write(b"ERR expected NEXT <ids>\n")
                continue
            try:
                context = [int(x) for x in text[4:].split()]
                dist = server.model.next_distribution(context)
            except Exception as e:  # noqa: BLE001 - protocol must answer
                self.wfile.write(f"ERR {e}\n".encode("ascii", "replace"))
                continue
            body = " ".join(f"{x:.17g}" for x in dist.log())
            self.wfile.write(f"DIST {body}\n".encode("ascii"))


class ModelServer(socketserver.ThreadingTCPServer):
    """Serve a model's distributions over the line protocol."""

    allow_reuse_address = True
    daemon_threads = True

    def __init__(self, model, host: str = "127.0.0.1", port: int = 0):
        self.model = model
        super().__init__((host, port), _ProviderRequestHandler)

    @property
    def handle(self) -> ProviderHandle:
        host, port = self.server_address[:2]
        return ProviderHandle(host, port, self.model.catalog.checksum)

    def start_background(self) -> threading.Thread:
        thread = threading.Thread(target=self.serve_forever, daemon=True)
        thread.start()
        return thread
