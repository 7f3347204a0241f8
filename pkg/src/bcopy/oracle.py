"""Hard-label teachers: f maps R^d to {-1,+1}, queried in batches.

Built-in oracles are immutable and deterministic; exact-boundary points
label +1 so every oracle is a total function. The counting wrapper tracks
the query budget; the remote oracle speaks a newline-delimited JSON
protocol to an external serving process.
"""

import json
import socket
import subprocess
import threading
from dataclasses import dataclass

import numpy as np

from . import kernels

LABELS = (-1, 1)


class ProtocolError(RuntimeError):
    """Remote teacher broke the wire contract (bad id, label or shape)."""


class TransportError(RuntimeError):
    """Remote teacher unreachable or the connection failed mid-run."""


@dataclass
class QueryBudget:
    calls: int = 0
    batches: int = 0


def _as_points(points, dim):
    pts = np.ascontiguousarray(points, dtype=np.float64)
    if pts.ndim != 2:
        raise ValueError("points must be an n x d matrix")
    if pts.shape[1] != dim:
        raise ValueError(f"points have dim {pts.shape[1]}, oracle expects {dim}")
    return pts


class Oracle:
    """Base class: subclasses implement _labels(points) -> int64 array."""

    kind = "abstract"

    def __init__(self, dim, name=None):
        self.dim = int(dim)
        self.name = name or self.kind

    def classify(self, points):
        pts = _as_points(points, self.dim)
        if pts.shape[0] == 0:
            return np.empty(0, dtype=np.int64)
        return self._labels(pts)

    def _labels(self, points):
        raise NotImplementedError

    def close(self):
        pass


class HyperplaneOracle(Oracle):
    kind = "hyperplane"

    def __init__(self, w, b):
        w = np.asarray(w, dtype=np.float64)
        if w.ndim != 1 or w.shape[0] < 1:
            raise ValueError("w must be a 1-D vector")
        if np.linalg.norm(w) == 0.0:
            raise ValueError("w must be nonzero")
        super().__init__(w.shape[0])
        self.w = w
        self.b = float(b)

    def _labels(self, points):
        return np.where(points @ self.w + self.b >= 0.0, 1, -1).astype(np.int64)


class SphereOracle(Oracle):
    kind = "sphere"

    def __init__(self, center, radius):
        center = np.asarray(center, dtype=np.float64)
        if center.ndim != 1 or center.shape[0] < 1:
            raise ValueError("center must be a 1-D vector")
        if radius <= 0.0:
            raise ValueError("radius must be positive")
        super().__init__(center.shape[0])
        self.center = center
        self.radius = float(radius)

    def _labels(self, points):
        d = np.linalg.norm(points - self.center, axis=1)
        return np.where(d <= self.radius, 1, -1).astype(np.int64)


class NearestNeighborOracle(Oracle):
    """1-NN teacher over a stored training set (stand-in for an overfitted
    black box). Ties between equidistant training points go to the smallest
    training index."""

    kind = "nearest-neighbor"

    def __init__(self, train_x, train_y):
        train_x = np.ascontiguousarray(train_x, dtype=np.float64)
        train_y = np.asarray(train_y, dtype=np.int64)
        if train_x.ndim != 2 or train_x.shape[0] == 0:
            raise ValueError("training set must be a non-empty n x d matrix")
        if train_y.shape != (train_x.shape[0],):
            raise ValueError("labels must match the training points")
        if not np.isin(train_y, LABELS).all():
            raise ValueError("training labels must be -1 or +1")
        super().__init__(train_x.shape[1])
        self.train_x = train_x
        self.train_y = train_y

    def _labels(self, points):
        idx = kernels.nearest_index(points, self.train_x)
        return self.train_y[idx]


def make_analytic_oracle(kind, **params):
    """Factory for the analytic test oracles with known boundaries."""
    if kind == "hyperplane":
        return HyperplaneOracle(params["w"], params.get("b", 0.0))
    if kind == "sphere":
        return SphereOracle(params["center"], params["radius"])
    raise ValueError(f"unknown analytic oracle kind {kind!r}")


def fit_nearest_neighbor_teacher(train_x, train_y):
    return NearestNeighborOracle(train_x, train_y)


def classify_batch(oracle, points):
    return oracle.classify(points)


class CountingOracle(Oracle):
    """Transparent wrapper that counts labelled points and batch requests."""

    kind = "composed-counting"

    def __init__(self, inner):
        super().__init__(inner.dim, name=f"counting({inner.name})")
        self.inner = inner
        self.budget = QueryBudget()
        self._lock = threading.Lock()

    def classify(self, points):
        labels = self.inner.classify(points)
        with self._lock:
            self.budget.calls += int(labels.shape[0])
            self.budget.batches += 1
        return labels

    def close(self):
        self.inner.close()


def with_counting(oracle):
    return CountingOracle(oracle)


# --- remote teacher client -------------------------------------------------
#
# Wire protocol, newline-delimited JSON over stdio or TCP:
#   {"op":"hello"}                          -> {"op":"hello","dim":d,"name":s}
#   {"op":"predict","id":k,"x":[[..],..]}   -> {"id":k,"y":[-1|1,..]}
#   {"op":"bye"}                            -> server exits


class _StdioTransport:
    def __init__(self, argv):
        try:
            self.proc = subprocess.Popen(
                argv, stdin=subprocess.PIPE, stdout=subprocess.PIPE, text=True
            )
        except OSError as exc:
            raise TransportError(f"cannot spawn {argv!r}: {exc}") from exc

    def send(self, obj):
        try:
            self.proc.stdin.write(json.dumps(obj) + "\n")
            self.proc.stdin.flush()
        except (BrokenPipeError, OSError) as exc:
            raise TransportError(f"server pipe closed: {exc}") from exc

    def recv_line(self):
        line = self.proc.stdout.readline()
        if not line:
            raise TransportError("server closed the connection")
        return line

    def close(self):
        if self.proc.poll() is None:
            try:
                self.send({"op": "bye"})
            except TransportError:
                pass
        self.proc.wait(timeout=10)


class _TcpTransport:
    def __init__(self, host, port):
        try:
            self.sock = socket.create_connection((host, port), timeout=30)
        except OSError as exc:
            raise TransportError(f"cannot connect to {host}:{port}: {exc}") from exc
        self.reader = self.sock.makefile("r", encoding="utf-8")
        self.writer = self.sock.makefile("w", encoding="utf-8")

    def send(self, obj):
        try:
            self.writer.write(json.dumps(obj) + "\n")
            self.writer.flush()
        except OSError as exc:
            raise TransportError(f"socket write failed: {exc}") from exc

    def recv_line(self):
        line = self.reader.readline()
        if not line:
            raise TransportError("server closed the connection")
        return line

    def close(self):
        try:
            self.send({"op": "bye"})
        except TransportError:
            pass
        self.sock.close()


def _open_transport(endpoint):
    """endpoint: 'tcp:HOST:PORT', 'stdio:CMD ARG..' or a dict with the same
    content ({'transport': 'tcp'|'stdio', ...})."""
    if isinstance(endpoint, str):
        scheme, _, rest = endpoint.partition(":")
        if scheme == "tcp":
            host, _, port = rest.rpartition(":")
            return _TcpTransport(host or "127.0.0.1", int(port))
        if scheme == "stdio":
            return _StdioTransport(rest.split())
        raise ValueError(f"unknown endpoint {endpoint!r}")
    transport = endpoint.get("transport")
    if transport == "tcp":
        return _TcpTransport(endpoint.get("host", "127.0.0.1"), int(endpoint["port"]))
    if transport == "stdio":
        return _StdioTransport(endpoint["cmd"])
    raise ValueError(f"unknown endpoint {endpoint!r}")


class RemoteOracle(Oracle):
    """Client side of the wire protocol. One request in flight at a time;
    a failed batch aborts the run rather than re-querying, so the budget
    accounting stays truthful."""

    kind = "remote"

    def __init__(self, endpoint, dim):
        self._transport = _open_transport(endpoint)
        self._next_id = 0
        self._lock = threading.Lock()
        hello = self._roundtrip({"op": "hello"})
        if hello.get("op") != "hello" or "dim" not in hello:
            raise ProtocolError(f"bad handshake response: {hello!r}")
        if int(hello["dim"]) != int(dim):
            raise ProtocolError(
                f"server dim {hello['dim']} != expected {dim}"
            )
        super().__init__(dim, name=hello.get("name", "remote"))

    def _roundtrip(self, obj):
        self._transport.send(obj)
        line = self._transport.recv_line()
        try:
            reply = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ProtocolError(f"malformed response line: {line!r}") from exc
        if "error" in reply:
            raise ProtocolError(f"server error: {reply['error']}")
        return reply

    def classify(self, points):
        pts = _as_points(points, self.dim)
        with self._lock:
            self._next_id += 1
            req_id = self._next_id
            reply = self._roundtrip(
                {"op": "predict", "id": req_id, "x": pts.tolist()}
            )
        if reply.get("id") != req_id:
            raise ProtocolError(
                f"response id {reply.get('id')!r} != request id {req_id}"
            )
        y = reply.get("y")
        if not isinstance(y, list) or len(y) != pts.shape[0]:
            raise ProtocolError(
                f"request {req_id}: expected {pts.shape[0]} labels, got {y!r}"
            )
        labels = np.asarray(y, dtype=np.int64)
        if labels.shape[0] and not np.isin(labels, LABELS).all():
            raise ProtocolError(f"request {req_id}: labels outside {{-1,+1}}")
        return labels

    def close(self):
        self._transport.close()


def connect_remote_oracle(endpoint, dim):
    return RemoteOracle(endpoint, dim)
