"""Wire-protocol server: newline-delimited JSON over stdio or TCP.

    {"op":"hello"}                        -> {"op":"hello","dim":d,"name":kind}
    {"op":"predict","id":k,"x":[[..],..]} -> {"id":k,"y":[-1|1,..]}
    {"op":"bye"}                          -> server exits

A malformed request answers {"id":..,"error":".."} and the loop continues;
only "bye" or EOF stops the server. One response line per request line,
flushed immediately, so subprocess pipelining works.
"""

import json
import socket
import sys

from .training import ServedTeacher


def _handle_line(teacher, line):
    """Returns (response dict or None, keep_running)."""
    try:
        msg = json.loads(line)
    except json.JSONDecodeError as exc:
        return {"id": None, "error": f"malformed request: {exc}"}, True
    if not isinstance(msg, dict):
        return {"id": None, "error": "request must be a JSON object"}, True
    op = msg.get("op")
    if op == "hello":
        return {"op": "hello", "dim": teacher.dim, "name": teacher.kind}, True
    if op == "bye":
        return None, False
    if op == "predict":
        req_id = msg.get("id")
        try:
            labels = teacher.predict(msg["x"])
        except (KeyError, TypeError, ValueError) as exc:
            return {"id": req_id, "error": str(exc)}, True
        return {"id": req_id, "y": [int(v) for v in labels]}, True
    return {"id": msg.get("id"), "error": f"unknown op {op!r}"}, True


def _serve_stream(teacher, reader, writer):
    for line in reader:
        if not line.strip():
            continue
        response, keep_running = _handle_line(teacher, line)
        if response is not None:
            writer.write(json.dumps(response) + "\n")
            writer.flush()
        if not keep_running:
            return


def serve_oracle(model_path, transport="stdio"):
    """Blocks until a bye message (stdio) or forever (tcp, one client at a
    time). transport: 'stdio' or 'tcp:PORT' (port 0 picks a free one)."""
    teacher = ServedTeacher(model_path)
    if transport == "stdio":
        _serve_stream(teacher, sys.stdin, sys.stdout)
        return
    scheme, _, port = transport.partition(":")
    if scheme != "tcp" or not port:
        raise ValueError(f"transport must be stdio or tcp:PORT, got {transport!r}")
    sock = socket.socket()
    sock.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
    sock.bind(("127.0.0.1", int(port)))
    sock.listen(1)
    print(f"listening on {sock.getsockname()[1]}", file=sys.stderr, flush=True)
    try:
        while True:
            conn, _ = sock.accept()
            with conn:
                reader = conn.makefile("r", encoding="utf-8")
                writer = conn.makefile("w", encoding="utf-8")
                _serve_stream(teacher, reader, writer)
    finally:
        sock.close()
