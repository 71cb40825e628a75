"""In-process HTTP stub speaking the generation wire protocol.

Tests plug in a ``generate`` callable taking the request payload (a dict)
and returning ``(status_code, body_dict)``. The stub handles /generate and
/health on a private port and records every payload it saw.
"""

from __future__ import annotations

import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer


def echo_last_line(payload: dict) -> tuple[int, dict]:
    """Default behavior: repeat the last context sentence."""
    context = payload.get("context")
    if not isinstance(context, str) or not context:
        return 400, {"error": "missing context"}
    return 200, {"generated": context.splitlines()[-1]}


class WireStub:
    """Context manager running the stub on 127.0.0.1 with an ephemeral port."""

    def __init__(self, generate=echo_last_line, model_name: str = "stub-model"):
        self.generate = generate
        self.model_name = model_name
        self.requests: list[dict] = []
        self._server: ThreadingHTTPServer | None = None
        self._thread: threading.Thread | None = None

    @property
    def base_url(self) -> str:
        assert self._server is not None
        host, port = self._server.server_address[:2]
        return f"http://{host}:{port}"

    def __enter__(self) -> "WireStub":
        stub = self

        class Handler(BaseHTTPRequestHandler):
            def log_message(self, *args):
                pass

            def _send(self, status: int, body: dict):
                data = json.dumps(body).encode("utf-8")
                self.send_response(status)
                self.send_header("Content-Type", "application/json")
                self.send_header("Content-Length", str(len(data)))
                self.end_headers()
                self.wfile.write(data)

            def do_GET(self):
                if self.path == "/health":
                    self._send(200, {"status": "ok", "model": stub.model_name})
                else:
                    self._send(404, {"error": f"no route {self.path}"})

            def do_POST(self):
                if self.path != "/generate":
                    self._send(404, {"error": f"no route {self.path}"})
                    return
                length = int(self.headers.get("Content-Length", "0"))
                raw = self.rfile.read(length)
                try:
                    payload = json.loads(raw.decode("utf-8"))
                except (UnicodeDecodeError, json.JSONDecodeError):
                    self._send(400, {"error": "body is not JSON"})
                    return
                if not isinstance(payload, dict):
                    self._send(400, {"error": "body must be a JSON object"})
                    return
                stub.requests.append(payload)
                status, body = stub.generate(payload)
                self._send(status, body)

        self._server = ThreadingHTTPServer(("127.0.0.1", 0), Handler)
        self._thread = threading.Thread(target=self._server.serve_forever, daemon=True)
        self._thread.start()
        return self

    def __exit__(self, *exc):
        assert self._server is not None and self._thread is not None
        self._server.shutdown()
        self._server.server_close()
        self._thread.join(timeout=5)
        return False
