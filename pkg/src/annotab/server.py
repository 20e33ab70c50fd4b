"""Loopback HTTP host for the browser UI.

Serves a static UI bundle plus a small API over the annotation engine:

    GET  /api/corpus   current corpus as tab-separated text
    GET  /api/tasks    task configuration as JSON
    POST /api/message  one SessionMessage, dispatched to the session

Requests are handled sequentially against a single server-side session, so
the single-writer session contract holds.  Binds 127.0.0.1 only; nothing
ever leaves the machine.
"""

import json
import mimetypes
from http.server import BaseHTTPRequestHandler, HTTPServer
from pathlib import Path

from .conll import serialize_corpus
from .protocol import handle_message
from .session import Session
from .tasks import serialize_config

_FALLBACK_INDEX = b"""<!doctype html>
<html><head><meta charset="utf-8"><title>annotab</title></head>
<body>
<h1>annotab session host</h1>
<p>No UI bundle is configured (start with <code>--ui-dir</code> to serve one).</p>
<p>API: <code>GET /api/corpus</code>, <code>GET /api/tasks</code>,
<code>POST /api/message</code>.</p>
</body></html>
"""


class SessionRequestHandler(BaseHTTPRequestHandler):
    server_version = "annotab"

    def _send(self, status: int, content_type: str, body: bytes):
        self.send_response(status)
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def _send_json(self, payload, status: int = 200):
        self._send(status, "application/json; charset=utf-8", json.dumps(payload).encode("utf-8"))

    def log_message(self, format, *args):  # quiet by default
        if self.server.verbose:
            super().log_message(format, *args)

    def do_GET(self):
        path = self.path.split("?", 1)[0]
        if path == "/api/corpus":
            text = serialize_corpus(self.server.session.corpus)
            self._send(200, "text/plain; charset=utf-8", text.encode("utf-8"))
        elif path == "/api/tasks":
            self._send(
                200,
                "application/json; charset=utf-8",
                serialize_config(self.server.session.tasks).encode("utf-8"),
            )
        else:
            self._send_static(path)

    def do_POST(self):
        if self.path.split("?", 1)[0] != "/api/message":
            self._send_json({"ok": False, "error": {"code": "not_found", "message": self.path}}, 404)
            return
        length = int(self.headers.get("Content-Length", 0))
        try:
            message = json.loads(self.rfile.read(length).decode("utf-8"))
        except (json.JSONDecodeError, UnicodeDecodeError) as exc:
            self._send_json(
                {"ok": False, "error": {"code": "bad_message", "message": str(exc)}}, 400
            )
            return
        self._send_json(handle_message(self.server.session, message))

    def _send_static(self, path: str):
        ui_dir = self.server.ui_dir
        if ui_dir is None:
            if path in ("/", "/index.html"):
                self._send(200, "text/html; charset=utf-8", _FALLBACK_INDEX)
            else:
                self._send(404, "text/plain; charset=utf-8", b"not found\n")
            return
        relative = path.lstrip("/") or "index.html"
        target = (ui_dir / relative).resolve()
        if not str(target).startswith(str(ui_dir.resolve())) or not target.is_file():
            self._send(404, "text/plain; charset=utf-8", b"not found\n")
            return
        content_type = mimetypes.guess_type(target.name)[0] or "application/octet-stream"
        self._send(200, content_type, target.read_bytes())


class SessionServer(HTTPServer):
    """HTTPServer carrying the session state shared by all handlers."""

    def __init__(self, session: Session, ui_dir: Path | None = None,
                 host: str = "127.0.0.1", port: int = 0, verbose: bool = False):
        super().__init__((host, port), SessionRequestHandler)
        self.session = session
        self.ui_dir = Path(ui_dir) if ui_dir is not None else None
        self.verbose = verbose

    @property
    def port(self) -> int:
        return self.server_address[1]


def serve(session: Session, ui_dir: Path | None, port: int, verbose: bool = True) -> None:
    server = SessionServer(session, ui_dir, port=port, verbose=verbose)
    print(f"serving on http://127.0.0.1:{server.port}/ (Ctrl-C to stop)")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
