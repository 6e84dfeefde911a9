"""JSON-over-HTTP session API.

Endpoints (bodies are JSON with an ``api: 1`` field):

* ``POST /sessions`` — spec text, returns the session id
* ``GET /sessions/{id}/tree`` — full tree with statuses and obligations
* ``POST /sessions/{id}/nodes/{n}/apply`` — a law in script syntax
* ``POST /sessions/{id}/nodes/{n}/verify``
* ``POST /sessions/{id}/nodes/{n}/backtrack``
* ``POST /sessions/{id}/nodes/{n}/suggest`` — one oracle proposal, not applied
* ``GET /sessions/{id}/program`` — the extracted program once closed

Sessions are in-memory; per-session mutations are serialized, reads may
run concurrently.  With a UI directory configured, anything outside
``/sessions`` is served statically.
"""

from __future__ import annotations

import json
import re
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

from ..oracle import Oracle, OracleError
from ..spec_lang import SpecError
from ..verifier import VerifyConfig
from .sessions import Session, SessionError

API_VERSION = 1


class SessionStore:
    def __init__(self, config: VerifyConfig | None = None,
                 oracle: Oracle | None = None, library=None,
                 snapshot_dir: str | None = None):
        self.config = config or VerifyConfig()
        self.oracle = oracle
        self.library = library
        self.snapshot_dir = Path(snapshot_dir) if snapshot_dir else None
        self.sessions: dict[str, Session] = {}
        self.lock = threading.Lock()

    def create(self, spec_text: str) -> Session:
        session = Session(spec_text, config=self.config, oracle=self.oracle,
                          library=self.library)
        with self.lock:
            self.sessions[session.id] = session
        return session

    def get(self, session_id: str) -> Session:
        with self.lock:
            session = self.sessions.get(session_id)
        if session is None:
            raise SessionError(f"no session {session_id!r}", code=404)
        return session

    def maybe_snapshot(self, session: Session):
        if self.snapshot_dir is None:
            return
        self.snapshot_dir.mkdir(parents=True, exist_ok=True)
        path = self.snapshot_dir / f"{session.id}.json"
        path.write_text(json.dumps(session.snapshot(), indent=1))


_ROUTES = [
    ("POST", re.compile(r"^/sessions$"), "create_session"),
    ("GET", re.compile(r"^/sessions/([^/]+)/tree$"), "get_tree"),
    ("GET", re.compile(r"^/sessions/([^/]+)/program$"), "get_program"),
    ("POST", re.compile(r"^/sessions/([^/]+)/nodes/(\d+)/apply$"), "apply"),
    ("POST", re.compile(r"^/sessions/([^/]+)/nodes/(\d+)/verify$"), "verify"),
    ("POST", re.compile(r"^/sessions/([^/]+)/nodes/(\d+)/backtrack$"), "backtrack"),
    ("POST", re.compile(r"^/sessions/([^/]+)/nodes/(\d+)/suggest$"), "suggest"),
]

_CONTENT_TYPES = {".html": "text/html", ".js": "text/javascript",
                  ".mjs": "text/javascript", ".css": "text/css",
                  ".json": "application/json", ".map": "application/json",
                  ".svg": "image/svg+xml", ".ico": "image/x-icon"}


def make_handler(store: SessionStore, ui_dir: str | None = None):
    ui_root = Path(ui_dir).resolve() if ui_dir else None

    class Handler(BaseHTTPRequestHandler):
        protocol_version = "HTTP/1.1"

        def log_message(self, fmt, *args):
            pass

        # -- plumbing -----------------------------------------------------

        def reply(self, code: int, payload: dict):
            body = json.dumps({"api": API_VERSION, **payload}).encode()
            self.send_response(code)
            self.send_header("Content-Type", "application/json")
            self.send_header("Content-Length", str(len(body)))
            self.end_headers()
            self.wfile.write(body)

        def reply_error(self, code: int, message: str):
            self.reply(code, {"error": message})

        def read_body(self) -> dict:
            length = int(self.headers.get("Content-Length") or 0)
            if length == 0:
                return {}
            raw = self.rfile.read(length)
            try:
                body = json.loads(raw.decode())
            except json.JSONDecodeError as exc:
                raise SessionError(f"bad JSON body: {exc}", code=400) from exc
            if not isinstance(body, dict):
                raise SessionError("body must be a JSON object", code=400)
            if "api" in body and body["api"] != API_VERSION:
                raise SessionError(f"unsupported api version {body['api']!r}",
                                   code=400)
            return body

        def dispatch(self, method: str):
            for want, pattern, name in _ROUTES:
                if want != method:
                    continue
                match = pattern.match(self.path.split("?", 1)[0])
                if match:
                    try:
                        getattr(self, name)(*match.groups())
                    except SessionError as exc:
                        self.reply_error(exc.code, str(exc))
                    except (SpecError, OracleError) as exc:
                        self.reply_error(422, str(exc))
                    except Exception as exc:  # noqa: BLE001 — surface, don't hang
                        self.reply_error(500, f"internal error: {exc}")
                    return True
            return False

        def do_POST(self):
            if not self.dispatch("POST"):
                self.reply_error(404, f"no route for POST {self.path}")

        def do_GET(self):
            if self.dispatch("GET"):
                return
            if ui_root is not None and self.serve_static():
                return
            self.reply_error(404, f"no route for GET {self.path}")

        # -- routes -------------------------------------------------------

        def create_session(self):
            body = self.read_body()
            spec_text = body.get("spec")
            if not spec_text:
                raise SessionError("body needs a 'spec' field", code=400)
            try:
                session = store.create(spec_text)
            except SpecError as exc:
                raise SessionError(f"bad spec: {exc}", code=422) from exc
            store.maybe_snapshot(session)
            self.reply(200, {"session": session.id})

        def get_tree(self, session_id):
            session = store.get(session_id)
            self.reply(200, {"tree": session.tree.to_dict()})

        def get_program(self, session_id):
            session = store.get(session_id)
            with session.lock:
                program = session.program()
            self.reply(200, {"program": program})

        def apply(self, session_id, node_id):
            session = store.get(session_id)
            body = self.read_body()
            law = body.get("law")
            if not law:
                raise SessionError("body needs a 'law' field", code=400)
            with session.lock:
                result = session.apply(int(node_id), law)
                store.maybe_snapshot(session)
            self.reply(200, result)

        def verify(self, session_id, node_id):
            session = store.get(session_id)
            with session.lock:
                results = session.verify(int(node_id))
                store.maybe_snapshot(session)
            self.reply(200, {"results": results,
                             "closed": session.tree.is_closed()})

        def backtrack(self, session_id, node_id):
            session = store.get(session_id)
            body = self.read_body()
            with session.lock:
                result = session.backtrack(int(node_id),
                                           body.get("reason", "user request"))
                store.maybe_snapshot(session)
            self.reply(200, result)

        def suggest(self, session_id, node_id):
            session = store.get(session_id)
            with session.lock:
                proposal = session.suggest(int(node_id))
            self.reply(200, {"proposal": proposal})

        # -- static UI -------------------------------------------------------

        def serve_static(self) -> bool:
            rel = self.path.split("?", 1)[0].lstrip("/") or "index.html"
            target = (ui_root / rel).resolve()
            if not str(target).startswith(str(ui_root)) or not target.is_file():
                return False
            body = target.read_bytes()
            self.send_response(200)
            ctype = _CONTENT_TYPES.get(target.suffix, "application/octet-stream")
            self.send_header("Content-Type", ctype)
            self.send_header("Content-Length", str(len(body)))
            self.end_headers()
            self.wfile.write(body)
            return True

    return Handler


def serve(port: int = 8787, host: str = "127.0.0.1",
          store: SessionStore | None = None,
          ui_dir: str | None = None) -> ThreadingHTTPServer:
    """Build the HTTP server (callers run serve_forever)."""
    store = store or SessionStore()
    handler = make_handler(store, ui_dir)
    server = ThreadingHTTPServer((host, port), handler)
    server.store = store  # handle for tests and callers
    return server
