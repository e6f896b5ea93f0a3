"""HTTP+JSON API over the vitals service.

Routes:
  POST /signals/sync            body {subject_id, chunks, ibi?, cortisol?}
  GET  /stress/<subject>
  GET  /bp/<subject>
  POST /tags/event              body {kind, index}
  POST /tags/register           body {kind, index, name}
  GET  /location/<identity>     optional ?tolerance_s=
  POST /train/stress            body {seed?}
  POST /train/bp                body {seed?}
  GET  /health

Validation failures map to 400, unknown identities/subjects without data to
404, missing model artifacts and concurrent training to 409. The location
response body is exactly the canonical location message.
"""

from __future__ import annotations

import json
import logging
import re
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from urllib.parse import parse_qs, urlsplit

from ..errors import (
    DegenerateTraining,
    HomevitalsError,
    InputError,
    NotFound,
    NotReady,
    NoWindow,
    RegistrationError,
    RejectedEvent,
)
from ..location import TagKind, format_message
from .config import ServiceConfig
from .pipeline import VitalsService
from .store import JsonlStore

log = logging.getLogger(__name__)

_STRESS = re.compile(r"^/stress/([^/]+)$")
_BP = re.compile(r"^/bp/([^/]+)$")
_LOCATION = re.compile(r"^/location/([^/]+)$")


class _Handler(BaseHTTPRequestHandler):
    service: VitalsService  # set on the server class

    protocol_version = "HTTP/1.1"

    def log_message(self, fmt, *args):  # route through logging, not stderr
        log.debug("%s - %s", self.address_string(), fmt % args)

    # -- plumbing -----------------------------------------------------------

    def _read_json(self) -> dict:
        length = int(self.headers.get("Content-Length", 0))
        if length == 0:
            return {}
        raw = self.rfile.read(length)
        try:
            return json.loads(raw)
        except json.JSONDecodeError as exc:
            raise InputError(f"request body is not valid JSON: {exc}") from exc

    def _send(self, status: int, body: dict | str) -> None:
        data = body.encode() if isinstance(body, str) else json.dumps(body).encode()
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(data)))
        self.end_headers()
        self.wfile.write(data)

    def _dispatch(self, method: str) -> None:
        service = self.server.service  # type: ignore[attr-defined]
        try:
            status, body = self._route(method, service)
        except (RejectedEvent, RegistrationError, InputError) as exc:
            status, body = 400, {"error": str(exc)}
        except (NotFound, NoWindow) as exc:
            status, body = 404, {"error": str(exc)}
        except (NotReady, DegenerateTraining) as exc:
            status, body = 409, {"error": str(exc)}
        except HomevitalsError as exc:
            status, body = 400, {"error": str(exc)}
        except Exception as exc:  # pragma: no cover - defensive
            log.exception("unhandled error")
            status, body = 500, {"error": f"internal error: {exc}"}
        self._send(status, body)

    def _route(self, method: str, service: VitalsService) -> tuple[int, dict | str]:
        parts = urlsplit(self.path)
        path = parts.path
        query = parse_qs(parts.query)
        if method == "GET" and path == "/health":
            return 200, {"status": "ok", "records": len(service.store)}
        if method == "POST" and path == "/signals/sync":
            return 200, service.sync_signals(self._read_json())
        if method == "POST" and path == "/tags/event":
            body = self._read_json()
            if "kind" not in body or "index" not in body:
                raise InputError("tags/event needs 'kind' and 'index'")
            return 200, service.ingest_tag_event(
                body["kind"], int(body["index"]), self.client_address[0]
            )
        if method == "POST" and path == "/tags/register":
            body = self._read_json()
            kind = TagKind(body.get("kind", ""))
            if kind is TagKind.USER:
                service.tag_log.table.register_user(int(body["index"]), body["name"])
            else:
                service.tag_log.table.register_location(int(body["index"]), body["name"])
            return 200, {"registered": True}
        if method == "POST" and path == "/train/stress":
            return 200, service.train_stress(self._read_json().get("seed"))
        if method == "POST" and path == "/train/bp":
            return 200, service.train_bp(self._read_json().get("seed"))
        if method == "GET":
            match = _STRESS.match(path)
            if match:
                return 200, service.query_stress(match.group(1))
            match = _BP.match(path)
            if match:
                return 200, service.query_bp(match.group(1))
            match = _LOCATION.match(path)
            if match:
                tolerance = None
                if "tolerance_s" in query:
                    tolerance = float(query["tolerance_s"][0])
                result = service.locate(match.group(1), tolerance)
                return 200, format_message(result)
        raise NotFound(f"no route for {method} {path}")

    def do_GET(self) -> None:
        self._dispatch("GET")

    def do_POST(self) -> None:
        self._dispatch("POST")


class VitalsHttpServer:
    """Threaded HTTP server wrapper owning the store and service."""

    def __init__(self, config: ServiceConfig):
        self.config = config
        self.store = JsonlStore(config.storage_path)
        self.service = VitalsService(config, self.store)
        self.httpd = ThreadingHTTPServer((config.listen_host, config.listen_port), _Handler)
        self.httpd.service = self.service  # type: ignore[attr-defined]

    @property
    def port(self) -> int:
        return self.httpd.server_address[1]

    def serve_forever(self) -> None:
        log.info("serving on %s:%d", self.config.listen_host, self.port)
        self.httpd.serve_forever()

    def serve_in_thread(self) -> threading.Thread:
        thread = threading.Thread(target=self.httpd.serve_forever, daemon=True)
        thread.start()
        return thread

    def shutdown(self) -> None:
        self.httpd.shutdown()
        self.httpd.server_close()
        self.store.close()
