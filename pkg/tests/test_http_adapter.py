import json
import socket
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import pytest

from dossier.collect.adapters import (
    BadStatusError,
    MissingCredentialError,
    NetworkError,
    ResponseMappingError,
    fetch_http,
)
from dossier.collect.executor import execute_stack, make_fetcher
from dossier.collect.corpus import Corpus
from dossier.collect.records import OutcomeStatus
from dossier.inputs import InputKind, QueryInput
from dossier.routing import Backend, CollectorDescriptor, HttpCollectorConfig, accepts

QUERY = QueryInput(InputKind.EMAIL, "Probe@X.io", "probe@x.io")


class StubHandler(BaseHTTPRequestHandler):
    def log_message(self, *args):
        pass  # keep test output clean

    def _reply(self, payload, status=200, raw=None):
        body = raw if raw is not None else json.dumps(payload).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def do_GET(self):
        if self.path.startswith("/person"):
            self._reply(
                {
                    "name": "Ada Lovelace",
                    "emails": ["ada@calc.example", "countess@calc.example"],
                    "details": {"city": "London"},
                    "jobs": [{"title": "mathematician"}],
                    "mixed": ["ok", {"bad": 1}],
                    "height": 1.69,
                    "verified": True,
                }
            )
        elif self.path.startswith("/fail"):
            self._reply({"error": "nope"}, status=500)
        elif self.path.startswith("/notjson"):
            self._reply(None, raw=b"this is not json")
        elif self.path.startswith("/auth"):
            self._reply({"granted": self.headers.get("Authorization", "")})
        else:
            self._reply({}, status=404)

    def do_POST(self):
        self._reply({"name": "Posted Person"})


@pytest.fixture(scope="module")
def stub_server():
    server = ThreadingHTTPServer(("127.0.0.1", 0), StubHandler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    yield f"http://127.0.0.1:{server.server_port}"
    server.shutdown()


@pytest.fixture()
def closed_port() -> int:
    probe = socket.socket()
    probe.bind(("127.0.0.1", 0))
    port = probe.getsockname()[1]
    probe.close()
    return port


def config(base: str, **kwargs) -> HttpCollectorConfig:
    return HttpCollectorConfig(base=base, **kwargs)


class TestFetchHttp:
    def test_maps_scalars_lists_and_nested_paths(self, stub_server):
        cfg = config(
            stub_server,
            query_template="/person?q={value}",
            response_mapping={
                "name": "full_name",
                "emails": "email",
                "details.city": "location",
                "jobs.0.title": "job_title",
                "height": "height_m",
                "missing.path": "alias",
            },
        )
        records = fetch_http("svc", cfg, QUERY)
        assert [(r.attribute, r.value) for r in records] == [
            ("email", "ada@calc.example"),
            ("email", "countess@calc.example"),
            ("full_name", "Ada Lovelace"),
            ("height_m", "1.69"),
            ("job_title", "mathematician"),
            ("location", "London"),
        ]
        url = f"{stub_server}/person?q=probe%40x.io"
        assert all(r.provenance == url for r in records)
        assert all(r.confidence == 1.0 for r in records)

    def test_empty_mapping_yields_no_records(self, stub_server):
        cfg = config(stub_server, query_template="/person?q={value}")
        assert fetch_http("svc", cfg, QUERY, timeout_ms=2000) == []

    def test_url_encoding_in_provenance(self, stub_server):
        cfg = config(
            stub_server,
            query_template="/person?q={value}&kind={kind}",
            response_mapping={"name": "full_name"},
        )
        query = QueryInput(InputKind.KEYWORD, "a b+c", "a b+c")
        (record,) = fetch_http("svc", cfg, query)
        assert record.provenance.endswith("/person?q=a%20b%2Bc&kind=keyword")

    def test_non_scalar_mapping_target_rejected(self, stub_server):
        cfg = config(
            stub_server,
            query_template="/person",
            response_mapping={"details": "location"},
        )
        with pytest.raises(ResponseMappingError):
            fetch_http("svc", cfg, QUERY)
        cfg = config(
            stub_server,
            query_template="/person",
            response_mapping={"mixed": "interest"},
        )
        with pytest.raises(ResponseMappingError):
            fetch_http("svc", cfg, QUERY)

    def test_boolean_leaf_renders_lowercase(self, stub_server):
        cfg = config(
            stub_server,
            query_template="/person",
            response_mapping={"verified": "habit"},
        )
        (record,) = fetch_http("svc", cfg, QUERY)
        assert record.value == "true"

    def test_non_2xx_status(self, stub_server):
        cfg = config(stub_server, query_template="/fail")
        with pytest.raises(BadStatusError) as exc_info:
            fetch_http("svc", cfg, QUERY)
        assert exc_info.value.status_code == 500
        assert "HTTP 500" in str(exc_info.value)

    def test_non_json_body(self, stub_server):
        cfg = config(stub_server, query_template="/notjson")
        with pytest.raises(ResponseMappingError):
            fetch_http("svc", cfg, QUERY)

    def test_connection_refused_is_deterministic_network_error(self, closed_port):
        base = f"http://127.0.0.1:{closed_port}"
        cfg = config(base, query_template="/x")
        with pytest.raises(NetworkError) as exc_info:
            fetch_http("svc", cfg, QUERY, timeout_ms=2000)
        assert str(exc_info.value) == f"GET {base}/x failed: ConnectionError"

    def test_missing_credential_blocks_request(self, closed_port, monkeypatch):
        monkeypatch.delenv("SVC_TOKEN", raising=False)
        # pointing at a closed port proves no request is attempted: the
        # credential check must fire first
        cfg = config(
            f"http://127.0.0.1:{closed_port}",
            query_template="/x",
            credential_env="SVC_TOKEN",
        )
        with pytest.raises(MissingCredentialError):
            fetch_http("svc", cfg, QUERY)

    def test_bearer_credential_sent(self, stub_server, monkeypatch):
        monkeypatch.setenv("SVC_TOKEN", "sekrit")
        cfg = config(
            stub_server,
            query_template="/auth",
            response_mapping={"granted": "breach"},
            credential_env="SVC_TOKEN",
        )
        (record,) = fetch_http("svc", cfg, QUERY)
        assert record.value == "Bearer sekrit"

    def test_post_method(self, stub_server):
        cfg = config(
            stub_server,
            method="POST",
            query_template="/submit",
            response_mapping={"name": "full_name"},
        )
        (record,) = fetch_http("svc", cfg, QUERY)
        assert record.value == "Posted Person"


def test_executor_absorbs_http_failures(closed_port):
    dead = CollectorDescriptor(
        name="deadsvc",
        accepts=accepts("email"),
        backend=Backend.HTTP,
        http=config(f"http://127.0.0.1:{closed_port}", query_template="/q"),
    )
    fetch = make_fetcher(Corpus([]), timeout_ms=2000)
    (outcome,) = execute_stack(QUERY, [dead], fetch)
    assert outcome.status is OutcomeStatus.ERROR
    assert outcome.error_detail.startswith("NetworkError:")
