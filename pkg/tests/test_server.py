"""Loopback session host."""

import json
import threading
import urllib.request

import pytest

from annotab import open_session
from annotab.server import SessionServer
from support import sample_corpus, sample_taskset, sample_text


@pytest.fixture()
def server():
    session = open_session(sample_corpus(), sample_taskset())
    srv = SessionServer(session, ui_dir=None, port=0)
    thread = threading.Thread(target=srv.serve_forever, daemon=True)
    thread.start()
    yield srv
    srv.shutdown()
    srv.server_close()
    thread.join(timeout=5)


def _get(server, path):
    with urllib.request.urlopen(f"http://127.0.0.1:{server.port}{path}") as response:
        return response.status, response.read().decode("utf-8")


def _post(server, path, payload):
    request = urllib.request.Request(
        f"http://127.0.0.1:{server.port}{path}",
        data=json.dumps(payload).encode("utf-8"),
        headers={"Content-Type": "application/json"},
    )
    with urllib.request.urlopen(request) as response:
        return response.status, json.loads(response.read().decode("utf-8"))


def test_corpus_endpoint_serves_current_state(server):
    status, body = _get(server, "/api/corpus")
    assert status == 200
    assert body == sample_text()
    _post(server, "/api/message",
          {"op": "annotate_span", "args": {"utt_index": 1, "start": 0, "end": 1,
                                           "task_id": 0, "label": "PER"}})
    _, body = _get(server, "/api/corpus")
    assert "B-PER" in body


def test_tasks_endpoint(server):
    status, body = _get(server, "/api/tasks")
    assert status == 200
    tasks = json.loads(body)
    assert tasks[0]["title"] == "NER"


def test_message_endpoint_dispatches(server):
    status, reply = _post(server, "/api/message", {"op": "get_state"})
    assert status == 200
    assert reply["ok"] is True
    assert reply["result"]["utterance_count"] == 2
    _, reply = _post(server, "/api/message", {"op": "nope"})
    assert reply["error"]["code"] == "unknown_op"


def test_fallback_index_page(server):
    status, body = _get(server, "/")
    assert status == 200
    assert "annotab" in body


def test_binds_loopback_only(server):
    assert server.server_address[0] == "127.0.0.1"
