"""The JSON session API: full refinement over HTTP, error codes, and
event-log replay consistency."""

import json
import threading
import urllib.error
import urllib.request

import pytest

from refinery.frontends.server import SessionStore, serve
from refinery.frontends.sessions import Session
from refinery.oracle import HeuristicOracle
from refinery.prog_lang import parse_program

from conftest import CORPUS, SQRT_SPEC

SQRT_LAWS = [
    ("root", "seq mid: x*x <= N /\\ N < y*y /\\ e > 0"),
    ("root.0", "assign x := 0, y := N + 1"),
    ("root.1", "iterate I: x*x <= N /\\ N < y*y /\\ e > 0 G: y > x + e "
               "V: y - x mode: initialised"),
    ("root.1.0", "ifelse G: (x + y) / 2 * (x + y) / 2 > N"),
    ("root.1.0.0", "assign y := (x + y) / 2"),
    ("root.1.0.1", "assign x := (x + y) / 2"),
]


@pytest.fixture()
def api(sqrt_config):
    store = SessionStore(config=sqrt_config, oracle=HeuristicOracle())
    server = serve(port=0, store=store)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    base = f"http://127.0.0.1:{server.server_address[1]}"

    def call(method, path, body=None):
        data = None
        if body is not None:
            data = json.dumps({"api": 1, **body}).encode()
        request = urllib.request.Request(base + path, data=data, method=method)
        if data is not None:
            request.add_header("Content-Type", "application/json")
        try:
            with urllib.request.urlopen(request) as resp:
                return resp.status, json.loads(resp.read().decode())
        except urllib.error.HTTPError as err:
            return err.code, json.loads(err.read().decode())

    yield call
    server.shutdown()
    server.server_close()


def node_id_at(tree_dict, path):
    for node in tree_dict["nodes"]:
        if node["path"] == path:
            return node["id"]
    raise AssertionError(f"no node at {path}")


class TestSessionFlow:
    def test_full_sqrt_session(self, api):
        status, body = api("POST", "/sessions", {"spec": SQRT_SPEC})
        assert status == 200 and body["api"] == 1
        sid = body["session"]

        for path, law in SQRT_LAWS:
            status, tree = api("GET", f"/sessions/{sid}/tree")
            node = node_id_at(tree["tree"], path)
            status, _ = api("POST", f"/sessions/{sid}/nodes/{node}/apply",
                            {"law": law})
            assert status == 200, (path, law)
            status, result = api("POST", f"/sessions/{sid}/nodes/{node}/verify")
            assert status == 200
            assert all(r["status"] == "proved" for r in result["results"])

        status, body = api("GET", f"/sessions/{sid}/program")
        assert status == 200
        assert parse_program(body["program"]) == \
            parse_program((CORPUS / "sqrt.golden").read_text())

    def test_refuted_assignment_shows_counterexample(self, api):
        _, body = api("POST", "/sessions", {"spec": SQRT_SPEC})
        sid = body["session"]
        _, tree = api("GET", f"/sessions/{sid}/tree")
        root = node_id_at(tree["tree"], "root")
        api("POST", f"/sessions/{sid}/nodes/{root}/apply",
            {"law": "seq mid: x*x <= N /\\ N < y*y /\\ e > 0"})
        _, tree = api("GET", f"/sessions/{sid}/tree")
        part1 = node_id_at(tree["tree"], "root.0")
        api("POST", f"/sessions/{sid}/nodes/{part1}/apply",
            {"law": "assign x := 0, y := N"})
        status, result = api("POST", f"/sessions/{sid}/nodes/{part1}/verify")
        assert status == 200
        refuted = result["results"][0]
        assert refuted["status"] == "refuted"
        from fractions import Fraction
        assert Fraction(refuted["counterexample"]["N"]) < 1

        # backtrack and fix
        status, _ = api("POST", f"/sessions/{sid}/nodes/{part1}/backtrack",
                        {"reason": "counterexample below one"})
        assert status == 200
        status, _ = api("POST", f"/sessions/{sid}/nodes/{part1}/apply",
                        {"law": "assign x := 0, y := N + 1"})
        assert status == 200

    def test_suggest_returns_without_applying(self, api):
        _, body = api("POST", "/sessions", {"spec": SQRT_SPEC})
        sid = body["session"]
        _, tree = api("GET", f"/sessions/{sid}/tree")
        root = node_id_at(tree["tree"], "root")
        status, body = api("POST", f"/sessions/{sid}/nodes/{root}/suggest")
        assert status == 200
        assert body["proposal"]["law"].split()[0] in (
            "skip", "seq", "assign", "ifelse", "iterate", "traverse")
        _, tree = api("GET", f"/sessions/{sid}/tree")
        assert node_id_at(tree["tree"], "root") == root
        assert tree["tree"]["nodes"][0]["law"] is None


class TestErrors:
    def test_unknown_session_404(self, api):
        status, body = api("GET", "/sessions/nope/tree")
        assert status == 404 and "error" in body

    def test_unknown_node_404(self, api):
        _, body = api("POST", "/sessions", {"spec": SQRT_SPEC})
        sid = body["session"]
        status, _ = api("POST", f"/sessions/{sid}/nodes/999/apply",
                        {"law": "skip"})
        assert status == 404

    def test_apply_on_refined_node_409(self, api):
        _, body = api("POST", "/sessions", {"spec": SQRT_SPEC})
        sid = body["session"]
        _, tree = api("GET", f"/sessions/{sid}/tree")
        root = node_id_at(tree["tree"], "root")
        api("POST", f"/sessions/{sid}/nodes/{root}/apply", {"law": "skip"})
        status, _ = api("POST", f"/sessions/{sid}/nodes/{root}/apply",
                        {"law": "skip"})
        assert status == 409

    def test_ill_typed_proposal_422_with_diagnostics(self, api):
        _, body = api("POST", "/sessions", {"spec": SQRT_SPEC})
        sid = body["session"]
        _, tree = api("GET", f"/sessions/{sid}/tree")
        root = node_id_at(tree["tree"], "root")
        status, body = api("POST", f"/sessions/{sid}/nodes/{root}/apply",
                           {"law": "assign z := 0"})
        assert status == 422
        assert "z" in body["error"]

    def test_program_before_closed_409(self, api):
        _, body = api("POST", "/sessions", {"spec": SQRT_SPEC})
        sid = body["session"]
        status, _ = api("GET", f"/sessions/{sid}/program")
        assert status == 409

    def test_bad_spec_422(self, api):
        status, body = api("POST", "/sessions", {"spec": "pre: nonsense"})
        assert status == 422

    def test_failed_mutation_leaves_session_unchanged(self, api):
        _, body = api("POST", "/sessions", {"spec": SQRT_SPEC})
        sid = body["session"]
        _, before = api("GET", f"/sessions/{sid}/tree")
        root = node_id_at(before["tree"], "root")
        api("POST", f"/sessions/{sid}/nodes/{root}/apply",
            {"law": "assign z := 0"})
        _, after = api("GET", f"/sessions/{sid}/tree")
        assert before == after


class TestReplayConsistency:
    def test_event_log_replays_to_current_tree(self, api, sqrt_config):
        _, body = api("POST", "/sessions", {"spec": SQRT_SPEC})
        sid = body["session"]
        for path, law in SQRT_LAWS[:3]:
            _, tree = api("GET", f"/sessions/{sid}/tree")
            node = node_id_at(tree["tree"], path)
            api("POST", f"/sessions/{sid}/nodes/{node}/apply", {"law": law})
            api("POST", f"/sessions/{sid}/nodes/{node}/verify")
        # one backtrack too, then reapply
        _, tree = api("GET", f"/sessions/{sid}/tree")
        part1 = node_id_at(tree["tree"], "root.0")
        api("POST", f"/sessions/{sid}/nodes/{part1}/backtrack",
            {"reason": "redo"})
        api("POST", f"/sessions/{sid}/nodes/{part1}/apply",
            {"law": "assign x := 0, y := N + 1"})
        api("POST", f"/sessions/{sid}/nodes/{part1}/verify")

        _, live = api("GET", f"/sessions/{sid}/tree")

        # rebuild from the event log alone
        session = Session(SQRT_SPEC, config=sqrt_config)
        # fetch the server-side event log via a snapshot-equivalent replay:
        # the API does not expose events, so replay through a local session
        # performing the same calls and compare tree dumps
        local = Session(SQRT_SPEC, config=sqrt_config)
        for path, law in SQRT_LAWS[:3]:
            node = local.tree.node_at(path)
            local.apply(node.id, law)
            local.verify(node.id)
        part1_local = local.tree.node_at("root.0")
        local.backtrack(part1_local.id, "redo")
        local.apply(part1_local.id, "assign x := 0, y := N + 1")
        local.verify(part1_local.id)

        replayed = Session.replay(local.snapshot(), config=sqrt_config)
        assert replayed.tree.to_dict() == local.tree.to_dict()
        assert replayed.tree.to_dict() == live["tree"]
