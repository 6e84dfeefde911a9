"""Oracles: the prompt builder, proposal parsing, heuristic rules,
scripted playback, and the remote client against a local HTTP stub."""

import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import pytest

from refinery.oracle import (
    HeuristicOracle,
    IllTypedProposal,
    NoProposalFound,
    OracleContext,
    OracleExhausted,
    RemoteOracle,
    ScriptedOracle,
    build_prompt,
    parse_proposal,
)
from refinery.refinement import (
    AssignLaw,
    Failure,
    Iterate,
    SeqLaw,
    Skip,
    Traverse,
    parse_spec_file,
)

from conftest import SQRT_SPEC


@pytest.fixture()
def sqrt_ctx(sqrt_spec):
    return OracleContext(stmt=sqrt_spec.statement, path="root", retries_left=3)


class TestBuildPrompt:
    def test_contains_formulas_and_law_menu(self, sqrt_ctx):
        prompt = build_prompt(sqrt_ctx)
        assert "pre: N >= 0 /\\ e > 0" in prompt
        assert "post: x*x <= N /\\ N < y*y /\\ y <= x+e" in prompt
        for law in ("skip", "sequence", "assignment", "alternation",
                    "iteration", "traverse"):
            assert f"- {law}:" in prompt

    def test_no_failure_section_when_history_empty(self, sqrt_ctx):
        assert "Previous failures" not in build_prompt(sqrt_ctx)

    def test_counterexample_rendered_after_refutation(self, sqrt_spec):
        ctx = OracleContext(
            stmt=sqrt_spec.statement, path="root.0",
            failures=(Failure("assign x := 0, y := N",
                              "obligation assign refuted; counterexample: "
                              "N := 0, e := 1"),),
            retries_left=2)
        prompt = build_prompt(ctx)
        assert "Previous failures" in prompt
        assert "assign x := 0, y := N" in prompt
        assert "N := 0" in prompt

    def test_pure_function_of_context(self, sqrt_ctx):
        assert build_prompt(sqrt_ctx) == build_prompt(sqrt_ctx)

    def test_library_hints_section(self, sqrt_spec):
        ctx = OracleContext(stmt=sqrt_spec.statement,
                            hints=("sqrt_approx(x: float, y: float)",),
                            retries_left=1)
        assert "sqrt_approx(x: float, y: float)" in build_prompt(ctx)


class TestParseProposal:
    def test_assign_line(self, sqrt_ctx):
        got = parse_proposal("assign x := 0, y := N + 1", sqrt_ctx)
        assert isinstance(got.law, AssignLaw)

    def test_empty_reply(self, sqrt_ctx):
        with pytest.raises(NoProposalFound):
            parse_proposal("", sqrt_ctx)

    def test_ill_typed_target(self, sqrt_ctx):
        with pytest.raises(IllTypedProposal) as err:
            parse_proposal("assign z := 0", sqrt_ctx)
        assert "z" in err.value.details

    def test_first_wellformed_line_wins(self, sqrt_ctx):
        reply = ("I will split the problem.\n"
                 "```\n"
                 "seq mid: x*x <= N /\\ N < y*y\n"
                 "```\n"
                 "assign x := 0, y := N + 1\n")
        got = parse_proposal(reply, sqrt_ctx)
        assert isinstance(got.law, SeqLaw)
        assert "split the problem" in got.rationale


class TestScriptedOracle:
    def test_consumes_in_order(self, sqrt_ctx):
        oracle = ScriptedOracle("skip\nseq mid: x*x <= N\n")
        assert isinstance(oracle.propose(sqrt_ctx).law, Skip)
        assert isinstance(oracle.propose(sqrt_ctx).law, SeqLaw)
        with pytest.raises(OracleExhausted):
            oracle.propose(sqrt_ctx)

    def test_path_keyed_lines_take_precedence(self, sqrt_spec):
        oracle = ScriptedOracle("@root.1: skip\nseq mid: x*x <= N\n")
        at_child = OracleContext(stmt=sqrt_spec.statement, path="root.1")
        at_root = OracleContext(stmt=sqrt_spec.statement, path="root")
        assert isinstance(oracle.propose(at_child).law, Skip)
        assert isinstance(oracle.propose(at_root).law, SeqLaw)

    def test_comments_and_blanks_skipped(self, sqrt_ctx):
        oracle = ScriptedOracle("# header\n\nskip\n")
        assert isinstance(oracle.propose(sqrt_ctx).law, Skip)


class TestHeuristicOracle:
    def test_rule1_reflexive_skip(self):
        spec = parse_spec_file("name: t\nvariants: x: int\n"
                               "pre: x > 0\npost: x > 0\n")
        ctx = OracleContext(stmt=spec.statement)
        assert isinstance(HeuristicOracle().propose(ctx).law, Skip)

    def test_rule2_iteration_from_negated_guard(self, sqrt_spec):
        # [mid, mid /\ y <= x+e] has the pre /\ not-guard shape
        stmt = sqrt_spec.statement
        from refinery.refinement import SpecStatement
        from refinery.spec_lang import parse_spec_expr
        mid = parse_spec_expr("x*x <= N /\\ N < y*y /\\ e > 0", stmt.env)
        part2 = SpecStatement(stmt.frame, stmt.constants, mid, stmt.post)
        # post = mid-conjuncts + final relation? mid has e > 0, post does not,
        # so craft the exact shape instead
        post = parse_spec_expr(
            "x*x <= N /\\ N < y*y /\\ e > 0 /\\ y <= x+e", stmt.env)
        part2 = SpecStatement(stmt.frame, stmt.constants, mid, post)
        law = HeuristicOracle().propose(OracleContext(stmt=part2)).law
        assert isinstance(law, Iterate)
        assert law.mode == "flexible"  # float variants present

    def test_rule3_traverse_from_ranged_forall(self, corpus_dir):
        spec = parse_spec_file((corpus_dir / "fill.spec").read_text())
        law = HeuristicOracle().propose(OracleContext(stmt=spec.statement)).law
        assert isinstance(law, Traverse)
        assert law.array == "s" and law.index == "k"

    def test_rule4_syntactic_assignment(self):
        spec = parse_spec_file("name: t\nconstants: K: int\nvariants: r: int\n"
                               "pre: true\npost: r = K + 1\n")
        law = HeuristicOracle().propose(OracleContext(stmt=spec.statement)).law
        assert isinstance(law, AssignLaw)
        assert law.bindings[0].target == "r"

    def test_rule5_seq_fallback(self, sqrt_spec):
        law = HeuristicOracle().propose(
            OracleContext(stmt=sqrt_spec.statement)).law
        assert isinstance(law, SeqLaw)


class _StubLlm(BaseHTTPRequestHandler):
    reply_text = "assign x := 0, y := N + 1"
    last_request = None

    def log_message(self, fmt, *args):
        pass

    def do_POST(self):
        length = int(self.headers.get("Content-Length", 0))
        type(self).last_request = json.loads(self.rfile.read(length))
        body = json.dumps({
            "choices": [{"message": {"role": "assistant",
                                     "content": self.reply_text}}]
        }).encode()
        self.send_response(200)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)


@pytest.fixture()
def stub_llm():
    server = ThreadingHTTPServer(("127.0.0.1", 0), _StubLlm)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    yield f"http://127.0.0.1:{server.server_address[1]}/v1/chat/completions"
    server.shutdown()
    server.server_close()


class TestRemoteOracle:
    def test_round_trip_through_chat_endpoint(self, stub_llm, sqrt_ctx):
        oracle = RemoteOracle(url=stub_llm, api_key="sk-test", model="test-model")
        proposal = oracle.propose(sqrt_ctx)
        assert isinstance(proposal.law, AssignLaw)
        sent = _StubLlm.last_request
        assert sent["model"] == "test-model"
        assert sent["messages"][0]["content"] == build_prompt(sqrt_ctx)

    def test_transport_error_is_retryable(self, sqrt_ctx):
        from refinery.oracle import OracleTransportError
        oracle = RemoteOracle(url="http://127.0.0.1:9/nowhere")
        with pytest.raises(OracleTransportError):
            oracle.propose(sqrt_ctx)
