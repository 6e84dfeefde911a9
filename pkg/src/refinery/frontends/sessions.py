"""Refinement sessions: one tree plus an append-only event log that
replays to the current state.  Mutations are serialized per session."""

from __future__ import annotations

import threading
import uuid

from ..oracle import Oracle, OracleContext
from ..refinement import (
    LawError,
    Library,
    ScriptError,
    SpecTree,
    TreeError,
    parse_law_line,
    parse_spec_file,
    render_law,
)
from ..spec_lang import SpecError
from ..verifier import VerifyConfig, check_obligations


class SessionError(Exception):
    def __init__(self, message, code=400):
        super().__init__(message)
        self.code = code


class Session:
    def __init__(self, spec_text: str, config: VerifyConfig | None = None,
                 oracle: Oracle | None = None, library: Library | None = None,
                 session_id: str | None = None):
        self.id = session_id or uuid.uuid4().hex[:12]
        self.spec_text = spec_text
        self.spec = parse_spec_file(spec_text)
        self.config = config or VerifyConfig()
        self.oracle = oracle
        self.library = library
        self.tree = SpecTree(self.spec.statement, defs=self.spec.defs_map,
                             library=library,
                             accept_unknown=self.config.accept_unknown)
        self.events: list[dict] = []
        self.lock = threading.Lock()

    # -- operations (callers hold self.lock through the public API) -----------

    def node(self, node_id: int):
        try:
            return self.tree.node(node_id)
        except TreeError as exc:
            raise SessionError(str(exc), code=404) from exc

    def apply(self, node_id: int, law_text: str) -> dict:
        node = self.node(node_id)
        if node.law is not None:
            raise SessionError(f"node {node_id} is not open", code=409)
        try:
            law = parse_law_line(law_text, node.stmt, self.tree.defs)
        except (ScriptError, SpecError) as exc:
            raise SessionError(f"ill-typed proposal: {exc}", code=422) from exc
        try:
            self.tree.apply(node_id, law)
        except (LawError, SpecError) as exc:
            raise SessionError(f"ill-typed proposal: {exc}", code=422) from exc
        self.events.append({"op": "apply", "node": self.tree.path(node_id),
                            "law": render_law(law)})
        return {"node": node_id, "children": list(node.children)}

    def verify(self, node_id: int) -> list[dict]:
        node = self.node(node_id)
        if node.law is None:
            raise SessionError(f"node {node_id} has no applied law", code=409)
        for ob in node.obligations:
            if ob.status != "pending":
                ob.reset()
        check_obligations(node.obligations, self.config, self.tree.defs)
        results = [_ob_result(ob) for ob in node.obligations]
        self.events.append({"op": "verify", "node": self.tree.path(node_id),
                            "results": results})
        return results

    def backtrack(self, node_id: int, reason: str) -> dict:
        node = self.node(node_id)
        if node.law is None:
            raise SessionError(f"node {node_id} has no applied law", code=409)
        path = self.tree.path(node_id)
        self.tree.backtrack(node_id, reason)
        self.events.append({"op": "backtrack", "node": path, "reason": reason})
        return {"node": node_id, "status": "open"}

    def suggest(self, node_id: int) -> dict:
        node = self.node(node_id)
        if node.law is not None:
            raise SessionError(f"node {node_id} is not open", code=409)
        if self.oracle is None:
            raise SessionError("no oracle configured for this session", code=409)
        hints = ()
        if self.library is not None:
            hints = tuple(
                f"{m.entry.name}({', '.join(str(p) for p in m.entry.params)})"
                for m in self.library.lookup(node.stmt))
        ctx = OracleContext(stmt=node.stmt, path=self.tree.path(node_id),
                            failures=tuple(node.failures), hints=hints,
                            retries_left=1, defs=self.tree.defs,
                            library=self.library)
        proposal = self.oracle.propose(ctx)
        return {"law": render_law(proposal.law), "rationale": proposal.rationale}

    def program(self) -> str:
        from ..prog_lang import render_program
        if not self.tree.is_closed():
            raise SessionError("the refinement is not closed yet", code=409)
        return render_program(self.tree.extract_program())

    # -- persistence -----------------------------------------------------------

    def snapshot(self) -> dict:
        return {"api": 1, "session": self.id, "spec": self.spec_text,
                "events": list(self.events)}

    @classmethod
    def replay(cls, snapshot: dict, config: VerifyConfig | None = None,
               oracle: Oracle | None = None,
               library: Library | None = None) -> "Session":
        """Rebuild a session from its snapshot; verify events re-apply
        their recorded verdicts rather than re-running backends."""
        session = cls(snapshot["spec"], config=config, oracle=oracle,
                      library=library, session_id=snapshot.get("session"))
        for event in snapshot.get("events", []):
            node = session.tree.node_at(event["node"])
            if event["op"] == "apply":
                law = parse_law_line(event["law"], node.stmt, session.tree.defs)
                session.tree.apply(node.id, law)
            elif event["op"] == "verify":
                for ob, recorded in zip(node.obligations, event["results"]):
                    if ob.status != "pending":
                        ob.reset()
                    cex = recorded.get("counterexample")
                    if cex is not None:
                        cex = _parse_cex(cex)
                    ob.resolve(recorded["status"], backend=recorded.get("backend"),
                               counterexample=cex, reason=recorded.get("reason"))
            elif event["op"] == "backtrack":
                session.tree.backtrack(node.id, event["reason"])
            else:
                raise SessionError(f"unknown event {event['op']!r}")
            session.events.append(event)
        return session


def _ob_result(ob) -> dict:
    out = {"label": ob.label, "status": ob.status}
    if ob.backend:
        out["backend"] = ob.backend
    if ob.counterexample is not None:
        out["counterexample"] = {k: _value_text(v)
                                 for k, v in ob.counterexample.items()}
    if ob.reason:
        out["reason"] = ob.reason
    return out


def _value_text(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, tuple):
        return "[" + ", ".join(_value_text(x) for x in v) + "]"
    return str(v)


def _parse_cex(cex: dict) -> dict:
    from ..prog_lang import parse_value
    return {k: parse_value(v) if isinstance(v, str) else v
            for k, v in cex.items()}
