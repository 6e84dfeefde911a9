"""The specification tree: nodes carry a refinable statement, the law
applied to it, the emitted code fragment, and that law's proof
obligations.  A node closes when its obligations are proved and all its
children are closed; backtracking removes a law application and records
why it was rejected.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..prog_lang import Statement, fill_holes, holes_in, render_program
from ..spec_lang import SpecError
from .laws import (
    PROVED,
    ProofObligation,
    RefinementLaw,
    RefinementStep,
    apply_law,
    law_name,
)
from .scripts import render_law
from .statement import SpecStatement

OPEN = "open"
REFINED = "refined"
CLOSED = "closed"
FAILED = "failed"


class TreeError(SpecError):
    pass


@dataclass
class Failure:
    law_text: str
    reason: str


@dataclass
class RefineNode:
    id: int
    parent: int | None
    stmt: SpecStatement
    law: RefinementLaw | None = None
    children: list[int] = field(default_factory=list)
    code: Statement | None = None
    obligations: list[ProofObligation] = field(default_factory=list)
    failures: list[Failure] = field(default_factory=list)
    failed: bool = False


class SpecTree:
    """One refinement tree; mutated by a single session at a time."""

    def __init__(self, root_stmt: SpecStatement, defs=None, library=None,
                 accept_unknown=False):
        self.nodes: dict[int, RefineNode] = {}
        self.defs = dict(defs) if defs else {}
        self.library = library
        self.accept_unknown = accept_unknown  # exploratory mode only
        self._next_id = 0
        self.root_id = self._new_node(None, root_stmt).id

    def _new_node(self, parent, stmt) -> RefineNode:
        node = RefineNode(self._next_id, parent, stmt)
        self.nodes[node.id] = node
        self._next_id += 1
        return node

    @property
    def root(self) -> RefineNode:
        return self.nodes[self.root_id]

    def node(self, node_id: int) -> RefineNode:
        if node_id not in self.nodes:
            raise TreeError(f"no node {node_id}")
        return self.nodes[node_id]

    def path(self, node_id: int) -> str:
        parts: list[str] = []
        node = self.node(node_id)
        while node.parent is not None:
            parent = self.nodes[node.parent]
            parts.append(str(parent.children.index(node.id)))
            node = parent
        return ".".join(["root"] + list(reversed(parts)))

    def node_at(self, path: str) -> RefineNode:
        parts = path.split(".")
        if parts[0] != "root":
            raise TreeError(f"bad path {path!r}")
        node = self.root
        for part in parts[1:]:
            try:
                node = self.nodes[node.children[int(part)]]
            except (ValueError, IndexError):
                raise TreeError(f"bad path {path!r}") from None
        return node

    # -- state --------------------------------------------------------------

    def status(self, node_id: int) -> str:
        node = self.node(node_id)
        if node.law is None:
            return FAILED if node.failed else OPEN
        ok = {PROVED, "unknown"} if self.accept_unknown else {PROVED}
        if all(ob.status in ok for ob in node.obligations) and \
                all(self.status(c) == CLOSED for c in node.children):
            return CLOSED
        return REFINED

    def is_closed(self) -> bool:
        return self.status(self.root_id) == CLOSED

    def open_nodes(self) -> list[int]:
        """Open nodes in depth-first order (leftmost first)."""
        out: list[int] = []
        stack = [self.root_id]
        while stack:
            node = self.nodes[stack.pop()]
            if node.law is None:
                out.append(node.id)
            stack.extend(reversed(node.children))
        return out

    # -- mutation -------------------------------------------------------------

    def apply(self, node_id: int, law: RefinementLaw) -> RefineNode:
        node = self.node(node_id)
        if node.law is not None:
            raise TreeError(f"node {node_id} is not open")
        step: RefinementStep = apply_law(node.stmt, law, self.library, self.defs)
        slots = holes_in(step.code)
        if sorted(slots) != list(range(len(step.children))):
            raise AssertionError("law scheme emitted mismatched holes")
        node.law = law
        node.code = step.code
        node.failed = False
        node.obligations = step.obligations
        for ob in node.obligations:
            ob.origin_node = node.id
        node.children = [self._new_node(node.id, child).id
                         for child in step.children]
        return node

    def backtrack(self, node_id: int, reason: str) -> RefineNode:
        node = self.node(node_id)
        if node.law is None:
            raise TreeError(f"node {node_id} has no applied law to backtrack")
        self._drop_subtrees(node)
        node.failures.append(Failure(render_law(node.law), reason))
        node.law = None
        node.code = None
        node.obligations = []
        node.failed = False
        return node

    def _drop_subtrees(self, node: RefineNode):
        for child_id in node.children:
            child = self.nodes[child_id]
            self._drop_subtrees(child)
            del self.nodes[child_id]
        node.children = []

    # -- extraction -----------------------------------------------------------

    def extract_program(self, node_id: int | None = None,
                        require_closed: bool = True) -> Statement:
        node = self.node(self.root_id if node_id is None else node_id)
        if require_closed and self.status(node.id) != CLOSED:
            raise TreeError(f"node {self.path(node.id)} is not closed")
        if node.law is None or node.code is None:
            raise TreeError(f"node {self.path(node.id)} is still open")
        pieces = {slot: self.extract_program(child_id, require_closed)
                  for slot, child_id in enumerate(node.children)}
        return fill_holes(node.code, pieces)

    # -- serialization ----------------------------------------------------------

    def to_dict(self) -> dict:
        from ..spec_lang import render_spec_expr

        def param_dict(p):
            return {"name": p.name, "type": str(p.ty), "kind": p.kind}

        def ob_dict(ob: ProofObligation):
            out = {
                "label": ob.label,
                "hypothesis": render_spec_expr(ob.hypothesis),
                "conclusion": render_spec_expr(ob.conclusion),
                "status": ob.status,
            }
            if ob.backend:
                out["backend"] = ob.backend
            if ob.counterexample is not None:
                out["counterexample"] = {k: _value_text(v)
                                         for k, v in ob.counterexample.items()}
            if ob.reason:
                out["reason"] = ob.reason
            return out

        defs = [{"name": d.name, "arity": len(d.params)}
                for d in self.defs.values()]
        nodes = []
        for node_id in sorted(self.nodes):
            node = self.nodes[node_id]
            nodes.append({
                "id": node.id,
                "path": self.path(node.id),
                "parent": node.parent,
                "frame": [param_dict(p) for p in node.stmt.frame],
                "constants": [param_dict(p) for p in node.stmt.constants],
                "pre": render_spec_expr(node.stmt.pre),
                "post": render_spec_expr(node.stmt.post),
                "law": render_law(node.law) if node.law is not None else None,
                "law_kind": law_name(node.law) if node.law is not None else None,
                "code": render_program(node.code) if node.code is not None else None,
                "status": self.status(node.id),
                "obligations": [ob_dict(ob) for ob in node.obligations],
                "failures": [{"law": f.law_text, "reason": f.reason}
                             for f in node.failures],
                "children": list(node.children),
            })
        return {"root": self.root_id, "defs": defs, "nodes": nodes}


def _value_text(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, tuple):
        return "[" + ", ".join(_value_text(x) for x in v) + "]"
    return str(v)
