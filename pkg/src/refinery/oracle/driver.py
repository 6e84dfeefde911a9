"""The automated refinement loop.

Repeatedly pick the leftmost open node, ask the oracle for a law, apply
it, and discharge the new obligations.  A refuted or unknown obligation
backtracks the node and records the failure (with any counterexample)
for the next prompt; after K failures at one node the driver falls back
one step and backtracks the node's parent.  Deterministic oracles give
deterministic runs.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field

from ..refinement import (
    Failure,
    PROVED,
    REFUTED,
    SpecTree,
    TreeError,
    render_law,
)
from ..verifier import VerifyConfig, check_obligations
from .context import (
    IllTypedProposal,
    NoProposalFound,
    OracleContext,
    OracleExhausted,
    OracleTransportError,
)
from .oracles import Oracle

FULLY_REFINED = "fully_refined"
EXHAUSTED = "exhausted"

DEFAULT_RETRIES = 3
DEFAULT_MAX_PROPOSALS = 200


@dataclass
class DriveLimits:
    retries_per_node: int = DEFAULT_RETRIES
    max_proposals: int = DEFAULT_MAX_PROPOSALS


@dataclass
class DriveReport:
    outcome: str = EXHAUSTED
    attempts: dict[str, int] = field(default_factory=dict)
    proved: int = 0
    refuted: int = 0
    unknown: int = 0
    parent_backtracks: int = 0
    detail: str = ""
    elapsed: float = 0.0

    @property
    def fully_refined(self):
        return self.outcome == FULLY_REFINED

    def render(self) -> str:
        """Canonical text (elapsed time excluded, for reproducibility)."""
        lines = [f"outcome: {self.outcome}"]
        if self.detail:
            lines.append(f"detail: {self.detail}")
        lines.append(f"obligations: {self.proved} proved, {self.refuted} refuted, "
                     f"{self.unknown} unknown")
        lines.append(f"parent backtracks: {self.parent_backtracks}")
        for path in sorted(self.attempts):
            lines.append(f"attempts {path}: {self.attempts[path]}")
        return "\n".join(lines) + "\n"


class Transcript:
    """Append-only oracle traffic log, replayable as a script."""

    def __init__(self, path=None):
        self.events: list[dict] = []
        self.path = path

    def record(self, **event):
        self.events.append(event)
        if self.path:
            with open(self.path, "a", encoding="utf-8") as fh:
                fh.write(json.dumps(event, sort_keys=True) + "\n")


def _render_cex(cex: dict) -> str:
    parts = []
    for name in sorted(cex):
        value = cex[name]
        if isinstance(value, bool):
            text = "true" if value else "false"
        elif isinstance(value, tuple):
            text = "[" + ", ".join(str(v) for v in value) + "]"
        else:
            text = str(value)
        parts.append(f"{name} := {text}")
    return ", ".join(parts)


def drive_refinement(tree: SpecTree,
                     oracle: Oracle,
                     config: VerifyConfig | None = None,
                     limits: DriveLimits | None = None,
                     transcript: Transcript | None = None) -> DriveReport:
    config = config or VerifyConfig()
    limits = limits or DriveLimits()
    transcript = transcript or Transcript()
    report = DriveReport()
    started = time.monotonic()
    proposals = 0

    while True:
        if tree.is_closed():
            report.outcome = FULLY_REFINED
            break
        opens = tree.open_nodes()
        if not opens:
            report.detail = "no open nodes but the root is not closed"
            break
        node_id = opens[0]
        node = tree.node(node_id)
        path = tree.path(node_id)
        if proposals >= limits.max_proposals:
            report.detail = f"proposal budget ({limits.max_proposals}) spent"
            break
        proposals += 1
        report.attempts[path] = report.attempts.get(path, 0) + 1

        hints = ()
        if tree.library is not None:
            hints = tuple(
                f"{m.entry.name}({', '.join(str(p) for p in m.entry.params)})"
                for m in tree.library.lookup(node.stmt))
        ctx = OracleContext(
            stmt=node.stmt,
            path=path,
            failures=tuple(node.failures),
            hints=hints,
            retries_left=max(limits.retries_per_node - len(node.failures), 0),
            defs=tree.defs,
            library=tree.library,
        )

        try:
            proposal = oracle.propose(ctx)
        except OracleExhausted as exc:
            report.detail = str(exc)
            break
        except (NoProposalFound, IllTypedProposal, OracleTransportError) as exc:
            transcript.record(node=path, error=str(exc))
            node.failures.append(Failure("(no applicable law)", str(exc)))
            if not _maybe_backtrack_parent(tree, node_id, limits, report):
                break
            continue

        law_text = render_law(proposal.law)
        try:
            tree.apply(node_id, proposal.law)
        except TreeError as exc:
            transcript.record(node=path, law=law_text, error=str(exc))
            node.failures.append(Failure(law_text, str(exc)))
            if not _maybe_backtrack_parent(tree, node_id, limits, report):
                break
            continue

        results = check_obligations(node.obligations, config, tree.defs)
        verdicts = []
        bad_reason = None
        for ob, result in zip(node.obligations, results):
            verdicts.append({"label": ob.label, "status": result.status,
                             "backend": result.backend})
            if result.status == PROVED:
                report.proved += 1
            elif result.status == REFUTED:
                report.refuted += 1
                if bad_reason is None:
                    bad_reason = (f"obligation {ob.label} refuted; "
                                  f"counterexample: {_render_cex(result.counterexample)}")
            else:
                report.unknown += 1
                if config.accept_unknown:
                    continue
                if bad_reason is None:
                    bad_reason = f"obligation {ob.label} unknown: {result.reason}"
        transcript.record(node=path, law=law_text, verdicts=verdicts,
                          rationale=proposal.rationale or None)

        if bad_reason is not None:
            tree.backtrack(node_id, bad_reason)
            if not _maybe_backtrack_parent(tree, node_id, limits, report):
                break
            continue

    report.elapsed = time.monotonic() - started
    return report


def _maybe_backtrack_parent(tree: SpecTree, node_id: int,
                            limits: DriveLimits, report: DriveReport) -> bool:
    """After K failures at a node, fall back one refinement step by
    backtracking its parent (removing the node).  Returns False when the
    root itself is out of attempts."""
    node = tree.node(node_id)
    if len(node.failures) < limits.retries_per_node:
        return True
    if node.parent is None:
        report.detail = (f"root exhausted after {len(node.failures)} "
                         f"failed proposals")
        return False
    child_path = tree.path(node_id)
    tree.backtrack(node.parent,
                   f"child {child_path} exhausted after "
                   f"{len(node.failures)} failed proposals")
    report.parent_backtracks += 1
    return True
