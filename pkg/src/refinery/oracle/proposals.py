"""Turning a raw oracle reply into a checked law proposal."""

from __future__ import annotations

from ..refinement import LawError, ScriptError, apply_law, parse_law_line
from ..spec_lang import SpecError
from .context import IllTypedProposal, LawProposal, NoProposalFound, OracleContext

_LAW_WORDS = ("skip", "initskip", "seq", "flexseq", "assign", "followassign",
              "ifelse", "iterate", "traverse", "expand", "proccall")


def parse_proposal(reply: str, ctx: OracleContext) -> LawProposal:
    """First well-formed script line in the reply, type-checked against
    the context's statement.

    A line that starts like a law but fails to parse or type-check makes
    the proposal ill-typed; a reply with no law-shaped line at all is
    NoProposalFound.
    """
    first_error = None
    rationale: list[str] = []
    for raw in reply.splitlines():
        line = raw.strip()
        if line.startswith("```"):
            line = line.strip("`").strip()
        if line.startswith(("#", "//")):
            rationale.append(line.lstrip("#/ "))
            continue
        if not line:
            continue
        word = line.split(None, 1)[0]
        if word not in _LAW_WORDS:
            rationale.append(line)
            continue
        try:
            law = parse_law_line(line, ctx.stmt, ctx.defs)
            # a dry scheme application surfaces parameter/type mismatches now
            apply_law(ctx.stmt, law, ctx.library, ctx.defs)
        except (ScriptError, LawError, SpecError) as exc:
            if first_error is None:
                first_error = f"{line!r}: {exc}"
            continue
        return LawProposal(law, rationale=" ".join(rationale), raw_reply=reply)
    if first_error is not None:
        raise IllTypedProposal(first_error)
    raise NoProposalFound(f"no law line in reply {reply[:120]!r}")
