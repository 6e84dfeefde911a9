"""The constraint-bearing prompt: a pure function of the oracle
context.  It carries the law menu with proviso schemes, the current
statement, verbatim failure history, library hints, and the exact
output contract; no conversation history beyond the current node is
ever included.
"""

from __future__ import annotations

from ..spec_lang import render_spec_expr
from .catalog import law_menu_text
from .context import OracleContext


def build_prompt(ctx: OracleContext) -> str:
    stmt = ctx.stmt
    parts = [
        "You refine a specification statement into verified code by choosing "
        "one refinement law.",
        "",
        "## Laws",
        law_menu_text(),
        "",
        "## Current specification",
        f"node: {ctx.path}",
        "frame: " + ", ".join(str(p) for p in stmt.frame),
    ]
    if stmt.constants:
        parts.append("constants: " + ", ".join(str(p) for p in stmt.constants))
    parts.append(f"pre: {render_spec_expr(stmt.pre)}")
    parts.append(f"post: {render_spec_expr(stmt.post)}")
    if ctx.defs:
        parts.append("definitions: " + ", ".join(sorted(ctx.defs)))
    if ctx.failures:
        parts.append("")
        parts.append("## Previous failures at this node")
        for i, failure in enumerate(ctx.failures, start=1):
            parts.append(f"{i}. {failure.law_text}")
            parts.append(f"   {failure.reason}")
    if ctx.hints:
        parts.append("")
        parts.append("## Library procedures with matching shape")
        for hint in ctx.hints:
            parts.append(f"- {hint}")
    parts.extend([
        "",
        "## Output",
        f"You have {ctx.retries_left} attempt(s) left for this node.",
        "Reply with exactly one refinement-script line in the syntax shown "
        "above, and nothing else.",
    ])
    return "\n".join(parts)
