"""The three proposers: scripted playback, fixed-rule heuristics, and a
remote chat-completion endpoint.  Each produces a raw reply which is
piped through parse_proposal, so every path into the tree is checked
the same way.
"""

from __future__ import annotations

import json
import os
import urllib.error
import urllib.request
from dataclasses import dataclass, field

from ..refinement import (
    AssignLaw,
    Binding,
    Iterate,
    ProofObligation,
    SeqLaw,
    Skip,
    Traverse,
    parse_script,
    render_law,
)
from ..spec_lang import (
    Implies,
    Num,
    Quant,
    Rel,
    SpecError,
    Var,
    conj,
    conjuncts,
    free_vars,
    init_vars,
)
from ..prog_lang import ProgError, spec_expr_to_prog
from ..verifier import DomainSpec, PROVED, check_bounded
from .context import (
    LawProposal,
    OracleContext,
    OracleExhausted,
    OracleTransportError,
)
from .prompts import build_prompt
from .proposals import parse_proposal

LLM_URL_ENV = "REFINERY_LLM_URL"
LLM_KEY_ENV = "REFINERY_LLM_KEY"


class Oracle:
    """A proposer: produces one raw reply per request."""

    name = "oracle"

    def reply(self, ctx: OracleContext) -> str:
        raise NotImplementedError

    def propose(self, ctx: OracleContext) -> LawProposal:
        return parse_proposal(self.reply(ctx), ctx)


class ScriptedOracle(Oracle):
    """Plays back a script: a global queue of law lines consumed in
    proposal order, plus optional per-node-path queues (``@path:``
    lines) that take precedence for their node."""

    name = "scripted"

    def __init__(self, entries):
        if isinstance(entries, str):
            entries = parse_script(entries)
        self.queue: list[str] = []
        self.by_path: dict[str, list[str]] = {}
        for path, line in entries:
            if path is None:
                self.queue.append(line)
            else:
                self.by_path.setdefault(path, []).append(line)

    def reply(self, ctx: OracleContext) -> str:
        keyed = self.by_path.get(ctx.path)
        if keyed:
            return keyed.pop(0)
        if self.queue:
            return self.queue.pop(0)
        raise OracleExhausted(f"script exhausted at node {ctx.path}")


@dataclass
class HeuristicOracle(Oracle):
    """Fixed rules, in order: reflexive skip, iteration from a
    negated-guard postcondition, traverse from a ranged forall,
    syntactic single-assignment, and a sequence split as the fallback."""

    domains: DomainSpec = field(default_factory=lambda: DomainSpec(
        int_range=(-1, 1), nat_range=(0, 1), array_lens=(0, 1)))
    budget: int = 5000

    name = "heuristic"

    def reply(self, ctx: OracleContext) -> str:
        return render_law(self.choose(ctx))

    def choose(self, ctx: OracleContext):
        stmt = ctx.stmt
        if self._pre_implies_post(ctx):
            return Skip()
        law = self._iteration_shape(stmt)
        if law is not None:
            return law
        law = self._traverse_shape(stmt)
        if law is not None:
            return law
        law = self._single_assignment(stmt)
        if law is not None:
            return law
        parts = conjuncts(stmt.post)
        mid = conj(parts[:-1]) if len(parts) > 1 else stmt.post
        return SeqLaw(mid)

    def _pre_implies_post(self, ctx) -> bool:
        stmt = ctx.stmt
        ob = ProofObligation("skip", stmt.pre, stmt.post, stmt.env)
        try:
            result = check_bounded(ob, self.domains, self.budget, ctx.defs)
        except SpecError:
            return False
        return result.status == PROVED

    def _iteration_shape(self, stmt):
        parts = conjuncts(stmt.post)
        if len(parts) < 2 or not isinstance(parts[-1], Rel):
            return None
        if [str(p) for p in parts[:-1]] != [str(p) for p in conjuncts(stmt.pre)]:
            return None
        exit_rel: Rel = parts[-1]
        from ..refinement import negate_spec
        guard_spec = negate_spec(exit_rel)
        try:
            guard = spec_expr_to_prog(guard_spec)
        except ProgError:
            return None
        if guard_spec.op in (">", ">="):
            variant = _minus(guard_spec.left, guard_spec.right)
        elif guard_spec.op in ("<", "<="):
            variant = _minus(guard_spec.right, guard_spec.left)
        else:
            variant = Num(1)
        mode = "flexible" if any(p.ty.kind == "float" for p in stmt.frame) \
            else "initialised"
        return Iterate(conj(parts[:-1]), guard, variant, mode)

    def _traverse_shape(self, stmt):
        post = stmt.post
        if not (isinstance(post, Quant) and post.kind == "forall"
                and isinstance(post.body, Implies)):
            return None
        rng = conjuncts(post.body.left)
        i = post.param.name
        lo = hi = None
        for r in rng:
            if isinstance(r, Rel) and r.op == "<=" and r.right == Var(i):
                lo = r.left
            elif isinstance(r, Rel) and r.op == "<" and r.left == Var(i):
                hi = r.right
        if lo is None and post.param.ty.kind == "nat":
            lo = Num(0)  # a nat binder starts at zero implicitly
        if lo is None or hi is None:
            return None
        arrays = [p for p in stmt.frame if p.ty.kind == "array"]
        if not arrays:
            return None
        return Traverse(arrays[0].name, i, lo, hi, post.body.right)

    def _single_assignment(self, stmt):
        parts = conjuncts(stmt.post)
        if len(parts) != 1 or not isinstance(parts[0], Rel) or parts[0].op != "=":
            return None
        rel = parts[0]
        for lhs, rhs in ((rel.left, rel.right), (rel.right, rel.left)):
            if isinstance(lhs, Var) and stmt.frame_param(lhs.name) and \
                    not init_vars(rhs) and lhs.name not in free_vars(rhs):
                try:
                    expr = spec_expr_to_prog(rhs)
                except ProgError:
                    continue
                return AssignLaw((Binding(lhs.name, expr),))
        return None


def _minus(left, right):
    from ..spec_lang import Arith
    return Arith("-", left, right)


@dataclass
class RemoteOracle(Oracle):
    """Chat-completion client: posts the built prompt as a single user
    message and reads one text reply back."""

    url: str = ""
    api_key: str = ""
    model: str = "gpt-4"
    temperature: float = 0.0
    timeout: float = 60.0

    name = "remote"

    def __post_init__(self):
        self.url = self.url or os.environ.get(LLM_URL_ENV, "")
        self.api_key = self.api_key or os.environ.get(LLM_KEY_ENV, "")
        if not self.url:
            raise OracleTransportError(
                f"no remote endpoint configured (set {LLM_URL_ENV})")

    def reply(self, ctx: OracleContext) -> str:
        body = json.dumps({
            "model": self.model,
            "temperature": self.temperature,
            "messages": [{"role": "user", "content": build_prompt(ctx)}],
        }).encode()
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        request = urllib.request.Request(self.url, data=body, headers=headers)
        try:
            with urllib.request.urlopen(request, timeout=self.timeout) as resp:
                payload = json.loads(resp.read().decode())
        except (urllib.error.URLError, TimeoutError, json.JSONDecodeError, OSError) as exc:
            raise OracleTransportError(f"remote oracle failed: {exc}") from exc
        return _reply_text(payload)


def _reply_text(payload) -> str:
    try:
        choices = payload.get("choices")
        if choices:
            message = choices[0].get("message")
            if message and "content" in message:
                return message["content"]
            if "text" in choices[0]:
                return choices[0]["text"]
        if isinstance(payload.get("content"), str):
            return payload["content"]
        if isinstance(payload.get("content"), list):
            return "".join(part.get("text", "") for part in payload["content"])
    except (AttributeError, IndexError, TypeError):
        pass
    raise OracleTransportError(f"unrecognized reply shape: {str(payload)[:200]}")


def make_oracle(kind: str, script_text: str | None = None, **kwargs) -> Oracle:
    if kind == "scripted":
        if script_text is None:
            raise ValueError("the scripted oracle needs a script")
        return ScriptedOracle(script_text)
    if kind == "heuristic":
        return HeuristicOracle()
    if kind == "remote":
        return RemoteOracle(**kwargs)
    raise ValueError(f"unknown oracle kind {kind!r}")
