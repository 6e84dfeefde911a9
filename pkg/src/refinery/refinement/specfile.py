"""Problem files: the statement to refine, in sections.

::

    name: sqrt_approx
    constants: N: float, e: float
    variants: x: float, y: float
    define: divides (d:int) (m:int) := exists (k:int), m = d*k
    pre: N >= 0 /\\ e > 0
    post: x*x <= N /\\ N < y*y /\\ y <= x+e

A section runs to the next keyword at the start of a line; ``define:``
may repeat.  Definitions may use earlier definitions but not themselves.
"""

from __future__ import annotations

from ..spec_lang import (
    CONSTANT,
    VARIANT,
    Definition,
    SpecError,
    TypedParam,
    parse_definition,
    parse_spec_expr,
    parse_type,
)
from .statement import SpecFile, SpecStatement

_KEYWORDS = ("name", "constants", "variants", "define", "pre", "post")


class SpecFileError(SpecError):
    pass


def _sections(text: str) -> list[tuple[str, str, int]]:
    out: list[tuple[str, str, int]] = []
    current: tuple[str, list[str], int] | None = None
    for number, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        key, sep, rest = stripped.partition(":")
        if sep and key.strip() in _KEYWORDS and raw[:1] not in (" ", "\t"):
            if current is not None:
                out.append((current[0], "\n".join(current[1]), current[2]))
            current = (key.strip(), [rest.strip()], number)
        else:
            if current is None:
                raise SpecFileError(f"text before the first section at line {number}")
            current[1].append(stripped)
    if current is not None:
        out.append((current[0], "\n".join(current[1]), current[2]))
    return out


def parse_params(text: str, kind: str) -> list[TypedParam]:
    params = []
    text = text.strip()
    if not text:
        return params
    for part in text.split(","):
        name, sep, ty = part.partition(":")
        if not sep:
            raise SpecFileError(f"parameter needs 'name: type' in {part.strip()!r}")
        params.append(TypedParam(name.strip(), parse_type(ty), kind))
    return params


def parse_spec_file(text: str) -> SpecFile:
    name = ""
    variants: list[TypedParam] = []
    constants: list[TypedParam] = []
    defs: list[Definition] = []
    pre_text = post_text = None
    for key, value, line in _sections(text):
        if key == "name":
            name = value.strip()
        elif key == "constants":
            constants.extend(parse_params(value, CONSTANT))
        elif key == "variants":
            variants.extend(parse_params(value, VARIANT))
        elif key == "define":
            env = variants + constants
            defs.append(parse_definition(value, env, {d.name: d for d in defs}))
        elif key == "pre":
            pre_text = value
        elif key == "post":
            post_text = value
    if pre_text is None or post_text is None:
        raise SpecFileError("a spec file needs both pre: and post: sections")
    if not variants:
        raise SpecFileError("a spec file needs at least one variant")
    env = variants + constants
    defs_map = {d.name: d for d in defs}
    pre = parse_spec_expr(pre_text, env, defs_map)
    post = parse_spec_expr(post_text, env, defs_map)
    stmt = SpecStatement(tuple(variants), tuple(constants), pre, post)
    return SpecFile(name or "unnamed", stmt, tuple(defs))


def render_spec_file(spec: SpecFile) -> str:
    from ..spec_lang import render_spec_expr

    lines = [f"name: {spec.name}"]
    if spec.statement.constants:
        lines.append("constants: " + ", ".join(str(p) for p in spec.statement.constants))
    lines.append("variants: " + ", ".join(str(p) for p in spec.statement.frame))
    for d in spec.defs:
        params = " ".join(f"({p.name}:{p.ty})" for p in d.params)
        lines.append(f"define: {d.name} {params} := {render_spec_expr(d.body)}")
    lines.append(f"pre: {render_spec_expr(spec.statement.pre)}")
    lines.append(f"post: {render_spec_expr(spec.statement.post)}")
    return "\n".join(lines) + "\n"
