"""Refinement-script lines: one law with its parameters per line.

    skip
    initskip
    seq mid: <formula>
    flexseq A: <f> B: <f> C: <f> D: <f>
    assign x := <expr>, y := <expr>
    followassign x := <expr>
    ifelse G: <expr>
    iterate I: <f> G: <expr> V: <f> mode: flexible|initialised
    traverse l i m: <f> n: <f> P: <f>
    expand y: <type> y0: <f>
    proccall name(<expr>, ...)

Formulas are specification syntax, guards and assignment right-hand
sides are program syntax.  Keyword markers like ``G:`` are recognized
only at bracket depth zero, so formulas may freely contain slices and
quantifier binders.
"""

from __future__ import annotations

from ..prog_lang import parse_prog_expr
from ..spec_lang import (
    NAT,
    SpecError,
    TypedParam,
    parse_spec_expr,
    parse_type,
    render_spec_expr,
)
from .laws import (
    AssignLaw,
    Binding,
    Expand,
    FlexSeq,
    FollowAssign,
    IfElse,
    InitSkip,
    Iterate,
    ProcCall,
    RefinementLaw,
    SeqLaw,
    Skip,
    Traverse,
)


class ScriptError(SpecError):
    pass


def _split_markers(text: str, markers: tuple[str, ...]) -> dict[str, str]:
    """Split text at top-level ``marker:`` keywords; the leading chunk
    before the first marker is returned under ''."""
    spots: list[tuple[int, int, str]] = []  # (start, end-of-colon, marker)
    depth = 0
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c in "([":
            depth += 1
        elif c in ")]":
            depth -= 1
        elif depth == 0 and (c.isalpha() or c == "_"):
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            word = text[i:j]
            if j < n and text[j] == ":" and word in markers and \
                    (i == 0 or not (text[i - 1].isalnum() or text[i - 1] == "_")):
                spots.append((i, j + 1, word))
                i = j + 1
                continue
            i = j
            continue
        i += 1
    out: dict[str, str] = {}
    prev_end = 0
    prev_key = ""
    for start, end, word in spots:
        chunk = text[prev_end:start].strip()
        if prev_key in out:
            raise ScriptError(f"duplicate {prev_key}: section")
        out[prev_key] = chunk
        prev_end = end
        prev_key = word
    if prev_key in out:
        raise ScriptError(f"duplicate {prev_key}: section")
    out[prev_key] = text[prev_end:].strip()
    return out


def _parse_bindings(text: str, what: str) -> tuple[Binding, ...]:
    if not text.strip():
        raise ScriptError(f"{what} needs at least one binding")
    parts, depth, start = [], 0, 0
    for i, c in enumerate(text):
        if c in "([":
            depth += 1
        elif c in ")]":
            depth -= 1
        elif c == "," and depth == 0:
            parts.append(text[start:i])
            start = i + 1
    parts.append(text[start:])
    bindings = []
    for part in parts:
        lhs, sep, rhs = part.partition(":=")
        if not sep:
            raise ScriptError(f"binding needs ':=' in {part.strip()!r}")
        lhs = lhs.strip()
        index = None
        if "[" in lhs:
            if not lhs.endswith("]"):
                raise ScriptError(f"bad indexed target {lhs!r}")
            base, _, idx_text = lhs.partition("[")
            lhs = base.strip()
            index = parse_prog_expr(idx_text[:-1])
        bindings.append(Binding(lhs, parse_prog_expr(rhs), index))
    return tuple(bindings)


def parse_law_line(line: str, stmt, defs=None) -> RefinementLaw:
    """Parse one script line against a statement's declarations."""
    line = line.strip()
    if not line:
        raise ScriptError("empty law line")
    word, _, rest = line.partition(" ")
    rest = rest.strip()
    env = stmt.env
    spec = lambda text, extra=(): parse_spec_expr(text, list(env) + list(extra),
                                                  defs, check_types=False)

    if word == "skip":
        _no_rest(rest)
        return Skip()
    if word == "initskip":
        _no_rest(rest)
        return InitSkip()
    if word == "seq":
        fields = _split_markers(rest, ("mid",))
        _require(fields, "mid", "seq")
        return SeqLaw(spec(fields["mid"]))
    if word == "flexseq":
        fields = _split_markers(rest, ("A", "B", "C", "D"))
        for key in ("A", "B", "C", "D"):
            _require(fields, key, "flexseq")
        return FlexSeq(spec(fields["A"]), spec(fields["B"]),
                       spec(fields["C"]), spec(fields["D"]))
    if word == "assign":
        return AssignLaw(_parse_bindings(rest, "assign"))
    if word == "followassign":
        return FollowAssign(_parse_bindings(rest, "followassign"))
    if word == "ifelse":
        fields = _split_markers(rest, ("G",))
        _require(fields, "G", "ifelse")
        return IfElse(parse_prog_expr(fields["G"]))
    if word == "iterate":
        fields = _split_markers(rest, ("I", "G", "V", "mode"))
        for key in ("I", "G", "V"):
            _require(fields, key, "iterate")
        mode = fields.get("mode", "initialised").strip()
        return Iterate(spec(fields["I"]), parse_prog_expr(fields["G"]),
                       spec(fields["V"]), mode)
    if word == "traverse":
        head, _, tail = rest.partition("m:")
        names = head.split()
        if len(names) != 2:
            raise ScriptError("traverse needs an array name and an index name")
        fields = _split_markers("m:" + tail, ("m", "n", "P"))
        for key in ("m", "n", "P"):
            _require(fields, key, "traverse")
        array, index = names
        idx_param = (stmt.frame_param(index)
                     if stmt.frame_param(index) else TypedParam(index, NAT))
        return Traverse(array, index,
                        spec(fields["m"]), spec(fields["n"]),
                        spec(fields["P"], extra=(idx_param,)))
    if word == "expand":
        fields = _split_markers(rest, ("y0",))
        _require(fields, "y0", "expand")
        decl = fields.get("", "")
        if not decl:
            raise ScriptError("expand needs 'name: type' before y0:")
        name, sep, ty_text = decl.partition(":")
        if not sep:
            raise ScriptError("expand needs 'name: type'")
        param = TypedParam(name.strip(), parse_type(ty_text))
        return Expand(param, spec(fields["y0"], extra=(param,)))
    if word == "proccall":
        name, sep, args_text = rest.partition("(")
        if not sep or not rest.endswith(")"):
            raise ScriptError("proccall needs 'name(args)'")
        name = name.strip()
        inner = args_text[:-1].strip()
        args = ()
        if inner:
            parts, depth, start = [], 0, 0
            for i, c in enumerate(inner):
                if c in "([":
                    depth += 1
                elif c in ")]":
                    depth -= 1
                elif c == "," and depth == 0:
                    parts.append(inner[start:i])
                    start = i + 1
            parts.append(inner[start:])
            args = tuple(parse_prog_expr(p) for p in parts)
        return ProcCall(name, args)
    raise ScriptError(f"unknown law {word!r}")


def _no_rest(rest):
    if rest:
        raise ScriptError(f"unexpected parameters {rest!r}")


def _require(fields, key, law):
    if key not in fields or not fields[key]:
        raise ScriptError(f"{law} needs a {key}: section")
    if law != "expand" and fields.get("") not in (None, ""):
        raise ScriptError(f"stray text {fields['']!r} before {law} parameters")


def render_law(law: RefinementLaw) -> str:
    from ..prog_lang import render_prog_expr

    if isinstance(law, Skip):
        return "skip"
    if isinstance(law, InitSkip):
        return "initskip"
    if isinstance(law, SeqLaw):
        return f"seq mid: {render_spec_expr(law.mid)}"
    if isinstance(law, FlexSeq):
        return (f"flexseq A: {render_spec_expr(law.a)} B: {render_spec_expr(law.b)} "
                f"C: {render_spec_expr(law.c)} D: {render_spec_expr(law.d)}")
    if isinstance(law, AssignLaw):
        return "assign " + ", ".join(b.render() for b in law.bindings)
    if isinstance(law, FollowAssign):
        return "followassign " + ", ".join(b.render() for b in law.bindings)
    if isinstance(law, IfElse):
        return f"ifelse G: {render_prog_expr(law.guard)}"
    if isinstance(law, Iterate):
        return (f"iterate I: {render_spec_expr(law.invariant)} "
                f"G: {render_prog_expr(law.guard)} "
                f"V: {render_spec_expr(law.variant)} mode: {law.mode}")
    if isinstance(law, Traverse):
        return (f"traverse {law.array} {law.index} m: {render_spec_expr(law.lo)} "
                f"n: {render_spec_expr(law.hi)} P: {render_spec_expr(law.prop)}")
    if isinstance(law, Expand):
        return (f"expand {law.param.name}: {law.param.ty} "
                f"y0: {render_spec_expr(law.init)}")
    if isinstance(law, ProcCall):
        return f"proccall {law.name}({', '.join(render_prog_expr(a) for a in law.args)})"
    raise ScriptError(f"cannot render {type(law).__name__}")


def parse_script(text: str) -> list[tuple[str | None, str]]:
    """Script file -> list of (node path or None, law line).

    Lines are consumed in order by the scripted oracle; a line may pin
    itself to a node path with an ``@root.0.1:`` prefix.
    """
    out: list[tuple[str | None, str]] = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        path = None
        if line.startswith("@"):
            head, sep, rest = line[1:].partition(":")
            if not sep:
                raise ScriptError(f"bad path prefix in {line!r}")
            path = head.strip()
            line = rest.strip()
        out.append((path, line))
    return out
