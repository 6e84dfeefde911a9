"""Rendering of programs: 4-space indentation, tight arithmetic,
spaced comparisons, matching the specification printer's conventions."""

from __future__ import annotations

from .ast import (
    Assert,
    Assign,
    Call,
    Hole,
    If,
    PBin,
    PBool,
    PIndex,
    PName,
    PNeg,
    PNot,
    PNum,
    PSlice,
    Pass,
    ProcDef,
    ProgExpr,
    Seq,
    Statement,
    While,
)

_OR, _AND, _NOT, _CMP, _ADD, _MUL, _UNARY, _POST = range(8)

_LEVEL = {"or": _OR, "and": _AND,
          "==": _CMP, "!=": _CMP, "<": _CMP, "<=": _CMP, ">": _CMP, ">=": _CMP,
          "+": _ADD, "-": _ADD, "*": _MUL, "/": _MUL}


def render_prog_expr(e: ProgExpr) -> str:
    return _expr(e, 0)


def _paren(text, level, minimum):
    return f"({text})" if level < minimum else text


def _expr(e: ProgExpr, ctx: int) -> str:
    if isinstance(e, PNum):
        v = e.value
        text = str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
        if v < 0:
            level = _ADD
        elif v.denominator != 1:
            level = _MUL
        else:
            level = _POST
        return _paren(text, level, ctx)
    if isinstance(e, PBool):
        return "true" if e.value else "false"
    if isinstance(e, PName):
        return e.name
    if isinstance(e, PBin):
        level = _LEVEL[e.op]
        left = _expr(e.left, level)
        right = _expr(e.right, level + 1)
        if e.op in ("and", "or"):
            return _paren(f"{left} {e.op} {right}", level, ctx)
        if e.op in ("==", "!=", "<", "<=", ">", ">="):
            return _paren(f"{left} {e.op} {right}", level, ctx)
        if e.op == "/" and _int_literal(e.left) and _int_literal(e.right):
            left = f"({left})"
        return _paren(f"{left}{e.op}{right}", level, ctx)
    if isinstance(e, PNot):
        return _paren(f"not {_expr(e.expr, _NOT)}", _NOT, ctx)
    if isinstance(e, PNeg):
        return _paren(f"-{_expr(e.expr, _UNARY)}", _UNARY, ctx)
    if isinstance(e, PIndex):
        return f"{e.base}[{_expr(e.index, 0)}]"
    if isinstance(e, PSlice):
        return f"{e.base}[{_expr(e.lo, 0)}:{_expr(e.hi, 0)}]"
    raise TypeError(f"cannot render {type(e).__name__}")


def _int_literal(e):
    return isinstance(e, PNum) and e.value.denominator == 1


def render_program(s: Statement) -> str:
    lines: list[str] = []
    _stmt(s, 0, lines)
    return "\n".join(lines) + "\n"


def _stmt(s: Statement, depth: int, lines: list):
    pad = "    " * depth
    if isinstance(s, Pass):
        lines.append(f"{pad}pass")
    elif isinstance(s, Assign):
        target = s.target if s.index is None else f"{s.target}[{_expr(s.index, 0)}]"
        lines.append(f"{pad}{target} = {_expr(s.expr, 0)}")
    elif isinstance(s, Seq):
        for part in s.stmts:
            _stmt(part, depth, lines)
    elif isinstance(s, While):
        lines.append(f"{pad}while {_expr(s.cond, 0)}:")
        _stmt(s.body, depth + 1, lines)
    elif isinstance(s, If):
        lines.append(f"{pad}if {_expr(s.cond, 0)}:")
        _stmt(s.then, depth + 1, lines)
        lines.append(f"{pad}else:")
        _stmt(s.els, depth + 1, lines)
    elif isinstance(s, Assert):
        lines.append(f"{pad}assert {_expr(s.cond, 0)}")
    elif isinstance(s, ProcDef):
        params = ", ".join(f"{n}: {t}" for n, t in s.params)
        lines.append(f"{pad}def {s.name}({params}):")
        _stmt(s.body, depth + 1, lines)
    elif isinstance(s, Call):
        lines.append(f"{pad}{s.name}({', '.join(_expr(a, 0) for a in s.args)})")
    elif isinstance(s, Hole):
        lines.append(f"{pad}<spec {s.slot}>")
    else:
        raise TypeError(f"cannot render {type(s).__name__}")
