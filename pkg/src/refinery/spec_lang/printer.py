"""Canonical rendering of specification expressions.

Arithmetic is printed tightly (``x*x``, ``x+e``), relations and
connectives with spaces, so rendered formulas match the house style
``x*x <= N /\\ N < y*y``.  Output re-parses to a structurally equal AST.
"""

from __future__ import annotations

from fractions import Fraction

from .ast import (
    And,
    Arith,
    BoolLit,
    ConstRef,
    Implies,
    Init,
    Len,
    Neg,
    Not,
    Num,
    Or,
    PredApp,
    Quant,
    Rel,
    Select,
    SliceE,
    SpecExpr,
    Store,
    Var,
)

# precedence levels, loosest first
_QUANT, _IMPL, _OR, _AND, _NOT, _REL, _ADD, _MUL, _UNARY, _POST = range(10)


def render_spec_expr(e: SpecExpr) -> str:
    return _render(e, 0)


def _paren(text, level, minimum):
    return f"({text})" if level < minimum else text


def _render(e: SpecExpr, ctx: int) -> str:
    if isinstance(e, Num):
        # a rational literal parses like a division, a negative one like
        # a unary minus; both need parens in tighter contexts
        if e.value < 0:
            level = _ADD
        elif e.value.denominator != 1:
            level = _MUL
        else:
            level = _POST
        return _paren(_num(e.value), level, ctx)
    if isinstance(e, BoolLit):
        return "true" if e.value else "false"
    if isinstance(e, (Var, ConstRef)):
        return e.name
    if isinstance(e, Init):
        if isinstance(e.expr, (Var, ConstRef)):
            return f"{e.expr.name}_0"
        return f"({_render(e.expr, 0)})_0"
    if isinstance(e, Neg):
        return _paren(f"-{_render(e.expr, _UNARY)}", _UNARY, ctx)
    if isinstance(e, Arith):
        level = _MUL if e.op in ("*", "/") else _ADD
        left = _render(e.left, level)
        right = _render(e.right, level + 1)
        if e.op == "/" and _is_int_literal(e.left) and _is_int_literal(e.right):
            left = f"({left})"  # keep distinct from a rational literal
        return _paren(f"{left}{e.op}{right}", level, ctx)
    if isinstance(e, Rel):
        text = f"{_render(e.left, _ADD)} {e.op} {_render(e.right, _ADD)}"
        return _paren(text, _REL, ctx)
    if isinstance(e, Not):
        return _paren(f"~{_render(e.expr, _NOT)}", _NOT, ctx)
    if isinstance(e, And):
        text = f"{_render(e.left, _AND)} /\\ {_render(e.right, _NOT)}"
        return _paren(text, _AND, ctx)
    if isinstance(e, Or):
        text = f"{_render(e.left, _OR)} \\/ {_render(e.right, _AND)}"
        return _paren(text, _OR, ctx)
    if isinstance(e, Implies):
        text = f"{_render(e.left, _OR)} -> {_render(e.right, _IMPL)}"
        return _paren(text, _IMPL, ctx)
    if isinstance(e, Quant):
        text = f"{e.kind} ({e.param.name}:{e.param.ty}), {_render(e.body, _QUANT)}"
        return _paren(text, _QUANT, ctx)
    if isinstance(e, Select):
        return f"{_render(e.array, _POST)}[{_render(e.index, 0)}]"
    if isinstance(e, SliceE):
        return f"{_render(e.array, _POST)}[{_render(e.lo, 0)}:{_render(e.hi, 0)}]"
    if isinstance(e, Store):
        args = ", ".join(_render(a, 0) for a in (e.array, e.index, e.value))
        return f"store({args})"
    if isinstance(e, Len):
        return f"len({_render(e.array, 0)})"
    if isinstance(e, PredApp):
        return f"{e.name}({', '.join(_render(a, 0) for a in e.args)})"
    raise TypeError(f"cannot render {type(e).__name__}")


def _num(v: Fraction) -> str:
    if v.denominator == 1:
        return str(v.numerator)
    return f"{v.numerator}/{v.denominator}"


def _is_int_literal(e: SpecExpr) -> bool:
    return isinstance(e, Num) and e.value.denominator == 1
