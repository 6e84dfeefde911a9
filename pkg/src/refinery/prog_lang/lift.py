"""Lifting between program expressions and specification formulas.

Guards and assignment right-hand sides written in code must appear in
verification conditions, so the mapping is structural: ``==`` becomes
``=``, ``!=`` becomes ``<>``, and/or/not become the connectives.  The
reverse direction is partial (quantifiers and markers have no program
form) and is used to put variant expressions into emitted code.
"""

from __future__ import annotations

from ..spec_lang import ast as S
from .ast import (
    PBin,
    PBool,
    PIndex,
    PName,
    PNeg,
    PNot,
    PNum,
    PSlice,
    ProgError,
    ProgExpr,
)

_CMP_TO_REL = {"==": "=", "!=": "<>", "<": "<", "<=": "<=", ">": ">", ">=": ">="}
_REL_TO_CMP = {v: k for k, v in _CMP_TO_REL.items()}


def prog_expr_to_spec(e: ProgExpr, env=None) -> S.SpecExpr:
    """Structural map of a program expression into a formula/term.

    With env (name -> TypedParam) given, names resolve to constant or
    variant references; otherwise every name becomes a variant
    reference.
    """
    lookup = {p.name: p for p in env} if env else {}

    def ref(name: str) -> S.SpecExpr:
        p = lookup.get(name)
        if p is not None and p.kind == S.CONSTANT:
            return S.ConstRef(name)
        return S.Var(name)

    def go(e: ProgExpr) -> S.SpecExpr:
        if isinstance(e, PNum):
            return S.Num(e.value)
        if isinstance(e, PBool):
            return S.BoolLit(e.value)
        if isinstance(e, PName):
            return ref(e.name)
        if isinstance(e, PNeg):
            return S.Neg(go(e.expr))
        if isinstance(e, PNot):
            return S.Not(go(e.expr))
        if isinstance(e, PBin):
            if e.op == "and":
                return S.And(go(e.left), go(e.right))
            if e.op == "or":
                return S.Or(go(e.left), go(e.right))
            if e.op in _CMP_TO_REL:
                return S.Rel(_CMP_TO_REL[e.op], go(e.left), go(e.right))
            return S.Arith(e.op, go(e.left), go(e.right))
        if isinstance(e, PIndex):
            return S.Select(ref(e.base), go(e.index))
        if isinstance(e, PSlice):
            return S.SliceE(ref(e.base), go(e.lo), go(e.hi))
        raise TypeError(f"cannot lift {type(e).__name__}")

    return go(e)


def spec_expr_to_prog(e: S.SpecExpr) -> ProgExpr:
    """Partial inverse of prog_expr_to_spec; raises ProgError on
    constructs with no program form (quantifiers, Init, store, len)."""
    if isinstance(e, S.Num):
        return PNum(e.value)
    if isinstance(e, S.BoolLit):
        return PBool(e.value)
    if isinstance(e, (S.Var, S.ConstRef)):
        return PName(e.name)
    if isinstance(e, S.Neg):
        return PNeg(spec_expr_to_prog(e.expr))
    if isinstance(e, S.Not):
        return PNot(spec_expr_to_prog(e.expr))
    if isinstance(e, S.And):
        return PBin("and", spec_expr_to_prog(e.left), spec_expr_to_prog(e.right))
    if isinstance(e, S.Or):
        return PBin("or", spec_expr_to_prog(e.left), spec_expr_to_prog(e.right))
    if isinstance(e, S.Rel):
        return PBin(_REL_TO_CMP[e.op],
                    spec_expr_to_prog(e.left), spec_expr_to_prog(e.right))
    if isinstance(e, S.Arith):
        return PBin(e.op, spec_expr_to_prog(e.left), spec_expr_to_prog(e.right))
    if isinstance(e, S.Select):
        if not isinstance(e.array, (S.Var, S.ConstRef)):
            raise ProgError("program index needs a named array")
        return PIndex(e.array.name, spec_expr_to_prog(e.index))
    if isinstance(e, S.SliceE):
        if not isinstance(e.array, (S.Var, S.ConstRef)):
            raise ProgError("program slice needs a named array")
        return PSlice(e.array.name, spec_expr_to_prog(e.lo), spec_expr_to_prog(e.hi))
    raise ProgError(f"{type(e).__name__} has no program form")


def negate_prog(e: ProgExpr) -> ProgExpr:
    """not e, folding a toplevel comparison into its complement."""
    flip = {"==": "!=", "!=": "==", "<": ">=", "<=": ">", ">": "<=", ">=": "<"}
    if isinstance(e, PBin) and e.op in flip:
        return PBin(flip[e.op], e.left, e.right)
    if isinstance(e, PNot):
        return e.expr
    return PNot(e)
