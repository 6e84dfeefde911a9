"""Type checking for specification expressions.

Numeric widening is nat -> int -> float; relations compare numerically
compatible operands (or two booleans / two equal array types under
``=``/``<>``) and yield bool; connectives and quantifier bodies must be
bool.  Errors are collected per node rather than failing at the first.
"""

from __future__ import annotations

from typing import Mapping, Sequence

from .ast import (
    BOOL,
    FLOAT,
    INT,
    NAT,
    And,
    Arith,
    BoolLit,
    ConstRef,
    Definition,
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
    SpecError,
    SpecExpr,
    SpecType,
    Store,
    TypedParam,
    Var,
)


class SpecTypeError(SpecError):
    def __init__(self, errors: list[str]):
        super().__init__("; ".join(errors))
        self.errors = errors


_ORDER = {"nat": 0, "int": 1, "float": 2}


def widens_to(a: SpecType, b: SpecType) -> bool:
    """a is usable where b is expected."""
    if a == b:
        return True
    if a.is_numeric and b.is_numeric:
        return _ORDER[a.kind] <= _ORDER[b.kind]
    return False


def numeric_lub(a: SpecType, b: SpecType) -> SpecType | None:
    if not (a.is_numeric and b.is_numeric):
        return None
    return a if _ORDER[a.kind] >= _ORDER[b.kind] else b


class _Checker:
    def __init__(self, env, defs):
        self.env = {p.name: p.ty for p in env}
        self.defs = dict(defs) if defs else {}
        self.errors: list[str] = []

    def error(self, e: SpecExpr, msg: str):
        from .printer import render_spec_expr
        try:
            at = render_spec_expr(e)
        except Exception:
            at = type(e).__name__
        self.errors.append(f"{msg} (in `{at}`)")

    def check(self, e: SpecExpr) -> SpecType | None:
        if isinstance(e, Num):
            if e.value.denominator != 1:
                return FLOAT
            return NAT if e.value >= 0 else INT
        if isinstance(e, BoolLit):
            return BOOL
        if isinstance(e, (Var, ConstRef)):
            ty = self.env.get(e.name)
            if ty is None:
                self.error(e, f"undeclared name {e.name!r}")
            return ty
        if isinstance(e, Init):
            return self.check(e.expr)
        if isinstance(e, Neg):
            t = self.check(e.expr)
            if t is None:
                return None
            if not t.is_numeric:
                self.error(e, f"unary minus needs a numeric operand, got {t}")
                return None
            return FLOAT if t.kind == "float" else INT
        if isinstance(e, Arith):
            lt, rt = self.check(e.left), self.check(e.right)
            if lt is None or rt is None:
                return None
            lub = numeric_lub(lt, rt)
            if lub is None:
                self.error(e, f"arithmetic on non-numeric operands {lt} and {rt}")
                return None
            if e.op == "/":
                return FLOAT
            if e.op == "-" and lub == NAT:
                return INT
            return lub
        if isinstance(e, Rel):
            lt, rt = self.check(e.left), self.check(e.right)
            if lt is None or rt is None:
                return BOOL
            if numeric_lub(lt, rt) is not None:
                return BOOL
            if lt == rt and e.op in ("=", "<>"):
                return BOOL
            self.error(e, f"cannot compare {lt} with {rt} under {e.op!r}")
            return BOOL
        if isinstance(e, Not):
            self.expect_bool(e.expr, "negation operand")
            return BOOL
        if isinstance(e, (And, Or, Implies)):
            word = {And: "conjunct", Or: "disjunct", Implies: "implication side"}[type(e)]
            self.expect_bool(e.left, word)
            self.expect_bool(e.right, word)
            return BOOL
        if isinstance(e, Quant):
            saved = self.env.get(e.param.name)
            self.env[e.param.name] = e.param.ty
            self.expect_bool(e.body, "quantifier body")
            if saved is None:
                del self.env[e.param.name]
            else:
                self.env[e.param.name] = saved
            return BOOL
        if isinstance(e, Select):
            at = self.check(e.array)
            self.expect_index(e.index)
            if at is None:
                return None
            if at.kind != "array":
                self.error(e, f"select on non-array type {at}")
                return None
            return at.elem
        if isinstance(e, SliceE):
            at = self.check(e.array)
            self.expect_index(e.lo)
            self.expect_index(e.hi)
            if at is None:
                return None
            if at.kind != "array":
                self.error(e, f"slice on non-array type {at}")
                return None
            return at
        if isinstance(e, Store):
            at = self.check(e.array)
            self.expect_index(e.index)
            vt = self.check(e.value)
            if at is None:
                return None
            if at.kind != "array":
                self.error(e, f"store on non-array type {at}")
                return None
            if vt is not None and not widens_to(vt, at.elem):
                self.error(e, f"stored value type {vt} does not fit element type {at.elem}")
            return at
        if isinstance(e, Len):
            at = self.check(e.array)
            if at is not None and at.kind != "array":
                self.error(e, f"len on non-array type {at}")
            return NAT
        if isinstance(e, PredApp):
            d = self.defs.get(e.name)
            if d is None:
                self.error(e, f"unknown predicate {e.name!r}")
                return BOOL
            if len(e.args) != len(d.params):
                self.error(e, f"{e.name} takes {len(d.params)} argument(s)")
            for arg, p in zip(e.args, d.params):
                at = self.check(arg)
                if at is not None and not widens_to(at, p.ty):
                    self.error(e, f"argument {p.name} of {e.name} needs {p.ty}, got {at}")
            return BOOL
        raise TypeError(f"cannot type {type(e).__name__}")

    def expect_bool(self, e: SpecExpr, what: str):
        t = self.check(e)
        if t is not None and t != BOOL:
            self.error(e, f"{what} must be bool, got {t}")

    def expect_index(self, e: SpecExpr):
        t = self.check(e)
        if t is not None and t.kind not in ("nat", "int"):
            self.error(e, f"index must be nat or int, got {t}")


def type_check(e: SpecExpr,
               env: Sequence[TypedParam],
               defs: Mapping[str, Definition] | None = None) -> SpecType:
    """Type of e under env, or SpecTypeError carrying all mismatches."""
    c = _Checker(env, defs)
    ty = c.check(e)
    if c.errors:
        raise SpecTypeError(c.errors)
    assert ty is not None
    return ty


def type_errors(e: SpecExpr,
                env: Sequence[TypedParam],
                defs: Mapping[str, Definition] | None = None) -> list[str]:
    c = _Checker(env, defs)
    c.check(e)
    return c.errors
