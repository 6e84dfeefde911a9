"""Exact evaluation of specification expressions over finite domains.

Values are Fraction for every numeric type, bool, and tuples for
arrays.  Connectives evaluate left to right and short-circuit, so a
guarded formula like ``i < n /\\ a[i] = x`` never indexes out of
bounds.  Quantifiers enumerate the finite carrier that the domain
object supplies for the bound type.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Mapping

from .ast import (
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
    Store,
    Var,
)

Value = Fraction | bool | tuple
Valuation = Mapping[str, Value]


class EvalError(SpecError):
    pass


class DivisionByZero(EvalError):
    pass


class OutOfBounds(EvalError):
    pass


class MissingName(EvalError):
    pass


class NoDomain(EvalError):
    pass


def eval_spec(e: SpecExpr,
              valuation: Valuation,
              pre_state: Valuation | None = None,
              domains=None,
              defs: Mapping[str, Definition] | None = None) -> Value:
    """Value of e; Init subterms read pre_state, quantifiers enumerate
    the carriers of `domains` (an object with a ``carrier(ty)`` method)."""
    ev = _Eval(valuation, pre_state if pre_state is not None else valuation,
               domains, defs or {})
    return ev.eval(e, initial=False)


class _Eval:
    def __init__(self, cur, pre, domains, defs):
        self.cur = cur
        self.pre = pre
        self.domains = domains
        self.defs = defs
        self.locals: dict[str, Value] = {}

    def lookup(self, name, initial):
        if name in self.locals:
            return self.locals[name]
        state = self.pre if initial else self.cur
        if name in state:
            return state[name]
        # constants have one value in either state
        other = self.cur if initial else self.pre
        if name in other:
            return other[name]
        raise MissingName(f"no value for {name!r}")

    def eval(self, e: SpecExpr, initial: bool) -> Value:
        if isinstance(e, Num):
            return e.value
        if isinstance(e, BoolLit):
            return e.value
        if isinstance(e, (Var, ConstRef)):
            return self.lookup(e.name, initial)
        if isinstance(e, Init):
            return self.eval(e.expr, initial=True)
        if isinstance(e, Neg):
            return -self._num(e.expr, initial)
        if isinstance(e, Arith):
            left = self._num(e.left, initial)
            right = self._num(e.right, initial)
            if e.op == "+":
                return left + right
            if e.op == "-":
                return left - right
            if e.op == "*":
                return left * right
            if right == 0:
                raise DivisionByZero("division by zero")
            return left / right
        if isinstance(e, Rel):
            left = self.eval(e.left, initial)
            right = self.eval(e.right, initial)
            if e.op == "=":
                return left == right
            if e.op == "<>":
                return left != right
            if isinstance(left, bool) or isinstance(right, bool) or \
                    isinstance(left, tuple) or isinstance(right, tuple):
                raise EvalError(f"ordering {e.op!r} needs numeric operands")
            return {"<": left < right, "<=": left <= right,
                    ">": left > right, ">=": left >= right}[e.op]
        if isinstance(e, Not):
            return not self._bool(e.expr, initial)
        if isinstance(e, And):
            return self._bool(e.left, initial) and self._bool(e.right, initial)
        if isinstance(e, Or):
            return self._bool(e.left, initial) or self._bool(e.right, initial)
        if isinstance(e, Implies):
            return (not self._bool(e.left, initial)) or self._bool(e.right, initial)
        if isinstance(e, Quant):
            if self.domains is None:
                raise NoDomain(f"no domain for quantified {e.param.name}: {e.param.ty}")
            carrier = self.domains.carrier(e.param.ty, e.param.name)
            name = e.param.name
            saved = self.locals.get(name)
            had = name in self.locals
            try:
                if e.kind == "forall":
                    for value in carrier:
                        self.locals[name] = value
                        if not self._bool(e.body, initial):
                            return False
                    return True
                for value in carrier:
                    self.locals[name] = value
                    if self._bool(e.body, initial):
                        return True
                return False
            finally:
                if had:
                    self.locals[name] = saved
                else:
                    self.locals.pop(name, None)
        if isinstance(e, Select):
            arr = self._array(e.array, initial)
            idx = self._index(e.index, initial, len(arr))
            return arr[idx]
        if isinstance(e, SliceE):
            arr = self._array(e.array, initial)
            lo = self._int(e.lo, initial)
            hi = self._int(e.hi, initial)
            if lo > hi:
                raise OutOfBounds(f"slice bounds {lo} > {hi}")
            if lo < 0 or hi > len(arr):
                raise OutOfBounds(f"slice [{lo}:{hi}) outside length {len(arr)}")
            return arr[lo:hi]
        if isinstance(e, Store):
            arr = self._array(e.array, initial)
            idx = self._index(e.index, initial, len(arr))
            value = self.eval(e.value, initial)
            return arr[:idx] + (value,) + arr[idx + 1:]
        if isinstance(e, Len):
            return Fraction(len(self._array(e.array, initial)))
        if isinstance(e, PredApp):
            d = self.defs.get(e.name)
            if d is None:
                raise EvalError(f"unknown predicate {e.name!r}")
            args = [self.eval(a, initial) for a in e.args]
            inner = _Eval({p.name: v for p, v in zip(d.params, args)},
                          self.pre, self.domains, self.defs)
            inner.cur = dict(inner.cur)
            # definition bodies may also read declared constants
            for k, v in self.cur.items():
                inner.cur.setdefault(k, v)
            return inner.eval(d.body, initial=False)
        raise TypeError(f"cannot evaluate {type(e).__name__}")

    def _num(self, e, initial) -> Fraction:
        v = self.eval(e, initial)
        if isinstance(v, bool) or not isinstance(v, Fraction):
            raise EvalError("expected a numeric value")
        return v

    def _bool(self, e, initial) -> bool:
        v = self.eval(e, initial)
        if not isinstance(v, bool):
            raise EvalError("expected a boolean value")
        return v

    def _int(self, e, initial) -> int:
        v = self._num(e, initial)
        if v.denominator != 1:
            raise EvalError(f"expected an integer, got {v}")
        return int(v)

    def _index(self, e, initial, length) -> int:
        i = self._int(e, initial)
        if not 0 <= i < length:
            raise OutOfBounds(f"index {i} outside length {length}")
        return i

    def _array(self, e, initial) -> tuple:
        v = self.eval(e, initial)
        if not isinstance(v, tuple):
            raise EvalError("expected an array value")
        return v
