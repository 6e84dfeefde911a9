"""AST for the specification language: first-order formulas and terms
over rationals, booleans, and arrays, with initial-value markers.

All nodes are immutable; structural equality is the notion of identity
used by round-trip and golden tests.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Mapping, Sequence


class SpecError(Exception):
    """Base class for specification-language errors."""


class SubstitutionError(SpecError):
    pass


# ---------------------------------------------------------------------------
# Types


@dataclass(frozen=True)
class SpecType:
    kind: str                       # bool | nat | int | float | char | array
    elem: "SpecType | None" = None  # set iff kind == "array"

    def __post_init__(self):
        if self.kind == "array" and self.elem is None:
            raise ValueError("array type needs an element type")
        if self.kind != "array" and self.elem is not None:
            raise ValueError(f"{self.kind} type carries no element type")

    def __str__(self):
        if self.kind == "array":
            return f"array {self.elem}"
        return self.kind

    @property
    def is_numeric(self):
        return self.kind in ("nat", "int", "float")


BOOL = SpecType("bool")
NAT = SpecType("nat")
INT = SpecType("int")
FLOAT = SpecType("float")
CHAR = SpecType("char")


def array_of(elem: SpecType) -> SpecType:
    return SpecType("array", elem)


def parse_type(text: str) -> SpecType:
    """Parse a type name: bool, nat, int, float, or (nested) array T."""
    words = text.replace("(", " ").replace(")", " ").split()
    if not words:
        raise SpecError("empty type")
    return _parse_type_words(words, 0, text)


def _parse_type_words(words, i, src):
    if i >= len(words):
        raise SpecError(f"truncated type: {src!r}")
    w = words[i]
    if w == "array":
        elem = _parse_type_words(words, i + 1, src)
        return array_of(elem)
    base = {"bool": BOOL, "nat": NAT, "int": INT, "float": FLOAT, "Z": INT,
            "char": CHAR}.get(w)
    if base is None:
        raise SpecError(f"unknown type {w!r} in {src!r}")
    if i != len(words) - 1 and w != "array":
        # only the array constructor may be followed by more words
        if words[i + 1:]:
            raise SpecError(f"trailing words after type {w!r} in {src!r}")
    return base


VARIANT = "variant"
CONSTANT = "constant"


@dataclass(frozen=True)
class TypedParam:
    name: str
    ty: SpecType
    kind: str = VARIANT  # variant | constant

    def __post_init__(self):
        if not self.name:
            raise ValueError("parameter name must be nonempty")
        if self.kind not in (VARIANT, CONSTANT):
            raise ValueError(f"bad parameter kind {self.kind!r}")

    def __str__(self):
        return f"{self.name}: {self.ty}"


# ---------------------------------------------------------------------------
# Expressions


@dataclass(frozen=True)
class SpecExpr:
    def children(self) -> tuple["SpecExpr", ...]:
        return ()


@dataclass(frozen=True)
class Num(SpecExpr):
    value: Fraction

    def __post_init__(self):
        object.__setattr__(self, "value", Fraction(self.value))


@dataclass(frozen=True)
class BoolLit(SpecExpr):
    value: bool


@dataclass(frozen=True)
class Var(SpecExpr):
    name: str


@dataclass(frozen=True)
class ConstRef(SpecExpr):
    name: str


@dataclass(frozen=True)
class Init(SpecExpr):
    """Initial-value marker: the wrapped expression read in the pre-state."""

    expr: SpecExpr

    def children(self):
        return (self.expr,)


@dataclass(frozen=True)
class Neg(SpecExpr):
    expr: SpecExpr

    def children(self):
        return (self.expr,)


ARITH_OPS = ("+", "-", "*", "/")
REL_OPS = ("<", "<=", "=", ">", ">=", "<>")


@dataclass(frozen=True)
class Arith(SpecExpr):
    op: str
    left: SpecExpr
    right: SpecExpr

    def __post_init__(self):
        if self.op not in ARITH_OPS:
            raise ValueError(f"bad arithmetic operator {self.op!r}")

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True)
class Rel(SpecExpr):
    op: str
    left: SpecExpr
    right: SpecExpr

    def __post_init__(self):
        if self.op not in REL_OPS:
            raise ValueError(f"bad relational operator {self.op!r}")

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True)
class Not(SpecExpr):
    expr: SpecExpr

    def children(self):
        return (self.expr,)


@dataclass(frozen=True)
class And(SpecExpr):
    left: SpecExpr
    right: SpecExpr

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True)
class Or(SpecExpr):
    left: SpecExpr
    right: SpecExpr

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True)
class Implies(SpecExpr):
    left: SpecExpr
    right: SpecExpr

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True)
class Quant(SpecExpr):
    kind: str  # forall | exists
    param: TypedParam
    body: SpecExpr

    def __post_init__(self):
        if self.kind not in ("forall", "exists"):
            raise ValueError(f"bad quantifier {self.kind!r}")

    def children(self):
        return (self.body,)


@dataclass(frozen=True)
class Select(SpecExpr):
    array: SpecExpr
    index: SpecExpr

    def children(self):
        return (self.array, self.index)


@dataclass(frozen=True)
class SliceE(SpecExpr):
    """Half-open slice array[lo:hi)."""

    array: SpecExpr
    lo: SpecExpr
    hi: SpecExpr

    def children(self):
        return (self.array, self.lo, self.hi)


@dataclass(frozen=True)
class Store(SpecExpr):
    """Functional array update: the array with index mapped to value."""

    array: SpecExpr
    index: SpecExpr
    value: SpecExpr

    def children(self):
        return (self.array, self.index, self.value)


@dataclass(frozen=True)
class Len(SpecExpr):
    array: SpecExpr

    def children(self):
        return (self.array,)


@dataclass(frozen=True)
class PredApp(SpecExpr):
    """Application of a named condition definition."""

    name: str
    args: tuple[SpecExpr, ...]

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))

    def children(self):
        return self.args


TRUE = BoolLit(True)
FALSE = BoolLit(False)


def num(v) -> Num:
    return Num(Fraction(v))


def conj(parts: Sequence[SpecExpr]) -> SpecExpr:
    """Left-nested conjunction of parts (the parser's associativity);
    TRUE when empty."""
    parts = list(parts)
    if not parts:
        return TRUE
    out = parts[0]
    for p in parts[1:]:
        out = And(out, p)
    return out


def conjuncts(e: SpecExpr) -> list[SpecExpr]:
    """Flatten nested conjunctions into a list."""
    if isinstance(e, And):
        return conjuncts(e.left) + conjuncts(e.right)
    return [e]


def walk(e: SpecExpr) -> Iterator[SpecExpr]:
    yield e
    for c in e.children():
        yield from walk(c)


@dataclass(frozen=True)
class Definition:
    """A named, non-recursive condition: name(params) := body."""

    name: str
    params: tuple[TypedParam, ...]
    body: SpecExpr

    def __post_init__(self):
        object.__setattr__(self, "params", tuple(self.params))
        if self.name in {n.name for n in self.params}:
            raise SpecError(f"definition {self.name!r} shadows a parameter")


# ---------------------------------------------------------------------------
# Name analysis


def free_vars(e: SpecExpr) -> set[str]:
    """All free names (variants and constants); bound names excluded.

    Names under an Init marker count as free occurrences of the
    underlying name.
    """
    out: set[str] = set()
    _free(e, frozenset(), out)
    return out


def _free(e: SpecExpr, bound: frozenset, out: set):
    if isinstance(e, (Var, ConstRef)):
        if e.name not in bound:
            out.add(e.name)
    elif isinstance(e, Quant):
        _free(e.body, bound | {e.param.name}, out)
    else:
        for c in e.children():
            _free(c, bound, out)


def init_vars(e: SpecExpr) -> set[str]:
    """Free names occurring under an Init marker."""
    out: set[str] = set()
    for node in walk(e):
        if isinstance(node, Init):
            out |= free_vars(node.expr)
    return out


def fresh_name(base: str, used: set[str]) -> str:
    """base with the smallest positive integer suffix not in used."""
    i = 1
    while f"{base}{i}" in used:
        i += 1
    return f"{base}{i}"


def mark_initial(e: SpecExpr, variants: set[str]) -> SpecExpr:
    """Wrap every free occurrence of a variant in an Init marker.

    Used to build V_0 from a variant expression V: constants keep their
    current (only) value, variants are read in the pre-state.
    """
    return _mark(e, variants, frozenset())


def _mark(e, variants, bound):
    if isinstance(e, Var):
        if e.name in variants and e.name not in bound:
            return Init(e)
        return e
    if isinstance(e, Init):
        return e  # already pre-state; no double wrapping
    if isinstance(e, Quant):
        return Quant(e.kind, e.param, _mark(e.body, variants, bound | {e.param.name}))
    return _rebuild(e, tuple(_mark(c, variants, bound) for c in e.children()))


def _rebuild(e: SpecExpr, kids: tuple[SpecExpr, ...]) -> SpecExpr:
    """Reconstruct a node with new children in order."""
    if isinstance(e, Init):
        return Init(kids[0])
    if isinstance(e, Neg):
        return Neg(kids[0])
    if isinstance(e, Arith):
        return Arith(e.op, kids[0], kids[1])
    if isinstance(e, Rel):
        return Rel(e.op, kids[0], kids[1])
    if isinstance(e, Not):
        return Not(kids[0])
    if isinstance(e, And):
        return And(kids[0], kids[1])
    if isinstance(e, Or):
        return Or(kids[0], kids[1])
    if isinstance(e, Implies):
        return Implies(kids[0], kids[1])
    if isinstance(e, Quant):
        return Quant(e.kind, e.param, kids[0])
    if isinstance(e, Select):
        return Select(kids[0], kids[1])
    if isinstance(e, SliceE):
        return SliceE(kids[0], kids[1], kids[2])
    if isinstance(e, Store):
        return Store(kids[0], kids[1], kids[2])
    if isinstance(e, Len):
        return Len(kids[0])
    if isinstance(e, PredApp):
        return PredApp(e.name, kids)
    if not kids:
        return e
    raise AssertionError(f"unhandled node {type(e).__name__}")


# ---------------------------------------------------------------------------
# Substitution


def substitute(e: SpecExpr, bindings: Mapping[str, SpecExpr] | Sequence[tuple[str, SpecExpr]]) -> SpecExpr:
    """Simultaneous capture-avoiding substitution of variants.

    Init subtrees are left untouched: they denote pre-state values and a
    substitution speaks only about the current state.  Bound variables
    that would capture a free name of a replacement are renamed with the
    smallest fresh integer suffix.
    """
    if not isinstance(bindings, Mapping):
        bindings = dict(bindings)
    if not bindings:
        return e
    for target in bindings:
        if _occurs_as_constant(e, target):
            raise SubstitutionError(f"cannot substitute constant {target!r}")
    repl_free: set[str] = set()
    for r in bindings.values():
        repl_free |= free_vars(r)
    return _subst(e, dict(bindings), repl_free)


def _occurs_as_constant(e: SpecExpr, name: str) -> bool:
    return any(isinstance(n, ConstRef) and n.name == name for n in walk(e))


def _subst(e: SpecExpr, bindings: dict, repl_free: set[str]) -> SpecExpr:
    if isinstance(e, Var):
        return bindings.get(e.name, e)
    if isinstance(e, Init):
        return e
    if isinstance(e, Quant):
        inner = {k: v for k, v in bindings.items() if k != e.param.name}
        if not inner:
            return e
        param, body = e.param, e.body
        if param.name in repl_free:
            used = free_vars(body) | repl_free | set(inner)
            new_name = fresh_name(param.name, used)
            body = _subst(body, {param.name: Var(new_name)}, {new_name})
            param = TypedParam(new_name, param.ty, param.kind)
        return Quant(e.kind, param, _subst(body, inner, repl_free))
    kids = e.children()
    if not kids:
        return e
    return _rebuild(e, tuple(_subst(c, bindings, repl_free) for c in kids))
