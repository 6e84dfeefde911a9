"""AST for the While-style program language.

Expressions are side-effect free; statements cover pass, assignment
(plain or array-element), sequencing, while, if/else, assert, procedure
definition, and procedure call.  A Hole is an internal placeholder for
a not-yet-refined child fragment and never appears in a final program.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction


class ProgError(Exception):
    pass


# ---------------------------------------------------------------------------
# Expressions

CMP_OPS = ("==", "!=", "<", "<=", ">", ">=")
BOOL_OPS = ("and", "or")
ARITH_OPS = ("+", "-", "*", "/")


@dataclass(frozen=True)
class ProgExpr:
    def children(self) -> tuple["ProgExpr", ...]:
        return ()


@dataclass(frozen=True)
class PNum(ProgExpr):
    value: Fraction

    def __post_init__(self):
        object.__setattr__(self, "value", Fraction(self.value))


@dataclass(frozen=True)
class PBool(ProgExpr):
    value: bool


@dataclass(frozen=True)
class PName(ProgExpr):
    name: str


@dataclass(frozen=True)
class PBin(ProgExpr):
    op: str
    left: ProgExpr
    right: ProgExpr

    def __post_init__(self):
        if self.op not in CMP_OPS + BOOL_OPS + ARITH_OPS:
            raise ValueError(f"bad operator {self.op!r}")

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True)
class PNot(ProgExpr):
    expr: ProgExpr

    def children(self):
        return (self.expr,)


@dataclass(frozen=True)
class PNeg(ProgExpr):
    expr: ProgExpr

    def children(self):
        return (self.expr,)


@dataclass(frozen=True)
class PIndex(ProgExpr):
    base: str
    index: ProgExpr

    def children(self):
        return (self.index,)


@dataclass(frozen=True)
class PSlice(ProgExpr):
    base: str
    lo: ProgExpr
    hi: ProgExpr

    def children(self):
        return (self.lo, self.hi)


# ---------------------------------------------------------------------------
# Statements


@dataclass(frozen=True)
class Statement:
    line: int | None = field(default=None, compare=False, kw_only=True)


@dataclass(frozen=True)
class Pass(Statement):
    pass


@dataclass(frozen=True)
class Assign(Statement):
    target: str
    expr: ProgExpr
    index: ProgExpr | None = None  # set for a[i] = e


@dataclass(frozen=True)
class Seq(Statement):
    stmts: tuple[Statement, ...]

    def __post_init__(self):
        object.__setattr__(self, "stmts", tuple(self.stmts))


@dataclass(frozen=True)
class While(Statement):
    cond: ProgExpr
    body: Statement


@dataclass(frozen=True)
class If(Statement):
    cond: ProgExpr
    then: Statement
    els: Statement


@dataclass(frozen=True)
class Assert(Statement):
    cond: ProgExpr


@dataclass(frozen=True)
class ProcDef(Statement):
    name: str
    params: tuple[tuple[str, str], ...]  # (name, type text)
    body: Statement

    def __post_init__(self):
        object.__setattr__(self, "params", tuple(tuple(p) for p in self.params))


@dataclass(frozen=True)
class Call(Statement):
    name: str
    args: tuple[ProgExpr, ...]

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))


@dataclass(frozen=True)
class Hole(Statement):
    """Placeholder for an unrefined child specification (internal)."""

    slot: int


def seq_of(stmts) -> Statement:
    """Sequence of statements with unit passes removed and nested
    sequences flattened; skip is the identity of composition."""
    flat: list[Statement] = []
    for s in stmts:
        if isinstance(s, Seq):
            flat.extend(s.stmts)
        elif not isinstance(s, Pass):
            flat.append(s)
    if not flat:
        return Pass()
    if len(flat) == 1:
        return flat[0]
    return Seq(tuple(flat))


def holes_in(s: Statement) -> list[int]:
    out: list[int] = []
    _collect_holes(s, out)
    return out


def _collect_holes(s, out):
    if isinstance(s, Hole):
        out.append(s.slot)
    elif isinstance(s, Seq):
        for part in s.stmts:
            _collect_holes(part, out)
    elif isinstance(s, While):
        _collect_holes(s.body, out)
    elif isinstance(s, If):
        _collect_holes(s.then, out)
        _collect_holes(s.els, out)
    elif isinstance(s, ProcDef):
        _collect_holes(s.body, out)


def fill_holes(s: Statement, repl: dict[int, Statement]) -> Statement:
    if isinstance(s, Hole):
        return repl[s.slot]
    if isinstance(s, Seq):
        return seq_of([fill_holes(p, repl) for p in s.stmts])
    if isinstance(s, While):
        return While(s.cond, fill_holes(s.body, repl))
    if isinstance(s, If):
        return If(s.cond, fill_holes(s.then, repl), fill_holes(s.els, repl))
    if isinstance(s, ProcDef):
        return ProcDef(s.name, s.params, fill_holes(s.body, repl))
    return s
