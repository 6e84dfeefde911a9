"""Recursive-descent parser for the specification language.

Concrete syntax: ASCII connectives ``/\\ \\/ ~ ->``, quantifiers
``forall (x:T), ...`` and ``exists (x:T), ...``, relations
``< <= = > >= <>``, array select ``a[i]`` and slice ``a[i:j]``,
initial-value markers ``x_0`` / ``(expr)_0``.

Chained relations (``a <= b < c``) are accepted and desugared into a
conjunction of adjacent comparisons.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

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
    TypedParam,
    Var,
    parse_type,
)


class ParseError(SpecError):
    def __init__(self, message, line=None, col=None):
        if line is not None:
            message = f"{message} at line {line}, column {col}"
        super().__init__(message)
        self.line = line
        self.col = col


class UnknownIdentifier(ParseError):
    def __init__(self, name, line=None, col=None):
        super().__init__(f"unknown identifier {name!r}", line, col)
        self.name = name


@dataclass(frozen=True)
class Token:
    kind: str  # num | name | op | end
    text: str
    line: int
    col: int


_TWO_CHAR = ("/\\", "\\/", "->", "<=", ">=", "<>")
_ONE_CHAR = "~<>=+-*/()[]:,"


def tokenize(text: str) -> list[Token]:
    toks: list[Token] = []
    i, line, col = 0, 1, 1
    n = len(text)
    while i < n:
        c = text[i]
        if c == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if c.isspace():
            i += 1
            col += 1
            continue
        two = text[i:i + 2]
        if two in _TWO_CHAR:
            toks.append(Token("op", two, line, col))
            i += 2
            col += 2
            continue
        if c.isdigit():
            j = i
            while j < n and (text[j].isdigit() or text[j] == "."):
                j += 1
            toks.append(Token("num", text[i:j], line, col))
            col += j - i
            i = j
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            toks.append(Token("name", text[i:j], line, col))
            col += j - i
            i = j
            continue
        if c in _ONE_CHAR:
            toks.append(Token("op", c, line, col))
            i += 1
            col += 1
            continue
        raise ParseError(f"unexpected character {c!r}", line, col)
    toks.append(Token("end", "", line, col))
    return toks


_REL_OPS = ("<", "<=", "=", ">", ">=", "<>")
_BUILTINS = ("len", "store")


class _Parser:
    def __init__(self, tokens, env, defs):
        self.toks = tokens
        self.pos = 0
        self.env = {p.name: p for p in env}
        self.defs = dict(defs) if defs else {}
        self.bound: list[str] = []

    def peek(self) -> Token:
        return self.toks[self.pos]

    def advance(self) -> Token:
        t = self.toks[self.pos]
        self.pos += 1
        return t

    def expect(self, text) -> Token:
        t = self.peek()
        if t.text != text:
            raise ParseError(f"expected {text!r}, found {t.text or 'end of input'!r}",
                             t.line, t.col)
        return self.advance()

    def fail(self, msg):
        t = self.peek()
        raise ParseError(msg, t.line, t.col)

    # precedence, loosest first: quantifier, ->, \/, /\, ~, relations, +-, */

    def expr(self) -> SpecExpr:
        t = self.peek()
        if t.kind == "name" and t.text in ("forall", "exists"):
            return self.quantified()
        return self.implication()

    def quantified(self) -> SpecExpr:
        kind = self.advance().text
        self.expect("(")
        name_tok = self.peek()
        if name_tok.kind != "name":
            self.fail("expected a bound variable name")
        name = self.advance().text
        self.expect(":")
        ty = self.type_ann()
        self.expect(")")
        self.expect(",")
        self.bound.append(name)
        try:
            body = self.expr()
        finally:
            self.bound.pop()
        return Quant(kind, TypedParam(name, ty), body)

    def type_ann(self):
        words = []
        while self.peek().kind == "name":
            words.append(self.advance().text)
            if words[-1] != "array":
                break
        if not words:
            self.fail("expected a type")
        try:
            return parse_type(" ".join(words))
        except SpecError as exc:
            t = self.peek()
            raise ParseError(str(exc), t.line, t.col) from exc

    def implication(self) -> SpecExpr:
        left = self.disjunction()
        if self.peek().text == "->":
            self.advance()
            t = self.peek()
            if t.kind == "name" and t.text in ("forall", "exists"):
                return Implies(left, self.quantified())
            return Implies(left, self.implication())
        return left

    def disjunction(self) -> SpecExpr:
        left = self.conjunction()
        while self.peek().text == "\\/":
            self.advance()
            left = Or(left, self.conjunction())
        return left

    def conjunction(self) -> SpecExpr:
        left = self.negation()
        while self.peek().text == "/\\":
            self.advance()
            left = And(left, self.negation())
        return left

    def negation(self) -> SpecExpr:
        if self.peek().text == "~":
            self.advance()
            return Not(self.negation())
        return self.relation()

    def relation(self) -> SpecExpr:
        operands = [self.arith()]
        ops = []
        while self.peek().text in _REL_OPS:
            ops.append(self.advance().text)
            operands.append(self.arith())
        if not ops:
            return operands[0]
        rels = [Rel(op, operands[i], operands[i + 1]) for i, op in enumerate(ops)]
        out = rels[0]
        for r in rels[1:]:
            out = And(out, r)
        return out

    def arith(self) -> SpecExpr:
        left = self.term()
        while self.peek().text in ("+", "-"):
            op = self.advance().text
            left = Arith(op, left, self.term())
        return left

    def term(self) -> SpecExpr:
        left, left_lit = self.factor()
        while self.peek().text in ("*", "/"):
            op = self.advance().text
            right, right_lit = self.factor()
            # a bare numeral quotient is an exact rational literal
            if op == "/" and left_lit and right_lit and \
                    isinstance(left, Num) and isinstance(right, Num):
                if right.value == 0:
                    self.fail("literal division by zero")
                left = Num(left.value / right.value)
                left_lit = False
            else:
                left = Arith(op, left, right)
                left_lit = False
        return left

    def factor(self) -> tuple[SpecExpr, bool]:
        """Returns (expr, came-from-a-(possibly negated)-numeral-token)."""
        if self.peek().text == "-":
            self.advance()
            inner, lit = self.factor()
            if isinstance(inner, Num):
                return Num(-inner.value), lit
            return Neg(inner), False
        return self.postfix()

    def postfix(self) -> tuple[SpecExpr, bool]:
        e, lit = self.atom()
        while True:
            t = self.peek()
            if t.text == "[":
                self.advance()
                first = self.expr()
                if self.peek().text == ":":
                    self.advance()
                    second = self.expr()
                    self.expect("]")
                    e = SliceE(e, first, second)
                else:
                    self.expect("]")
                    e = Select(e, first)
                lit = False
            elif t.kind == "name" and t.text == "_0":
                self.advance()
                e = Init(e)
                lit = False
            else:
                return e, lit

    def atom(self) -> tuple[SpecExpr, bool]:
        t = self.peek()
        if t.kind == "num":
            self.advance()
            try:
                value = Fraction(t.text)
            except ValueError:
                raise ParseError(f"bad numeral {t.text!r}", t.line, t.col) from None
            return Num(value), True
        if t.text == "(":
            self.advance()
            e = self.expr()
            self.expect(")")
            return e, False
        if t.kind == "name":
            self.advance()
            return self.name_ref(t), False
        self.fail(f"unexpected {t.text or 'end of input'!r}")

    def name_ref(self, t: Token) -> SpecExpr:
        name = t.text
        if name == "true":
            return BoolLit(True)
        if name == "false":
            return BoolLit(False)
        if self.peek().text == "(" and (name in _BUILTINS or name in self.defs):
            return self.application(t)
        if name.endswith("_0") and len(name) > 2:
            base = name[:-2]
            if base in self.bound or base in self.env:
                return Init(self.resolve(base, t))
        return self.resolve(name, t)

    def resolve(self, name, t: Token) -> SpecExpr:
        if name in self.bound:
            return Var(name)
        p = self.env.get(name)
        if p is None:
            raise UnknownIdentifier(name, t.line, t.col)
        return ConstRef(name) if p.kind == "constant" else Var(name)

    def application(self, t: Token) -> SpecExpr:
        name = t.text
        self.expect("(")
        args = [self.expr()]
        while self.peek().text == ",":
            self.advance()
            args.append(self.expr())
        self.expect(")")
        if name == "len":
            if len(args) != 1:
                raise ParseError("len takes one argument", t.line, t.col)
            return Len(args[0])
        if name == "store":
            if len(args) != 3:
                raise ParseError("store takes three arguments", t.line, t.col)
            return Store(args[0], args[1], args[2])
        d = self.defs[name]
        if len(args) != len(d.params):
            raise ParseError(
                f"{name} takes {len(d.params)} argument(s), got {len(args)}",
                t.line, t.col)
        return PredApp(name, tuple(args))


def parse_spec_expr(text: str,
                    env: Sequence[TypedParam],
                    defs: Mapping[str, Definition] | None = None,
                    check_types: bool = True) -> SpecExpr:
    """Parse text into a SpecExpr; every free name must be declared in env."""
    p = _Parser(tokenize(text), env, defs)
    e = p.expr()
    t = p.peek()
    if t.kind != "end":
        raise ParseError(f"trailing input {t.text!r}", t.line, t.col)
    if check_types:
        from .typecheck import type_check
        type_check(e, env, defs)
    return e


def parse_definition(text: str,
                     env: Sequence[TypedParam],
                     defs: Mapping[str, Definition] | None = None) -> Definition:
    """Parse ``name (p:T) (q:T) := expr`` into a Definition.

    The body may reference env names and earlier definitions, never the
    definition itself (recursion is rejected by construction).
    """
    head, sep, body_text = text.partition(":=")
    if not sep:
        raise ParseError(f"definition needs ':=' in {text!r}")
    toks = tokenize(head)
    pos = 0
    if toks[pos].kind != "name":
        raise ParseError("definition needs a name", toks[pos].line, toks[pos].col)
    name = toks[pos].text
    pos += 1
    params = []
    while toks[pos].text == "(":
        pos += 1
        if toks[pos].kind != "name":
            raise ParseError("expected parameter name", toks[pos].line, toks[pos].col)
        pname = toks[pos].text
        pos += 1
        if toks[pos].text != ":":
            raise ParseError("expected ':'", toks[pos].line, toks[pos].col)
        pos += 1
        words = []
        while toks[pos].kind == "name":
            words.append(toks[pos].text)
            pos += 1
            if words[-1] != "array":
                break
        ty = parse_type(" ".join(words))
        if toks[pos].text != ")":
            raise ParseError("expected ')'", toks[pos].line, toks[pos].col)
        pos += 1
        params.append(TypedParam(pname, ty))
    if toks[pos].kind != "end":
        raise ParseError(f"trailing input {toks[pos].text!r} in definition head",
                         toks[pos].line, toks[pos].col)
    body_env = list(env) + params
    body = parse_spec_expr(body_text, body_env, defs)
    return Definition(name, tuple(params), body)
