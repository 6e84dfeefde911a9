"""Parser for the program language: Python-style ``:`` blocks with
indentation, one statement per line.  ``#`` starts a comment."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .ast import (
    Assert,
    Assign,
    Call,
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
    ProgError,
    ProgExpr,
    Seq,
    Statement,
    While,
)


class ProgParseError(ProgError):
    def __init__(self, message, line=None):
        if line is not None:
            message = f"{message} at line {line}"
        super().__init__(message)
        self.line = line


_TWO_CHAR = ("==", "!=", "<=", ">=")
_ONE_CHAR = "<>=+-*/()[]:,"
_KEYWORDS = ("pass", "while", "if", "else", "assert", "def", "and", "or",
             "not", "true", "false", "True", "False")


def _tokenize_line(text: str, line_no: int) -> list[tuple[str, str]]:
    toks: list[tuple[str, str]] = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c == "#":
            break
        if c.isspace():
            i += 1
            continue
        if text[i:i + 2] in _TWO_CHAR:
            toks.append(("op", text[i:i + 2]))
            i += 2
            continue
        if c.isdigit():
            j = i
            while j < n and (text[j].isdigit() or text[j] == "."):
                j += 1
            toks.append(("num", text[i:j]))
            i = j
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            toks.append(("name", text[i:j]))
            i = j
            continue
        if c in _ONE_CHAR:
            toks.append(("op", c))
            i += 1
            continue
        raise ProgParseError(f"unexpected character {c!r}", line_no)
    return toks


@dataclass
class _Line:
    number: int
    indent: int
    toks: list


def _split_lines(text: str) -> list[_Line]:
    out = []
    for number, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        indent = len(raw) - len(raw.lstrip(" \t"))
        if "\t" in raw[:indent]:
            raise ProgParseError("tabs in indentation are not supported", number)
        toks = _tokenize_line(raw, number)
        if toks:
            out.append(_Line(number, indent, toks))
    return out


class _ExprParser:
    def __init__(self, toks, line_no):
        self.toks = toks
        self.pos = 0
        self.line_no = line_no

    def peek(self):
        if self.pos < len(self.toks):
            return self.toks[self.pos]
        return ("end", "")

    def advance(self):
        t = self.peek()
        self.pos += 1
        return t

    def expect(self, text):
        k, v = self.peek()
        if v != text:
            raise ProgParseError(f"expected {text!r}, found {v or 'end of line'!r}",
                                 self.line_no)
        return self.advance()

    def done(self):
        return self.pos >= len(self.toks)

    def expr(self) -> ProgExpr:
        return self.or_expr()

    def or_expr(self):
        left = self.and_expr()
        while self.peek() == ("name", "or"):
            self.advance()
            left = PBin("or", left, self.and_expr())
        return left

    def and_expr(self):
        left = self.not_expr()
        while self.peek() == ("name", "and"):
            self.advance()
            left = PBin("and", left, self.not_expr())
        return left

    def not_expr(self):
        if self.peek() == ("name", "not"):
            self.advance()
            return PNot(self.not_expr())
        return self.comparison()

    def comparison(self):
        left = self.arith()
        k, v = self.peek()
        if v in ("==", "!=", "<", "<=", ">", ">="):
            self.advance()
            return PBin(v, left, self.arith())
        return left

    def arith(self):
        left = self.term()
        while self.peek()[1] in ("+", "-"):
            op = self.advance()[1]
            left = PBin(op, left, self.term())
        return left

    def term(self):
        left, left_lit = self.factor()
        while self.peek()[1] in ("*", "/"):
            op = self.advance()[1]
            right, right_lit = self.factor()
            if op == "/" and left_lit and right_lit and \
                    isinstance(left, PNum) and isinstance(right, PNum):
                if right.value == 0:
                    raise ProgParseError("literal division by zero", self.line_no)
                left = PNum(left.value / right.value)
                left_lit = False
            else:
                left = PBin(op, left, right)
                left_lit = False
        return left

    def factor(self):
        if self.peek()[1] == "-":
            self.advance()
            inner, lit = self.factor()
            if isinstance(inner, PNum):
                return PNum(-inner.value), lit
            return PNeg(inner), False
        return self.atom()

    def atom(self):
        k, v = self.peek()
        if k == "num":
            self.advance()
            try:
                return PNum(Fraction(v)), True
            except ValueError:
                raise ProgParseError(f"bad numeral {v!r}", self.line_no) from None
        if v == "(":
            self.advance()
            e = self.expr()
            self.expect(")")
            return e, False
        if k == "name":
            self.advance()
            if v in ("true", "True"):
                return PBool(True), False
            if v in ("false", "False"):
                return PBool(False), False
            if self.peek()[1] == "[":
                self.advance()
                first = self.expr()
                if self.peek()[1] == ":":
                    self.advance()
                    second = self.expr()
                    self.expect("]")
                    return PSlice(v, first, second), False
                self.expect("]")
                return PIndex(v, first), False
            return PName(v), False
        raise ProgParseError(f"unexpected {v or 'end of line'!r}", self.line_no)


class _ProgParser:
    def __init__(self, lines):
        self.lines = lines
        self.pos = 0

    def peek(self):
        return self.lines[self.pos] if self.pos < len(self.lines) else None

    def block(self, indent: int) -> Statement:
        stmts = []
        while True:
            line = self.peek()
            if line is None or line.indent < indent:
                break
            if line.indent > indent:
                raise ProgParseError("unexpected indentation", line.number)
            stmts.append(self.statement(line))
        if not stmts:
            line = self.peek()
            raise ProgParseError("expected an indented block",
                                 line.number if line else None)
        if len(stmts) == 1:
            return stmts[0]
        return Seq(tuple(stmts))

    def child_block(self, parent: _Line) -> Statement:
        line = self.peek()
        if line is None or line.indent <= parent.indent:
            raise ProgParseError("expected an indented block", parent.number)
        return self.block(line.indent)

    def statement(self, line: _Line) -> Statement:
        self.pos += 1
        p = _ExprParser(line.toks, line.number)
        k, v = p.peek()
        if v == "pass":
            p.advance()
            self._end(p)
            return Pass(line=line.number)
        if v == "assert":
            p.advance()
            cond = p.expr()
            self._end(p)
            return Assert(cond, line=line.number)
        if v == "while":
            p.advance()
            cond = p.expr()
            p.expect(":")
            self._end(p)
            return While(cond, self.child_block(line), line=line.number)
        if v == "if":
            p.advance()
            cond = p.expr()
            p.expect(":")
            self._end(p)
            then = self.child_block(line)
            nxt = self.peek()
            if nxt is None or nxt.indent != line.indent or \
                    nxt.toks[:1] != [("name", "else")]:
                raise ProgParseError("if needs a matching else", line.number)
            self.pos += 1
            ep = _ExprParser(nxt.toks[1:], nxt.number)
            ep.expect(":")
            self._end(ep)
            return If(cond, then, self.child_block(line), line=line.number)
        if v == "def":
            p.advance()
            nk, name = p.advance()
            if nk != "name":
                raise ProgParseError("expected a procedure name", line.number)
            p.expect("(")
            params = []
            if p.peek()[1] != ")":
                while True:
                    pk, pname = p.advance()
                    if pk != "name":
                        raise ProgParseError("expected a parameter name", line.number)
                    p.expect(":")
                    ty_words = []
                    while p.peek()[0] == "name":
                        ty_words.append(p.advance()[1])
                        if ty_words[-1] != "array":
                            break
                    if not ty_words:
                        raise ProgParseError("expected a parameter type", line.number)
                    params.append((pname, " ".join(ty_words)))
                    if p.peek()[1] != ",":
                        break
                    p.advance()
            p.expect(")")
            p.expect(":")
            self._end(p)
            return ProcDef(name, tuple(params), self.child_block(line),
                           line=line.number)
        # assignment or call
        if k == "name":
            name = v
            p.advance()
            nxt = p.peek()[1]
            if nxt == "(":
                p.advance()
                args = []
                if p.peek()[1] != ")":
                    args.append(p.expr())
                    while p.peek()[1] == ",":
                        p.advance()
                        args.append(p.expr())
                p.expect(")")
                self._end(p)
                return Call(name, tuple(args), line=line.number)
            index = None
            if nxt == "[":
                p.advance()
                index = p.expr()
                p.expect("]")
            p.expect("=")
            expr = p.expr()
            self._end(p)
            return Assign(name, expr, index, line=line.number)
        raise ProgParseError(f"cannot parse statement starting with {v!r}",
                             line.number)

    @staticmethod
    def _end(p: _ExprParser):
        if not p.done():
            raise ProgParseError(f"trailing input {p.peek()[1]!r}", p.line_no)


def parse_program(text: str) -> Statement:
    lines = _split_lines(text)
    if not lines:
        return Pass()
    parser = _ProgParser(lines)
    stmt = parser.block(lines[0].indent)
    if parser.peek() is not None:
        raise ProgParseError("unexpected dedent", parser.peek().number)
    return stmt


def parse_prog_expr(text: str) -> ProgExpr:
    p = _ExprParser(_tokenize_line(text, 1), 1)
    e = p.expr()
    if not p.done():
        raise ProgParseError(f"trailing input {p.peek()[1]!r}", 1)
    return e
