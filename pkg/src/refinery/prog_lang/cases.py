"""Test cases for programs: parse a cases file, run each case through
the interpreter, and evaluate its check formula on the final state.

File format, one case per ``input:``/``check:`` pair::

    env: x: float, y: float        # optional, declares output variables
    input: N := 4, e := 1/2
    check: x*x <= N /\\ N < y*y /\\ y <= x+e

Input values are literals: rationals (``1/2``), booleans, and arrays
(``[1, 2, 3]``).  In a check, initial-value markers read the case's
input state.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from ..spec_lang import (
    BOOL,
    CONSTANT,
    FLOAT,
    EvalError,
    SpecError,
    SpecExpr,
    SpecType,
    TypedParam,
    array_of,
    eval_spec,
    parse_spec_expr,
    parse_type,
)
from .ast import ProgError, Statement
from .interp import DEFAULT_STEP_LIMIT, InterpError, interpret


class CasesError(ProgError):
    pass


@dataclass
class TestCase:
    inputs: dict
    check: SpecExpr
    source: str = ""


@dataclass
class CaseResult:
    index: int
    passed: bool
    message: str = ""


@dataclass
class TestReport:
    results: list[CaseResult] = field(default_factory=list)

    @property
    def passed(self):
        return sum(1 for r in self.results if r.passed)

    @property
    def total(self):
        return len(self.results)

    @property
    def ok(self):
        return all(r.passed for r in self.results)

    def render(self) -> str:
        lines = [f"case {r.index}: {'pass' if r.passed else 'FAIL'}"
                 + (f" ({r.message})" if r.message else "")
                 for r in self.results]
        lines.append(f"{self.passed}/{self.total} passed")
        return "\n".join(lines)


def parse_value(text: str):
    text = text.strip()
    if text == "true":
        return True
    if text == "false":
        return False
    if text.startswith("["):
        if not text.endswith("]"):
            raise CasesError(f"unterminated array literal {text!r}")
        inner = text[1:-1].strip()
        if not inner:
            return ()
        return tuple(parse_value(part) for part in _split_top(inner))
    try:
        return Fraction(text)
    except ValueError:
        raise CasesError(f"bad value literal {text!r}") from None


def _split_top(text: str) -> list[str]:
    parts, depth, start = [], 0, 0
    for i, c in enumerate(text):
        if c == "[":
            depth += 1
        elif c == "]":
            depth -= 1
        elif c == "," and depth == 0:
            parts.append(text[start:i])
            start = i + 1
    parts.append(text[start:])
    return parts


def value_type(v) -> SpecType:
    if isinstance(v, bool):
        return BOOL
    if isinstance(v, Fraction):
        return FLOAT
    if isinstance(v, tuple):
        elem = value_type(v[0]) if v else FLOAT
        return array_of(elem)
    raise CasesError(f"cannot type value {v!r}")


def parse_bindings(text: str) -> dict:
    out = {}
    for part in _split_top(text):
        name, sep, value = part.partition(":=")
        if not sep:
            raise CasesError(f"binding needs ':=' in {part.strip()!r}")
        out[name.strip()] = parse_value(value)
    return out


def parse_cases(text: str, extra_env: list[TypedParam] | None = None) -> list[TestCase]:
    env: list[TypedParam] = list(extra_env or [])
    declared = {p.name for p in env}
    cases: list[TestCase] = []
    pending: dict | None = None
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, rest = line.partition(":")
        if not sep:
            raise CasesError(f"expected 'key: value' at line {number}")
        key = key.strip()
        if key == "env":
            for part in _split_top(rest):
                name, s2, ty = part.partition(":")
                if not s2:
                    raise CasesError(f"env entry needs 'name: type' at line {number}")
                name = name.strip()
                if name not in declared:
                    env.append(TypedParam(name, parse_type(ty)))
                    declared.add(name)
        elif key == "input":
            if pending is not None:
                raise CasesError(f"input without a check before line {number}")
            pending = parse_bindings(rest)
            for name, value in pending.items():
                if name not in declared:
                    env.append(TypedParam(name, value_type(value), CONSTANT))
                    declared.add(name)
        elif key == "check":
            if pending is None:
                raise CasesError(f"check without an input at line {number}")
            # program outputs not declared in an env: section default to
            # float variants; a wrong name then fails at evaluation time
            for name in _mentioned_names(rest):
                if name not in declared:
                    env.append(TypedParam(name, FLOAT))
                    declared.add(name)
            try:
                check = parse_spec_expr(rest, env, check_types=False)
            except SpecError as exc:
                raise CasesError(f"bad check at line {number}: {exc}") from exc
            cases.append(TestCase(pending, check, source=rest.strip()))
            pending = None
        else:
            raise CasesError(f"unknown section {key!r} at line {number}")
    if pending is not None:
        raise CasesError("trailing input without a check")
    return cases


_RESERVED = {"forall", "exists", "true", "false", "len", "store",
             "bool", "nat", "int", "float", "array", "_0"}


def _mentioned_names(text: str) -> list[str]:
    from ..spec_lang.parser import tokenize
    names = []
    for tok in tokenize(text):
        if tok.kind != "name" or tok.text in _RESERVED:
            continue
        name = tok.text
        if name.endswith("_0") and len(name) > 2:
            name = name[:-2]
        if name not in names:
            names.append(name)
    return names


def _rationalize(v):
    if isinstance(v, float):
        return Fraction(v)
    if isinstance(v, tuple):
        return tuple(_rationalize(x) for x in v)
    return v


def run_tests(p: Statement,
              cases: list[TestCase],
              domains=None,
              step_limit: int = DEFAULT_STEP_LIMIT,
              float_mode: bool = False) -> TestReport:
    """Interpret p on each case's inputs and evaluate the check on the
    final state; interpreter errors count as case failures."""
    report = TestReport()
    for index, case in enumerate(cases):
        try:
            outcome = interpret(p, case.inputs, step_limit, float_mode)
        except InterpError as exc:
            report.results.append(CaseResult(index, False, f"runtime error: {exc}"))
            continue
        if not outcome.completed:
            report.results.append(
                CaseResult(index, False, f"program did not complete: {outcome.status}"))
            continue
        state = {k: _rationalize(v) for k, v in outcome.final.items()}
        pre = {k: _rationalize(v) for k, v in case.inputs.items()}
        try:
            holds = eval_spec(case.check, state, pre, domains)
        except EvalError as exc:
            report.results.append(CaseResult(index, False, f"check error: {exc}"))
            continue
        if holds:
            report.results.append(CaseResult(index, True))
        else:
            shown = ", ".join(f"{k}={v}" for k, v in sorted(state.items()))
            report.results.append(CaseResult(index, False, f"check false at {shown}"))
    return report
