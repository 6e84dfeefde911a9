"""Program language: AST, parser, printer, interpreter, test runner."""

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
    ProgError,
    ProgExpr,
    Seq,
    Statement,
    While,
    fill_holes,
    holes_in,
    seq_of,
)
from .cases import (
    CaseResult,
    CasesError,
    TestCase,
    TestReport,
    parse_bindings,
    parse_cases,
    parse_value,
    run_tests,
    value_type,
)
from .interp import (
    ASSERT_FAILED,
    COMPLETED,
    DEFAULT_STEP_LIMIT,
    STEP_LIMIT,
    BadIndex,
    DivByZero,
    InterpError,
    RunOutcome,
    UnboundVariable,
    UndefinedProcedure,
    interpret,
)
from .lift import negate_prog, prog_expr_to_spec, spec_expr_to_prog
from .parser import ProgParseError, parse_prog_expr, parse_program
from .printer import render_prog_expr, render_program

__all__ = [name for name in dir() if not name.startswith("_")]
