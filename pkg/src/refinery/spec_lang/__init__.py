"""Specification language: AST, parser, printer, types, evaluation."""

from .ast import (
    BOOL,
    CHAR,
    CONSTANT,
    FALSE,
    FLOAT,
    INT,
    NAT,
    TRUE,
    VARIANT,
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
    SubstitutionError,
    TypedParam,
    Var,
    array_of,
    conj,
    conjuncts,
    free_vars,
    fresh_name,
    init_vars,
    mark_initial,
    num,
    parse_type,
    substitute,
    walk,
)
from .evaluate import (
    DivisionByZero,
    EvalError,
    MissingName,
    NoDomain,
    OutOfBounds,
    Valuation,
    Value,
    eval_spec,
)
from .parser import ParseError, UnknownIdentifier, parse_definition, parse_spec_expr
from .printer import render_spec_expr
from .typecheck import SpecTypeError, numeric_lub, type_check, type_errors, widens_to

__all__ = [name for name in dir() if not name.startswith("_")]
