"""Obligation discharge: bounded exhaustive checking and the external
SMT-LIB solver backend."""

from .bounded import DEFAULT_BUDGET, check_bounded, obligation_axes, revalidates
from .domains import DomainSpec, DomainError, parse_domains, render_domains
from .guards import division_guards, guarded_sides
from .results import PROVED, REFUTED, UNKNOWN, VcResult
from .smtlib import (
    UnsupportedSmt,
    emit_smtlib,
    ground_inits,
    model_to_valuation,
    parse_model,
)
from .solver import (
    SMT_CMD_ENV,
    SolverSpawnError,
    VerifyConfig,
    check,
    check_obligations,
    default_smt_cmd,
    preflight_smt,
    run_smt,
)

__all__ = [name for name in dir() if not name.startswith("_")]
