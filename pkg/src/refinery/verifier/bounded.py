"""Bounded exhaustive checking: the independent oracle.

Every in-domain valuation of an obligation's free names (including the
initial-value snapshots) is enumerated in lexicographic name order;
Proved means no counterexample on the grid, Refuted returns the first
counterexample in enumeration order.  The only Unknown is an exceeded
enumeration budget.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass

from ..refinement import ProofObligation
from ..spec_lang import (
    EvalError,
    TypedParam,
    eval_spec,
    free_vars,
    init_vars,
)
from .domains import DomainSpec
from .guards import guarded_sides
from .results import PROVED, REFUTED, UNKNOWN, VcResult

DEFAULT_BUDGET = 10 ** 7


def obligation_axes(ob: ProofObligation) -> tuple[list[TypedParam], list[str]]:
    """(parameters to enumerate, variant names needing an init axis)."""
    mentioned = free_vars(ob.hypothesis) | free_vars(ob.conclusion)
    params = [p for p in ob.params if p.name in mentioned]
    inits = init_vars(ob.hypothesis) | init_vars(ob.conclusion)
    by_name = {p.name: p for p in ob.params}
    init_names = sorted(n for n in inits if n in by_name)
    return sorted(params, key=lambda p: p.name), init_names


def _init_key(domains: DomainSpec, name: str) -> str:
    """Override key for an init axis: ``x_0`` when present, else ``x``."""
    return f"{name}_0" if domains.override_for(f"{name}_0") is not None else name


def check_bounded(ob: ProofObligation,
                  domains: DomainSpec,
                  budget: int = DEFAULT_BUDGET,
                  defs=None) -> VcResult:
    started = time.monotonic()
    hyp, concl = guarded_sides(ob)
    params, init_names = obligation_axes(ob)
    by_name = {p.name: p for p in ob.params}

    size = 1
    for p in params:
        size *= domains.carrier_size(p.ty, p.name)
    for name in init_names:
        size *= domains.carrier_size(by_name[name].ty, _init_key(domains, name))
    if size > budget:
        return VcResult(UNKNOWN, "bounded",
                        reason=f"enumeration budget exceeded: {size} points",
                        elapsed=time.monotonic() - started)

    axes = [(p.name, False, list(domains.carrier(p.ty, p.name))) for p in params]
    axes += [(name, True,
              list(domains.carrier(by_name[name].ty, _init_key(domains, name))))
             for name in init_names]
    names = [(name, is_init) for name, is_init, _ in axes]

    for point in itertools.product(*(values for _, _, values in axes)):
        valuation = {}
        pre_state = {}
        for (name, is_init), value in zip(names, point):
            if is_init:
                pre_state[name] = value
            else:
                valuation[name] = value
        try:
            if not eval_spec(hyp, valuation, pre_state, domains, defs):
                continue
        except EvalError:
            continue  # hypothesis not establishable at this point
        falsified = False
        try:
            falsified = not eval_spec(concl, valuation, pre_state, domains, defs)
        except EvalError:
            falsified = True  # conclusion crashes where the hypothesis holds
        if falsified:
            cex = dict(valuation)
            cex.update({f"{name}_0": value for name, value in pre_state.items()})
            assert revalidates(ob, cex, domains, defs), \
                "bounded counterexample failed re-validation"
            return VcResult(REFUTED, "bounded", counterexample=cex,
                            elapsed=time.monotonic() - started)
    return VcResult(PROVED, "bounded", elapsed=time.monotonic() - started)


def revalidates(ob: ProofObligation, cex: dict, domains=None, defs=None) -> bool:
    """True iff the counterexample satisfies the (guarded) hypothesis
    and falsifies the conclusion under evaluation."""
    hyp, concl = guarded_sides(ob)
    valuation = {k: v for k, v in cex.items() if not k.endswith("_0")}
    pre_state = {k[:-2]: v for k, v in cex.items() if k.endswith("_0")}
    try:
        if not eval_spec(hyp, valuation, pre_state, domains, defs):
            return False
    except EvalError:
        return False
    try:
        return not eval_spec(concl, valuation, pre_state, domains, defs)
    except EvalError:
        return True
