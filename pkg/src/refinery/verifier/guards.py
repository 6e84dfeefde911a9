"""Division guards: every divisor in an obligation contributes a
``divisor <> 0`` hypothesis so the entailment is checked over total
arithmetic only.  Divisors mentioning quantifier-bound names stay
inside their quantifier and are handled by evaluation order instead.
"""

from __future__ import annotations

from ..spec_lang import (
    Arith,
    Num,
    Quant,
    Rel,
    SpecExpr,
    conj,
    conjuncts,
)
from ..refinement import ProofObligation


def division_guards(e: SpecExpr) -> list[SpecExpr]:
    out: list[SpecExpr] = []
    _collect(e, frozenset(), out)
    seen = set()
    unique = []
    for g in out:
        if g not in seen:
            seen.add(g)
            unique.append(g)
    return unique


def _collect(e: SpecExpr, bound: frozenset, out: list):
    if isinstance(e, Quant):
        _collect(e.body, bound | {e.param.name}, out)
        return
    if isinstance(e, Arith) and e.op == "/":
        divisor = e.right
        if isinstance(divisor, Num):
            pass  # literal divisors are nonzero by the parser
        else:
            from ..spec_lang import free_vars
            if not (free_vars(divisor) & bound):
                out.append(Rel("<>", divisor, Num(0)))
    for c in e.children():
        _collect(c, bound, out)


def guarded_sides(ob: ProofObligation) -> tuple[SpecExpr, SpecExpr]:
    """(hypothesis with division guards conjoined, conclusion)."""
    guards = division_guards(ob.hypothesis) + division_guards(ob.conclusion)
    if not guards:
        return ob.hypothesis, ob.conclusion
    merged = []
    for g in guards:
        if g not in merged:
            merged.append(g)
    return conj(merged + conjuncts(ob.hypothesis)), ob.conclusion
