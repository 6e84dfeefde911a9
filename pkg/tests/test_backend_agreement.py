"""Backend agreement: on a generated suite of small obligations, the
SMT backend and the bounded checker never contradict each other where
both are definitive, and every refutation's counterexample
re-validates.  When the solver refutes, the bounded domain is extended
to contain the reported model before comparing."""

import random
from fractions import Fraction

from refinery.refinement import ProofObligation
from refinery.spec_lang import (
    CONSTANT,
    FLOAT,
    INT,
    And,
    Arith,
    BoolLit,
    ConstRef,
    Implies,
    Not,
    Num,
    Or,
    Rel,
    TypedParam,
    Var,
    free_vars,
)
from refinery.verifier import (
    DomainSpec,
    VerifyConfig,
    check_bounded,
    revalidates,
    run_smt,
)

ENV = (TypedParam("u", INT), TypedParam("v", INT),
       TypedParam("w", FLOAT), TypedParam("K", INT, CONSTANT))

BASE = DomainSpec(int_range=(-2, 2),
                  float_grid=tuple(Fraction(x) for x in
                                   ("0", "1", "-1", "1/2", "-1/2", "2")))


def gen_term(rng, depth):
    if depth == 0 or rng.random() < 0.4:
        choice = rng.randrange(5)
        if choice == 0:
            return Num(Fraction(rng.randint(-3, 3)))
        if choice == 1:
            return Num(Fraction(rng.randint(-3, 3), rng.randint(1, 3)))
        return rng.choice([Var("u"), Var("v"), Var("w"), ConstRef("K")])
    op = rng.choice(["+", "-", "*"])
    return Arith(op, gen_term(rng, depth - 1), gen_term(rng, depth - 1))


def gen_formula(rng, depth):
    if depth == 0 or rng.random() < 0.5:
        op = rng.choice(["<", "<=", "=", ">", ">=", "<>"])
        return Rel(op, gen_term(rng, 2), gen_term(rng, 2))
    kind = rng.randrange(4)
    if kind == 0:
        return Not(gen_formula(rng, depth - 1))
    if kind == 1:
        return And(gen_formula(rng, depth - 1), gen_formula(rng, depth - 1))
    if kind == 2:
        return Or(gen_formula(rng, depth - 1), gen_formula(rng, depth - 1))
    return Implies(gen_formula(rng, depth - 1), gen_formula(rng, depth - 1))


def gen_obligation(rng, index):
    return ProofObligation(f"rand-{index}", gen_formula(rng, 2),
                           gen_formula(rng, 2), ENV)


def domain_containing(model: dict) -> DomainSpec:
    domains = BASE
    for name, value in model.items():
        base = name[:-2] if name.endswith("_0") else name
        param = next((p for p in ENV if p.name == base), None)
        if param is None:
            continue
        current = list(domains.carrier(param.ty, name))
        if value not in current:
            domains = domains.with_values(name, current + [value])
    return domains


def test_backend_agreement_on_random_suite():
    rng = random.Random(20240817)
    config = VerifyConfig(domains=BASE, smt_timeout=15.0)
    total = definitive_pairs = smt_definitive = refuted = 0
    contradictions = []
    while total < 60:
        ob = gen_obligation(rng, total)
        total += 1
        smt = run_smt(ob, config)
        if smt.status == "refuted":
            assert revalidates(ob, smt.counterexample), ob.render()
            refuted += 1
            bounded = check_bounded(ob, domain_containing(smt.counterexample))
        else:
            bounded = check_bounded(ob, BASE)
        if bounded.status == "refuted":
            assert revalidates(ob, bounded.counterexample), ob.render()
        if smt.status in ("proved", "refuted"):
            smt_definitive += 1
            if bounded.status in ("proved", "refuted"):
                definitive_pairs += 1
                if smt.status != bounded.status:
                    contradictions.append(
                        (ob.render(), smt.status, bounded.status))
    assert total >= 50
    assert contradictions == []
    # the suite must actually exercise both verdicts
    assert smt_definitive >= 25, f"only {smt_definitive} definitive SMT answers"
    assert refuted >= 5, f"only {refuted} refutations generated"
