"""The bundled corpus: every problem refines with its own script, its
extracted program matches the pinned golden, and (law soundness, checked
exhaustively) every in-domain input satisfying the precondition runs to
a state satisfying the postcondition."""

import itertools
import json
import random
import time
from fractions import Fraction

import pytest

from refinery.frontends.evalharness import load_problem_domains, problem_paths
from refinery.oracle import ScriptedOracle, drive_refinement
from refinery.prog_lang import interpret, parse_cases, parse_program, run_tests
from refinery.refinement import SpecTree, parse_spec_file
from refinery.spec_lang import EvalError, eval_spec
from refinery.verifier import VerifyConfig

from conftest import CORPUS

PROBLEMS = [p.stem for p in problem_paths(CORPUS)]

MAX_INPUT_POINTS = 10 ** 4


def refine_problem(name):
    spec_path = CORPUS / f"{name}.spec"
    spec = parse_spec_file(spec_path.read_text())
    config = load_problem_domains(spec_path, VerifyConfig())
    tree = SpecTree(spec.statement, defs=spec.defs_map)
    oracle = ScriptedOracle((CORPUS / f"{name}.refine").read_text())
    report = drive_refinement(tree, oracle, config)
    return spec, config, tree, report


@pytest.fixture(scope="module")
def refined():
    out = {}
    for name in PROBLEMS:
        spec, config, tree, report = refine_problem(name)
        assert report.fully_refined, f"{name}: {report.detail}"
        out[name] = (spec, config, tree)
    return out


class TestCorpusRefinement:
    def test_ten_problems_present(self):
        assert len(PROBLEMS) == 10

    @pytest.mark.parametrize("name", PROBLEMS)
    def test_program_matches_golden(self, refined, name):
        _, _, tree = refined[name]
        want = parse_program((CORPUS / f"{name}.golden").read_text())
        assert tree.extract_program() == want

    @pytest.mark.parametrize("name", PROBLEMS)
    def test_all_obligations_proved(self, refined, name):
        _, _, tree = refined[name]
        for node in tree.nodes.values():
            for ob in node.obligations:
                assert ob.status == "proved", (name, ob.label, ob.reason)

    @pytest.mark.parametrize("name", PROBLEMS)
    def test_bundled_cases_pass(self, refined, name):
        spec, config, tree = refined[name]
        cases = parse_cases((CORPUS / f"{name}.tests").read_text(),
                            list(spec.statement.env))
        report = run_tests(tree.extract_program(), cases,
                           domains=config.domains)
        assert report.ok, report.render()


def input_points(spec, config):
    """Every in-domain valuation of the statement's environment, in a
    deterministic order, capped at the soundness-suite budget."""
    params = list(spec.statement.env)
    axes = [list(config.domains.carrier(p.ty, p.name)) for p in params]
    total = 1
    for axis in axes:
        total *= len(axis)
    assert total <= MAX_INPUT_POINTS, f"{total} input points exceed the budget"
    for combo in itertools.product(*axes):
        yield dict(zip((p.name for p in params), combo))


class TestSoundness:
    @pytest.mark.parametrize("name", PROBLEMS)
    def test_every_in_domain_input_satisfies_post(self, refined, name):
        spec, config, tree = refined[name]
        program = tree.extract_program()
        defs = spec.defs_map
        stmt = spec.statement
        started = time.monotonic()
        ran = 0
        for inputs in input_points(spec, config):
            try:
                if not eval_spec(stmt.pre, inputs, inputs,
                                 config.domains, defs):
                    continue
            except EvalError:
                continue
            outcome = interpret(program, inputs, step_limit=100_000)
            assert outcome.completed, (name, inputs, outcome.status)
            assert eval_spec(stmt.post, outcome.final, inputs,
                             config.domains, defs) is True, (name, inputs)
            ran += 1
        assert ran > 0, f"{name}: no in-domain input satisfied the pre"
        assert time.monotonic() - started < 60, f"{name} soundness run too slow"


def sample_value(rng, ty, domains):
    if ty.kind == "bool":
        return rng.choice([False, True])
    if ty.kind == "nat":
        return Fraction(rng.randint(0, max(domains.nat_range[1], 4)))
    if ty.kind == "int":
        lo, hi = domains.int_range
        return Fraction(rng.randint(lo - 2, hi + 2))
    if ty.kind == "float":
        return Fraction(rng.randint(-12, 24), rng.choice([1, 2, 4]))
    if ty.kind == "array":
        length = rng.randint(0, domains.array_lens[1] + 2)
        return tuple(sample_value(rng, ty.elem, domains)
                     for _ in range(length))
    raise AssertionError(ty)


def _domains_covering(domains, cases):
    """Widen the integer carriers so quantifier witnesses (divisors,
    quotients, indices) for the sampled magnitudes stay in range."""
    from refinery.verifier import DomainSpec
    biggest = 4
    for inputs, _ in cases:
        for value in inputs.values():
            for scalar in (value if isinstance(value, tuple) else (value,)):
                if isinstance(scalar, Fraction):
                    biggest = max(biggest, abs(int(scalar)) + 1)
    return DomainSpec(int_range=(-biggest, biggest),
                      nat_range=(0, biggest),
                      float_grid=domains.float_grid,
                      array_lens=domains.array_lens,
                      overrides=domains.overrides)


class TestEnlargedSuite:
    @pytest.mark.parametrize("name", PROBLEMS)
    def test_ten_fold_test_enlargement_loses_nothing(self, refined, name):
        """Verified problems keep passing when the case set grows 10x."""
        spec, config, tree = refined[name]
        base_cases = parse_cases((CORPUS / f"{name}.tests").read_text(),
                                 list(spec.statement.env))
        rng = random.Random(f"enlarge-{name}")
        stmt = spec.statement
        cases = []
        tries = 0
        while len(cases) < 10 * len(base_cases) and tries < 30_000:
            tries += 1
            inputs = {p.name: sample_value(rng, p.ty, config.domains)
                      for p in stmt.env}
            try:
                if not eval_spec(stmt.pre, inputs, inputs,
                                 config.domains, spec.defs_map):
                    continue
            except EvalError:
                continue
            cases.append((inputs, stmt.post))
        assert len(cases) == 10 * len(base_cases), \
            f"{name}: sampled only {len(cases)} pre-satisfying inputs"
        program = tree.extract_program()
        check_domains = _domains_covering(config.domains, cases)
        for inputs, check in cases:
            outcome = interpret(program, inputs, step_limit=200_000)
            assert outcome.completed, (name, inputs)
            assert eval_spec(check, outcome.final, inputs,
                             check_domains, spec.defs_map) is True, \
                (name, inputs)
