"""Flexible iteration end to end: the emitted runtime assert covers
floating-point non-progress that the proof obligations cannot see."""

import json
from fractions import Fraction

from refinery.oracle import ScriptedOracle, drive_refinement
from refinery.prog_lang import (
    ASSERT_FAILED,
    COMPLETED,
    interpret,
    render_program,
)
from refinery.refinement import SpecTree, parse_spec_file
from refinery.verifier import VerifyConfig, parse_domains

from conftest import CORPUS, SQRT_SCRIPT, SQRT_SPEC

FLEX_SCRIPT = SQRT_SCRIPT.replace("mode: initialised", "mode: flexible")


def refine_flexible():
    spec = parse_spec_file(SQRT_SPEC)
    domains = parse_domains(
        json.loads((CORPUS / "sqrt.domains.json").read_text()))
    tree = SpecTree(spec.statement)
    report = drive_refinement(tree, ScriptedOracle(FLEX_SCRIPT),
                              VerifyConfig(domains=domains))
    assert report.fully_refined
    return tree


def test_flexible_sqrt_closes_and_instruments():
    tree = refine_flexible()
    program = render_program(tree.extract_program())
    assert "v0 = y-x" in program
    assert "assert y-x != v0" in program


def test_exact_mode_runs_asserts_silently():
    tree = refine_flexible()
    out = interpret(tree.extract_program(),
                    {"N": Fraction(4), "e": Fraction(1, 2)})
    assert out.status == COMPLETED
    assert out.assert_count > 0
    x, y = out.final["x"], out.final["y"]
    assert x * x <= 4 < y * y and y <= x + Fraction(1, 2)


def test_binary64_non_progress_trips_the_assert():
    # with an epsilon below the float resolution the midpoint eventually
    # equals an endpoint; the variant stops changing and the assert
    # halts what would otherwise loop forever
    tree = refine_flexible()
    out = interpret(tree.extract_program(),
                    {"N": 2, "e": Fraction(1, 10 ** 20)},
                    step_limit=100_000, float_mode=True)
    assert out.status == ASSERT_FAILED
    assert out.state is not None
    assert out.state["y"] - out.state["x"] == out.state["v0"]
