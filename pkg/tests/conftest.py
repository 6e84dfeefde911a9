import json
from pathlib import Path

import pytest

from refinery.refinement import parse_spec_file
from refinery.verifier import VerifyConfig, parse_domains

CORPUS = Path(__file__).resolve().parent.parent / "src" / "refinery" / "corpus"

SQRT_SPEC = (CORPUS / "sqrt.spec").read_text()
SQRT_SCRIPT = (CORPUS / "sqrt.refine").read_text()
SQRT_GOLDEN = (CORPUS / "sqrt.golden").read_text()

# the wrong initialization of the motivating example: y := N misses N < 1
SQRT_BAD_THEN_GOOD = """\
seq mid: x*x <= N /\\ N < y*y /\\ e > 0
assign x := 0, y := N
assign x := 0, y := N + 1
iterate I: x*x <= N /\\ N < y*y /\\ e > 0 G: y > x + e V: y - x mode: initialised
ifelse G: (x + y) / 2 * (x + y) / 2 > N
assign y := (x + y) / 2
assign x := (x + y) / 2
"""


@pytest.fixture(scope="session")
def corpus_dir():
    return CORPUS


@pytest.fixture(scope="session")
def sqrt_spec():
    return parse_spec_file(SQRT_SPEC)


@pytest.fixture(scope="session")
def sqrt_domains():
    return parse_domains(json.loads((CORPUS / "sqrt.domains.json").read_text()))


@pytest.fixture()
def sqrt_config(sqrt_domains):
    return VerifyConfig(domains=sqrt_domains)
