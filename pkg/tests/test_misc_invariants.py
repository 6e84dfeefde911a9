"""Cross-cutting invariants: CLI reproducibility, solver-command
override, parallel discharge, spec-file round-trip."""

import os
import sys

import pytest

from refinery.frontends.cli import main
from refinery.refinement import (
    ProofObligation,
    parse_spec_file,
    render_spec_file,
)
from refinery.spec_lang import FLOAT, TypedParam, parse_spec_expr
from refinery.verifier import (
    SMT_CMD_ENV,
    VerifyConfig,
    check_obligations,
    default_smt_cmd,
)

from conftest import CORPUS


def test_cmd_refine_is_byte_reproducible(tmp_path):
    artifacts = []
    for run in range(2):
        out = tmp_path / f"sqrt-{run}.prog"
        report = tmp_path / f"report-{run}.txt"
        transcript = tmp_path / f"transcript-{run}.jsonl"
        code = main(["refine", str(CORPUS / "sqrt.spec"),
                     "--script", str(CORPUS / "sqrt.refine"),
                     "--domains", str(CORPUS / "sqrt.domains.json"),
                     "--out", str(out), "--report", str(report),
                     "--transcript", str(transcript)])
        assert code == 0
        artifacts.append((out.read_bytes(), report.read_bytes(),
                          transcript.read_bytes()))
    assert artifacts[0] == artifacts[1]


def test_smt_cmd_env_override(monkeypatch):
    monkeypatch.setenv(SMT_CMD_ENV, "mysolver --flag")
    assert default_smt_cmd() == ["mysolver", "--flag"]
    monkeypatch.delenv(SMT_CMD_ENV)
    assert default_smt_cmd() == [sys.executable, "-m", "refinery.desksmt"]


def test_parallel_obligation_discharge(sqrt_domains):
    env = (TypedParam("x", FLOAT), TypedParam("N", FLOAT, "constant"))
    obligations = [
        ProofObligation(f"ob{i}",
                        parse_spec_expr("N >= 0", env),
                        parse_spec_expr(f"N + {i} >= {i}", env,
                                        check_types=False),
                        env)
        for i in range(6)
    ]
    config = VerifyConfig(domains=sqrt_domains, jobs=4)
    results = check_obligations(obligations, config)
    assert all(r.status == "proved" for r in results)
    assert all(ob.status == "proved" for ob in obligations)


def test_spec_file_round_trip():
    for name in ("sqrt", "gcd", "prefix_sum"):
        spec = parse_spec_file((CORPUS / f"{name}.spec").read_text())
        again = parse_spec_file(render_spec_file(spec))
        assert again.name == spec.name
        assert again.statement == spec.statement
        assert again.defs == spec.defs


def test_corpus_specs_renderable():
    for path in sorted(CORPUS.glob("*.spec")):
        spec = parse_spec_file(path.read_text())
        assert parse_spec_file(render_spec_file(spec)).statement == spec.statement
