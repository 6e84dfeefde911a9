"""Desk-scale evaluation: refine every problem in a corpus directory,
verify it, then run its interpreter test cases, and report both columns
separately (verified code should not lose test passes).

A problem is ``<name>.spec`` with a sibling ``<name>.refine`` script,
``<name>.tests`` cases, and an optional ``<name>.domains.json``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from ..oracle import (
    DriveLimits,
    ScriptedOracle,
    drive_refinement,
    make_oracle,
)
from ..prog_lang import parse_cases, run_tests
from ..refinement import SpecTree, parse_spec_file
from ..spec_lang import SpecError
from ..verifier import VerifyConfig, parse_domains


@dataclass
class EvalRow:
    name: str
    outcome: str
    vcs_proved: int
    vcs_total: int
    tests_passed: int
    tests_total: int
    note: str = ""

    @property
    def refined(self):
        return self.outcome == "fully_refined"


@dataclass
class EvalReport:
    rows: list[EvalRow] = field(default_factory=list)

    @property
    def refined_count(self):
        return sum(1 for r in self.rows if r.refined)

    @property
    def tests_passed(self):
        return sum(r.tests_passed for r in self.rows)

    @property
    def tests_total(self):
        return sum(r.tests_total for r in self.rows)

    @property
    def vcs_proved(self):
        return sum(r.vcs_proved for r in self.rows)

    @property
    def vcs_total(self):
        return sum(r.vcs_total for r in self.rows)

    def render(self) -> str:
        header = f"{'problem':<16} {'refined':<10} {'vcs':<8} {'tests':<8}"
        lines = [header, "-" * len(header)]
        for r in self.rows:
            refined = "yes" if r.refined else r.outcome
            lines.append(f"{r.name:<16} {refined:<10} "
                         f"{r.vcs_proved}/{r.vcs_total:<6} "
                         f"{r.tests_passed}/{r.tests_total:<6}"
                         + (f"  {r.note}" if r.note else ""))
        lines.append("-" * len(header))
        lines.append(f"{'TOTAL':<16} {self.refined_count}/{len(self.rows):<8} "
                     f"{self.vcs_proved}/{self.vcs_total:<6} "
                     f"{self.tests_passed}/{self.tests_total:<6}")
        return "\n".join(lines)

    def to_dict(self) -> dict:
        return {
            "rows": [vars(r) for r in self.rows],
            "refined": self.refined_count,
            "problems": len(self.rows),
            "vcs": [self.vcs_proved, self.vcs_total],
            "tests": [self.tests_passed, self.tests_total],
        }


def problem_paths(corpus_dir) -> list[Path]:
    return sorted(Path(corpus_dir).glob("*.spec"))


def load_problem_domains(spec_path: Path, base: VerifyConfig) -> VerifyConfig:
    domains_path = spec_path.with_suffix(".domains.json")
    if domains_path.exists():
        domains = parse_domains(json.loads(domains_path.read_text()))
        return VerifyConfig(backends=base.backends, smt_cmd=base.smt_cmd,
                            smt_timeout=base.smt_timeout, domains=domains,
                            budget=base.budget, jobs=base.jobs,
                            accept_unknown=base.accept_unknown)
    return base


def eval_problem(spec_path: Path, config: VerifyConfig,
                 oracle_kind: str = "scripted",
                 limits: DriveLimits | None = None) -> EvalRow:
    name = spec_path.stem
    try:
        spec = parse_spec_file(spec_path.read_text())
    except SpecError as exc:
        return EvalRow(name, "bad_spec", 0, 0, 0, 0, note=str(exc))
    config = load_problem_domains(spec_path, config)

    if oracle_kind == "scripted":
        script_path = spec_path.with_suffix(".refine")
        if not script_path.exists():
            return EvalRow(name, "no_script", 0, 0, 0, 0)
        oracle = ScriptedOracle(script_path.read_text())
    else:
        oracle = make_oracle(oracle_kind)

    tree = SpecTree(spec.statement, defs=spec.defs_map)
    report = drive_refinement(tree, oracle, config, limits)
    final_obs = [ob for node in tree.nodes.values() for ob in node.obligations]
    vcs_total = len(final_obs)
    vcs_proved = sum(1 for ob in final_obs if ob.status == "proved")

    tests_passed = tests_total = 0
    note = "" if report.fully_refined else report.detail
    tests_path = spec_path.with_suffix(".tests")
    if tests_path.exists():
        cases = parse_cases(tests_path.read_text(), list(spec.statement.env))
        tests_total = len(cases)
        if report.fully_refined:
            test_report = run_tests(tree.extract_program(), cases,
                                    domains=config.domains)
            tests_passed = test_report.passed
            if not test_report.ok:
                failing = [r for r in test_report.results if not r.passed]
                note = f"test case {failing[0].index}: {failing[0].message}"
    return EvalRow(name, report.outcome, vcs_proved, vcs_total,
                   tests_passed, tests_total, note=note)


def evaluate_corpus(corpus_dir, config: VerifyConfig | None = None,
                    oracle_kind: str = "scripted",
                    limits: DriveLimits | None = None) -> EvalReport:
    config = config or VerifyConfig()
    report = EvalReport()
    for spec_path in problem_paths(corpus_dir):
        report.rows.append(eval_problem(spec_path, config, oracle_kind, limits))
    return report
