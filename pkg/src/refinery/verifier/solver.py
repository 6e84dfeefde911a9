"""Obligation discharge: the external SMT backend and the backend
portfolio.

The external solver is any subprocess that takes an SMT-LIB v2 file
argument and answers sat/unsat/unknown on its first output line, with
``(get-model)`` S-expressions after; it is configured through
REFINERY_SMT_CMD (or the config file) and defaults to the bundled
desk solver.  A sat model is converted to a valuation and re-validated
by evaluation before it is ever reported as a refutation; a model that
fails validation triggers a bounded search near the model instead.
"""

from __future__ import annotations

import os
import shlex
import subprocess
import sys
import tempfile
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

from ..refinement import ProofObligation
from .bounded import DEFAULT_BUDGET, check_bounded, revalidates
from .domains import DomainSpec
from .results import PROVED, REFUTED, UNKNOWN, VcResult
from .smtlib import UnsupportedSmt, emit_smtlib, model_to_valuation, parse_model

SMT_CMD_ENV = "REFINERY_SMT_CMD"
DEFAULT_SMT_TIMEOUT = 10.0


def default_smt_cmd() -> list[str]:
    configured = os.environ.get(SMT_CMD_ENV)
    if configured:
        return shlex.split(configured)
    return [sys.executable, "-m", "refinery.desksmt"]


@dataclass
class VerifyConfig:
    backends: tuple[str, ...] = ("smt", "bounded")
    smt_cmd: list[str] | None = None
    smt_timeout: float = DEFAULT_SMT_TIMEOUT
    domains: DomainSpec = field(default_factory=DomainSpec)
    budget: int = DEFAULT_BUDGET
    jobs: int = 1
    accept_unknown: bool = False

    def resolved_smt_cmd(self) -> list[str]:
        return list(self.smt_cmd) if self.smt_cmd else default_smt_cmd()


class SolverSpawnError(Exception):
    pass


def preflight_smt(config: "VerifyConfig"):
    """Spawn the configured solver on a trivial script; raises
    SolverSpawnError on a misconfigured command."""
    if "smt" not in config.backends:
        return
    cmd = config.resolved_smt_cmd()
    with tempfile.NamedTemporaryFile("w", suffix=".smt2", delete=False) as fh:
        fh.write("(check-sat)\n")
        path = fh.name
    try:
        proc = subprocess.run(cmd + [path], capture_output=True, text=True,
                              timeout=config.smt_timeout)
    except (FileNotFoundError, PermissionError, subprocess.TimeoutExpired) as exc:
        raise SolverSpawnError(f"solver command {' '.join(cmd)!r} failed: "
                               f"{exc}") from exc
    finally:
        try:
            os.unlink(path)
        except OSError:
            pass
    first = proc.stdout.splitlines()[0].strip() if proc.stdout.splitlines() else ""
    if first not in ("sat", "unsat", "unknown"):
        raise SolverSpawnError(
            f"solver command {' '.join(cmd)!r} did not answer "
            f"sat/unsat/unknown (got {first!r})")


def run_smt(ob: ProofObligation,
            config: VerifyConfig,
            defs=None) -> VcResult:
    started = time.monotonic()
    try:
        script = emit_smtlib(ob, defs)
    except UnsupportedSmt as exc:
        return VcResult(UNKNOWN, "smt", reason=f"outside SMT fragment: {exc}",
                        elapsed=time.monotonic() - started)
    cmd = config.resolved_smt_cmd()
    with tempfile.NamedTemporaryFile("w", suffix=".smt2", delete=False) as fh:
        fh.write(script)
        path = fh.name
    try:
        try:
            proc = subprocess.run(cmd + [path], capture_output=True, text=True,
                                  timeout=config.smt_timeout)
        except (FileNotFoundError, PermissionError) as exc:
            return VcResult(UNKNOWN, "smt",
                            reason=f"cannot spawn solver {cmd[0]!r}: {exc}",
                            elapsed=time.monotonic() - started)
        except subprocess.TimeoutExpired:
            return VcResult(UNKNOWN, "smt", reason="solver timeout",
                            elapsed=time.monotonic() - started)
        lines = proc.stdout.splitlines()
        verdict = lines[0].strip() if lines else ""
        if verdict == "unsat":
            return VcResult(PROVED, "smt", elapsed=time.monotonic() - started)
        if verdict == "sat":
            model_text = "\n".join(lines[1:])
            cex = model_to_valuation(parse_model(model_text), ob)
            if revalidates(ob, cex, config.domains, defs):
                return VcResult(REFUTED, "smt", counterexample=cex,
                                elapsed=time.monotonic() - started)
            near = _search_near_model(ob, cex, config, defs)
            if near is not None:
                return VcResult(REFUTED, "smt", counterexample=near,
                                elapsed=time.monotonic() - started)
            return VcResult(UNKNOWN, "smt",
                            reason="solver model failed re-validation",
                            elapsed=time.monotonic() - started)
        reason = verdict or (proc.stderr.strip()[:200] or "no solver output")
        return VcResult(UNKNOWN, "smt", reason=f"solver answered {reason!r}",
                        elapsed=time.monotonic() - started)
    finally:
        try:
            os.unlink(path)
        except OSError:
            pass


def _search_near_model(ob, cex, config, defs):
    """Bounded search on a small grid around a non-validating model."""
    by_name = {p.name: p for p in ob.params}
    domains = config.domains
    for key, value in cex.items():
        base = key[:-2] if key.endswith("_0") else key
        param = by_name.get(base)
        if param is None or param.ty.kind == "array":
            continue
        if isinstance(value, bool):
            values = [value, not value]
        else:
            v = Fraction(value)
            nearby = [v, Fraction(int(v)), Fraction(int(v)) + 1, v + 1, v - 1,
                      v + Fraction(1, 2), v - Fraction(1, 2), Fraction(0)]
            if param.ty.kind in ("nat", "int"):
                nearby = [Fraction(int(x)) for x in nearby]
            if param.ty.kind == "nat":
                nearby = [x for x in nearby if x >= 0]
            values = list(dict.fromkeys(nearby))
        domains = domains.with_values(key, values)
    result = check_bounded(ob, domains, budget=200_000, defs=defs)
    if result.status == REFUTED:
        return result.counterexample
    return None


def check(ob: ProofObligation,
          config: VerifyConfig | None = None,
          defs=None) -> VcResult:
    """Portfolio check: backends in configured order, first definitive
    verdict wins; all-Unknown collapses into one Unknown."""
    config = config or VerifyConfig()
    reasons = []
    for backend in config.backends:
        if backend == "smt":
            result = run_smt(ob, config, defs)
        elif backend == "bounded":
            result = check_bounded(ob, config.domains, config.budget, defs)
        else:
            raise ValueError(f"unknown backend {backend!r}")
        if result.definitive:
            if result.status == REFUTED:
                assert revalidates(ob, result.counterexample, config.domains, defs), \
                    "refutation failed re-validation"
            return result
        reasons.append(f"{backend}: {result.reason}")
    return VcResult(UNKNOWN, "+".join(config.backends),
                    reason="; ".join(reasons))


def check_obligations(obligations: list[ProofObligation],
                      config: VerifyConfig | None = None,
                      defs=None) -> list[VcResult]:
    """Discharge obligations (in parallel when jobs > 1) and record the
    verdicts on them."""
    config = config or VerifyConfig()
    pending = [ob for ob in obligations]
    if config.jobs > 1 and len(pending) > 1:
        with ThreadPoolExecutor(max_workers=config.jobs) as pool:
            results = list(pool.map(lambda ob: check(ob, config, defs), pending))
    else:
        results = [check(ob, config, defs) for ob in pending]
    for ob, result in zip(pending, results):
        if ob.status != "pending":
            ob.reset()
        ob.resolve(result.status, backend=result.backend,
                   counterexample=result.counterexample, reason=result.reason)
    return results
