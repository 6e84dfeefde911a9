"""Command-line interface.

    refinery refine  SPEC --oracle scripted --script S.refine --out S.prog
    refinery check   SPEC --script S.refine [--program S.prog]
    refinery check   --session snapshot.json
    refinery run     PROG TESTS [--float]
    refinery eval    CORPUSDIR [--oracle scripted]
    refinery serve   [--port N] [--ui DIR]

Exit codes for refine: 0 refined, 1 parse error, 2 exhausted,
3 solver misconfiguration.  A JSON config file (--config) provides the
solver command, backend order, domains, retry limit, and the remote
oracle endpoint; REFINERY_SMT_CMD / REFINERY_LLM_URL / REFINERY_LLM_KEY
override it.
"""

from __future__ import annotations

import argparse
import json
import shlex
import sys
from pathlib import Path

from ..oracle import (
    DriveLimits,
    OracleError,
    ScriptedOracle,
    Transcript,
    drive_refinement,
    make_oracle,
)
from ..prog_lang import ProgError, parse_cases, parse_program, render_program, run_tests
from ..refinement import Library, SpecTree, parse_spec_file
from ..spec_lang import SpecError
from ..verifier import (
    SolverSpawnError,
    VerifyConfig,
    parse_domains,
    preflight_smt,
)
from .evalharness import evaluate_corpus
from .sessions import Session
from .server import SessionStore, serve

EXIT_OK = 0
EXIT_PARSE = 1
EXIT_EXHAUSTED = 2
EXIT_SOLVER = 3


def load_config(path: str | None, domains_arg: str | None):
    data = {}
    if path:
        data = json.loads(Path(path).read_text())
    kwargs = {}
    if "backends" in data:
        kwargs["backends"] = tuple(data["backends"])
    if "solver" in data:
        kwargs["smt_cmd"] = shlex.split(data["solver"])
    if "smt_timeout" in data:
        kwargs["smt_timeout"] = float(data["smt_timeout"])
    if "budget" in data:
        kwargs["budget"] = int(data["budget"])
    if "jobs" in data:
        kwargs["jobs"] = int(data["jobs"])
    if "accept_unknown" in data:
        kwargs["accept_unknown"] = bool(data["accept_unknown"])
    if domains_arg:
        text = Path(domains_arg).read_text() if Path(domains_arg).exists() \
            else domains_arg
        kwargs["domains"] = parse_domains(json.loads(text))
    elif "domains" in data:
        kwargs["domains"] = parse_domains(data["domains"])
    config = VerifyConfig(**kwargs)
    limits = DriveLimits(
        retries_per_node=int(data.get("retries", DriveLimits.retries_per_node)),
        max_proposals=int(data.get("max_proposals", DriveLimits.max_proposals)),
    )
    llm = data.get("llm", {})
    return config, limits, llm


def _build_oracle(args, llm_config):
    if args.oracle == "scripted":
        script_path = args.script or str(Path(args.spec).with_suffix(".refine"))
        if not Path(script_path).exists():
            print(f"error: no refinement script at {script_path}", file=sys.stderr)
            return None
        return ScriptedOracle(Path(script_path).read_text())
    if args.oracle == "remote":
        return make_oracle("remote", **{k: v for k, v in llm_config.items()
                                        if k in ("url", "api_key", "model",
                                                 "temperature", "timeout")})
    return make_oracle(args.oracle)


def _obligation_report(tree: SpecTree) -> str:
    lines = []
    for node_id in sorted(tree.nodes):
        node = tree.nodes[node_id]
        for ob in node.obligations:
            where = tree.path(node_id)
            extra = ""
            if ob.counterexample:
                cex = ", ".join(f"{k} := {v}" for k, v in
                                sorted(ob.counterexample.items()))
                extra = f" [{cex}]"
            elif ob.reason:
                extra = f" [{ob.reason}]"
            lines.append(f"{where} {ob.label}: {ob.status}"
                         f"{f' ({ob.backend})' if ob.backend else ''}{extra}")
            lines.append(f"    {ob.render()}")
    return "\n".join(lines) + ("\n" if lines else "")


def cmd_refine(args) -> int:
    try:
        spec = parse_spec_file(Path(args.spec).read_text())
    except (OSError, SpecError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    try:
        config, limits, llm = load_config(args.config, args.domains)
    except (OSError, json.JSONDecodeError, SpecError) as exc:
        print(f"error: bad configuration: {exc}", file=sys.stderr)
        return EXIT_PARSE
    try:
        preflight_smt(config)
    except SolverSpawnError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    try:
        oracle = _build_oracle(args, llm)
    except OracleError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    if oracle is None:
        return EXIT_PARSE

    library = Library(args.library) if args.library else None
    tree = SpecTree(spec.statement, defs=spec.defs_map, library=library,
                    accept_unknown=config.accept_unknown)
    transcript = Transcript(args.transcript)
    report = drive_refinement(tree, oracle, config, limits, transcript)

    stem = Path(args.spec).with_suffix("")
    report_path = Path(args.report) if args.report else Path(f"{stem}.report.txt")
    report_path.write_text(report.render() + "\n" + _obligation_report(tree))
    print(report.render().rstrip())

    if not report.fully_refined:
        print(f"refinement exhausted: {report.detail}", file=sys.stderr)
        return EXIT_EXHAUSTED

    program = render_program(tree.extract_program())
    out_path = Path(args.out) if args.out else Path(f"{stem}.prog")
    out_path.write_text(program)
    print(f"program written to {out_path}")
    if args.save_as and library is not None:
        library.save(tree, args.save_as)
        print(f"saved to library as {args.save_as}")
    return EXIT_OK


def cmd_check(args) -> int:
    try:
        config, limits, _ = load_config(args.config, args.domains)
    except (OSError, json.JSONDecodeError, SpecError) as exc:
        print(f"error: bad configuration: {exc}", file=sys.stderr)
        return EXIT_PARSE
    try:
        if args.session:
            snapshot = json.loads(Path(args.session).read_text())
            session = Session.replay(snapshot, config=config)
            tree = session.tree
            for node in tree.nodes.values():
                for ob in node.obligations:
                    if ob.status != "pending":
                        ob.reset()
            from ..verifier import check_obligations
            obs = [ob for n in tree.nodes.values() for ob in n.obligations]
            check_obligations(obs, config)
        else:
            if not args.spec or not args.script:
                print("error: check needs a spec and --script, or --session",
                      file=sys.stderr)
                return EXIT_PARSE
            spec = parse_spec_file(Path(args.spec).read_text())
            oracle = ScriptedOracle(Path(args.script).read_text())
            tree = SpecTree(spec.statement, defs=spec.defs_map,
                            library=Library(args.library) if args.library else None)
            drive_refinement(tree, oracle, config, limits)
    except (OSError, SpecError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE

    print(_obligation_report(tree).rstrip() or "no obligations")
    for node_id in sorted(tree.nodes):
        for failure in tree.nodes[node_id].failures:
            print(f"{tree.path(node_id)} rejected {failure.law_text}: "
                  f"{failure.reason}")
    all_proved = tree.is_closed()
    if args.program:
        want = parse_program(Path(args.program).read_text())
        if not tree.is_closed():
            print("program comparison skipped: refinement not closed",
                  file=sys.stderr)
            all_proved = False
        elif tree.extract_program() != want:
            print("extracted program DIFFERS from the given program",
                  file=sys.stderr)
            all_proved = False
        else:
            print("extracted program matches")
    return EXIT_OK if all_proved else EXIT_EXHAUSTED


def cmd_run(args) -> int:
    try:
        program = parse_program(Path(args.program).read_text())
        cases = parse_cases(Path(args.tests).read_text())
        config, _, _ = load_config(args.config, args.domains)
    except (OSError, SpecError, ProgError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    report = run_tests(program, cases, domains=config.domains,
                       step_limit=args.step_limit, float_mode=args.float)
    print(report.render())
    return EXIT_OK if report.ok else 1


def cmd_eval(args) -> int:
    try:
        config, limits, _ = load_config(args.config, args.domains)
    except (OSError, json.JSONDecodeError, SpecError) as exc:
        print(f"error: bad configuration: {exc}", file=sys.stderr)
        return EXIT_PARSE
    report = evaluate_corpus(args.corpus, config, args.oracle, limits)
    print(report.render())
    if args.json:
        Path(args.json).write_text(json.dumps(report.to_dict(), indent=1))
    return EXIT_OK


def cmd_serve(args) -> int:
    try:
        config, _, llm = load_config(args.config, args.domains)
    except (OSError, json.JSONDecodeError, SpecError) as exc:
        print(f"error: bad configuration: {exc}", file=sys.stderr)
        return EXIT_PARSE
    oracle = None
    if args.oracle:
        try:
            oracle = make_oracle(args.oracle, **({k: v for k, v in llm.items()
                                                  if k in ("url", "api_key",
                                                           "model", "temperature")}
                                                 if args.oracle == "remote" else {}))
        except (OracleError, ValueError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_PARSE
    library = Library(args.library) if args.library else None
    store = SessionStore(config, oracle, library, args.snapshot_dir)
    server = serve(args.port, args.host, store, args.ui)
    print(f"listening on http://{args.host}:{server.server_address[1]}",
          flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="refinery",
        description="Refine pre/post specifications into verified programs.")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON configuration file")
    common.add_argument("--domains", help="domain JSON (inline or a file path)")

    p = sub.add_parser("refine", parents=[common],
                       help="refine a spec into a program")
    p.add_argument("spec")
    p.add_argument("--oracle", default="scripted",
                   choices=("scripted", "heuristic", "remote"))
    p.add_argument("--script", help="refinement script (scripted oracle)")
    p.add_argument("--out", help="program output path")
    p.add_argument("--report", help="obligation report path")
    p.add_argument("--transcript", help="oracle transcript path (JSONL)")
    p.add_argument("--library", help="procedure library directory")
    p.add_argument("--save-as", help="save the closed tree into the library")
    p.set_defaults(func=cmd_refine)

    p = sub.add_parser("check", parents=[common],
                       help="re-generate and discharge obligations")
    p.add_argument("spec", nargs="?")
    p.add_argument("--script")
    p.add_argument("--session", help="session snapshot JSON")
    p.add_argument("--program", help="compare the extracted program to this file")
    p.add_argument("--library")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("run", parents=[common], help="run a program's test cases")
    p.add_argument("program")
    p.add_argument("tests")
    p.add_argument("--float", action="store_true",
                   help="interpret in binary64 instead of exact rationals")
    p.add_argument("--step-limit", type=int, default=10 ** 6)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("eval", parents=[common],
                       help="refine, verify, and test a corpus")
    p.add_argument("corpus")
    p.add_argument("--oracle", default="scripted",
                   choices=("scripted", "heuristic", "remote"))
    p.add_argument("--json", help="write the report as JSON here")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("serve", parents=[common], help="serve the session API")
    p.add_argument("--port", type=int, default=8787)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--oracle", choices=("scripted", "heuristic", "remote"))
    p.add_argument("--library")
    p.add_argument("--ui", help="static UI directory to serve at /")
    p.add_argument("--snapshot-dir", help="write per-event session snapshots here")
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
