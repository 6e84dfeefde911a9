"""The refinement-procedure library: named, verified statements with
their programs, reusable through the procedure-value law.

A lookup matches a statement against stored entries up to instantiation
of the entry's variant parameters (constants match by name), and
returns the weaken/strengthen side conditions that make the reuse
sound.
"""

from __future__ import annotations

import fcntl
import json
import os
from dataclasses import dataclass, field
from pathlib import Path

from ..prog_lang import Statement, parse_program, render_program, spec_expr_to_prog
from ..spec_lang import (
    CONSTANT,
    ConstRef,
    Quant,
    SpecError,
    SpecExpr,
    TypedParam,
    Var,
    free_vars,
    parse_spec_expr,
    render_spec_expr,
)
from .laws import ProofObligation, instantiate
from .specfile import parse_params
from .statement import SpecStatement


class LibraryError(SpecError):
    pass


@dataclass
class ProcedureEntry:
    name: str
    params: tuple[TypedParam, ...]  # variants first, then constants
    pre: SpecExpr
    post: SpecExpr
    program: Statement
    provenance: dict | None = None  # serialized SpecTree

    def __post_init__(self):
        self.params = tuple(self.params)
        allowed = {p.name for p in self.params}
        loose = (free_vars(self.pre) | free_vars(self.post)) - allowed
        if loose:
            raise LibraryError(f"entry {self.name!r} references undeclared "
                               f"name(s) {', '.join(sorted(loose))}")

    @property
    def variants(self):
        return tuple(p for p in self.params if p.kind != CONSTANT)

    @property
    def constants(self):
        return tuple(p for p in self.params if p.kind == CONSTANT)


@dataclass
class LibraryMatch:
    entry: ProcedureEntry
    substitution: dict[str, SpecExpr]
    obligations: list[ProofObligation]

    def call_args(self):
        """Argument expressions in entry parameter order."""
        return tuple(spec_expr_to_prog(self.substitution[p.name])
                     for p in self.entry.params)


class Library:
    def __init__(self, directory: str | os.PathLike | None = None):
        self.directory = Path(directory) if directory else None
        self.entries: dict[str, ProcedureEntry] = {}
        if self.directory and self.directory.is_dir():
            for path in sorted(self.directory.glob("*.proc")):
                entry = parse_entry(path.read_text())
                self.entries[entry.name] = entry

    def get(self, name: str) -> ProcedureEntry | None:
        return self.entries.get(name)

    def save(self, tree, name: str) -> ProcedureEntry:
        """Store a closed tree as a reusable procedure."""
        if name in self.entries:
            raise LibraryError(f"library already has an entry named {name!r}")
        if not tree.is_closed():
            raise LibraryError("only a closed tree can be saved")
        stmt = tree.root.stmt
        entry = ProcedureEntry(
            name=name,
            params=stmt.frame + stmt.constants,
            pre=stmt.pre,
            post=stmt.post,
            program=tree.extract_program(),
            provenance=tree.to_dict(),
        )
        self.entries[name] = entry
        if self.directory:
            self.directory.mkdir(parents=True, exist_ok=True)
            path = self.directory / f"{name}.proc"
            _locked_write(path, render_entry(entry))
        return entry

    def lookup(self, stmt: SpecStatement) -> list[LibraryMatch]:
        """Entries whose pre/post match stmt's up to instantiation of
        the entry's variant parameters; no match is an empty list."""
        out = []
        for entry in self.entries.values():
            subst = _match_entry(entry, stmt)
            if subst is None:
                continue
            obligations = [
                ProofObligation("proccall-pre", stmt.pre,
                                instantiate(entry.pre, subst), stmt.env,
                                origin_law="proccall"),
                ProofObligation("proccall-post", instantiate(entry.post, subst),
                                stmt.post, stmt.env, origin_law="proccall"),
            ]
            out.append(LibraryMatch(entry, subst, obligations))
        return out


def _match_entry(entry: ProcedureEntry, stmt: SpecStatement):
    pattern_vars = {p.name for p in entry.variants}
    subst: dict[str, SpecExpr] = {}
    if not _unify(entry.pre, stmt.pre, pattern_vars, subst):
        return None
    if not _unify(entry.post, stmt.post, pattern_vars, subst):
        return None
    for p in entry.constants:
        # constants match by name against the statement's declarations
        if not any(q.name == p.name and q.ty == p.ty for q in stmt.constants):
            return None
        subst.setdefault(p.name, ConstRef(p.name))
    for p in entry.variants:
        subst.setdefault(p.name, Var(p.name))
    return subst


def _unify(pattern: SpecExpr, target: SpecExpr, pattern_vars: set, subst: dict) -> bool:
    if isinstance(pattern, Var) and pattern.name in pattern_vars:
        if pattern.name in subst:
            return subst[pattern.name] == target
        subst[pattern.name] = target
        return True
    if type(pattern) is not type(target):
        return False
    if isinstance(pattern, Quant):
        if pattern.kind != target.kind or pattern.param != target.param:
            return False
        return _unify(pattern.body, target.body, pattern_vars - {pattern.param.name},
                      subst)
    pk, tk = pattern.children(), target.children()
    if len(pk) != len(tk):
        return False
    if not pk:
        return pattern == target
    shallow_eq = _shallow_fields(pattern) == _shallow_fields(target)
    return shallow_eq and all(_unify(p, t, pattern_vars, subst)
                              for p, t in zip(pk, tk))


def _shallow_fields(e: SpecExpr):
    skip = {"left", "right", "expr", "body", "array", "index", "value",
            "lo", "hi", "args"}
    return {k: v for k, v in vars(e).items() if k not in skip}


# ---------------------------------------------------------------------------
# Entry files


def render_entry(entry: ProcedureEntry) -> str:
    lines = [f"name: {entry.name}"]
    if entry.variants:
        lines.append("params: " + ", ".join(str(p) for p in entry.variants))
    if entry.constants:
        lines.append("constants: " + ", ".join(str(p) for p in entry.constants))
    lines.append(f"pre: {render_spec_expr(entry.pre)}")
    lines.append(f"post: {render_spec_expr(entry.post)}")
    lines.append("program:")
    for line in render_program(entry.program).rstrip("\n").splitlines():
        lines.append(f"    {line}")
    if entry.provenance is not None:
        lines.append("tree: " + json.dumps(entry.provenance, sort_keys=True))
    return "\n".join(lines) + "\n"


def parse_entry(text: str) -> ProcedureEntry:
    name = ""
    variants: list[TypedParam] = []
    constants: list[TypedParam] = []
    pre_text = post_text = None
    program_lines: list[str] = []
    provenance = None
    mode = None
    for raw in text.splitlines():
        if raw.startswith("    ") and mode == "program":
            program_lines.append(raw[4:])
            continue
        stripped = raw.strip()
        if not stripped:
            continue
        key, sep, rest = stripped.partition(":")
        key = key.strip()
        if not sep:
            raise LibraryError(f"bad entry line {stripped!r}")
        mode = None
        if key == "name":
            name = rest.strip()
        elif key == "params":
            variants.extend(parse_params(rest, "variant"))
        elif key == "constants":
            constants.extend(parse_params(rest, CONSTANT))
        elif key == "pre":
            pre_text = rest.strip()
        elif key == "post":
            post_text = rest.strip()
        elif key == "program":
            mode = "program"
        elif key == "tree":
            provenance = json.loads(rest)
        else:
            raise LibraryError(f"unknown entry section {key!r}")
    if not name or pre_text is None or post_text is None:
        raise LibraryError("entry needs name, pre, and post")
    env = variants + constants
    return ProcedureEntry(
        name=name,
        params=tuple(variants) + tuple(constants),
        pre=parse_spec_expr(pre_text, env),
        post=parse_spec_expr(post_text, env),
        program=parse_program("\n".join(program_lines)),
        provenance=provenance,
    )


def _locked_write(path: Path, content: str):
    lock_path = path.with_suffix(".lock")
    with open(lock_path, "w") as lock:
        fcntl.flock(lock, fcntl.LOCK_EX)
        try:
            path.write_text(content)
        finally:
            fcntl.flock(lock, fcntl.LOCK_UN)
