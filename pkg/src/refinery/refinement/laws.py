"""The refinement-law catalog and its per-law schemes.

``apply_law`` is a pure function from a statement and a law to a
RefinementStep: the child specifications it spawns, the code fragment
it emits (with one Hole per child), and the proof obligations that must
hold before the application is sound.  Obligations over a frame
``x, y`` carry the initial-value hypothesis ``x = x_0 /\\ y = y_0`` so
that laws may relate final values to initial ones.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from ..prog_lang import (
    Assert,
    Assign,
    Call,
    Hole,
    If,
    PBin,
    PIndex,
    PName,
    PNeg,
    PNot,
    PNum,
    PSlice,
    Pass,
    ProgError,
    ProgExpr,
    Statement,
    While,
    prog_expr_to_spec,
    render_prog_expr,
    seq_of,
    spec_expr_to_prog,
)
from ..spec_lang import (
    NAT,
    And,
    Arith,
    BoolLit,
    ConstRef,
    Implies,
    Init,
    Not,
    Num,
    Quant,
    Rel,
    SpecError,
    SpecExpr,
    Store,
    TypedParam,
    Var,
    conj,
    conjuncts,
    fresh_name,
    mark_initial,
    render_spec_expr,
    substitute,
    type_check,
    type_errors,
    widens_to,
)
from .statement import SpecStatement

INITIALISED = "initialised"
FLEXIBLE = "flexible"


class LawError(SpecError):
    """The law does not apply to the statement as parameterized."""


# ---------------------------------------------------------------------------
# Law constructors


@dataclass(frozen=True)
class RefinementLaw:
    pass


@dataclass(frozen=True)
class Skip(RefinementLaw):
    pass


@dataclass(frozen=True)
class InitSkip(RefinementLaw):
    pass


@dataclass(frozen=True)
class SeqLaw(RefinementLaw):
    mid: SpecExpr


@dataclass(frozen=True)
class FlexSeq(RefinementLaw):
    a: SpecExpr
    b: SpecExpr
    c: SpecExpr
    d: SpecExpr


@dataclass(frozen=True)
class Binding:
    """One assignment target := expression; index set for a[i] := e."""

    target: str
    expr: ProgExpr
    index: ProgExpr | None = None

    def render(self) -> str:
        lhs = self.target if self.index is None else \
            f"{self.target}[{render_prog_expr(self.index)}]"
        return f"{lhs} := {render_prog_expr(self.expr)}"


@dataclass(frozen=True)
class AssignLaw(RefinementLaw):
    bindings: tuple[Binding, ...]

    def __post_init__(self):
        object.__setattr__(self, "bindings", tuple(self.bindings))


@dataclass(frozen=True)
class FollowAssign(RefinementLaw):
    bindings: tuple[Binding, ...]

    def __post_init__(self):
        object.__setattr__(self, "bindings", tuple(self.bindings))


@dataclass(frozen=True)
class IfElse(RefinementLaw):
    guard: ProgExpr


@dataclass(frozen=True)
class Iterate(RefinementLaw):
    invariant: SpecExpr
    guard: ProgExpr
    variant: SpecExpr
    mode: str = INITIALISED

    def __post_init__(self):
        if self.mode not in (INITIALISED, FLEXIBLE):
            raise ValueError(f"bad iteration mode {self.mode!r}")


@dataclass(frozen=True)
class Traverse(RefinementLaw):
    array: str
    index: str
    lo: SpecExpr
    hi: SpecExpr
    prop: SpecExpr  # parameterized by the index variable


@dataclass(frozen=True)
class Expand(RefinementLaw):
    param: TypedParam
    init: SpecExpr


@dataclass(frozen=True)
class ProcCall(RefinementLaw):
    name: str
    args: tuple[ProgExpr, ...]

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))


LAW_NAMES = {
    Skip: "skip", InitSkip: "initskip", SeqLaw: "seq", FlexSeq: "flexseq",
    AssignLaw: "assign", FollowAssign: "followassign", IfElse: "ifelse",
    Iterate: "iterate", Traverse: "traverse", Expand: "expand",
    ProcCall: "proccall",
}


def law_name(law: RefinementLaw) -> str:
    return LAW_NAMES[type(law)]


# ---------------------------------------------------------------------------
# Obligations


PENDING = "pending"
PROVED = "proved"
REFUTED = "refuted"
UNKNOWN = "unknown"

_TRANSITIONS = {PENDING: {PROVED, REFUTED, UNKNOWN}}


@dataclass
class ProofObligation:
    label: str
    hypothesis: SpecExpr
    conclusion: SpecExpr
    params: tuple[TypedParam, ...]
    origin_node: int | None = None
    origin_law: str = ""
    status: str = PENDING
    backend: str | None = None
    counterexample: dict | None = None
    reason: str | None = None

    def resolve(self, status: str, backend=None, counterexample=None, reason=None):
        if status not in _TRANSITIONS.get(self.status, ()):
            raise ValueError(f"bad status transition {self.status} -> {status}")
        if status == REFUTED and counterexample is None:
            raise ValueError("a refutation needs a counterexample")
        self.status = status
        self.backend = backend
        self.counterexample = counterexample
        self.reason = reason

    def reset(self):
        self.status = PENDING
        self.backend = None
        self.counterexample = None
        self.reason = None

    def formula(self) -> SpecExpr:
        return Implies(self.hypothesis, self.conclusion)

    def render(self) -> str:
        return (f"{render_spec_expr(self.hypothesis)} -> "
                f"{render_spec_expr(self.conclusion)}")


# ---------------------------------------------------------------------------
# Scheme application


@dataclass
class RefinementStep:
    children: tuple[SpecStatement, ...]
    code: Statement
    obligations: list[ProofObligation]


def negate_spec(e: SpecExpr) -> SpecExpr:
    flip = {"=": "<>", "<>": "=", "<": ">=", "<=": ">", ">": "<=", ">=": "<"}
    if isinstance(e, Rel):
        return Rel(flip[e.op], e.left, e.right)
    if isinstance(e, Not):
        return e.expr
    if isinstance(e, BoolLit):
        return BoolLit(not e.value)
    return Not(e)


def _init_conjuncts(stmt: SpecStatement) -> list[SpecExpr]:
    return [Rel("=", Var(p.name), Init(Var(p.name))) for p in stmt.frame]


def _with_inits(stmt: SpecStatement) -> SpecExpr:
    return conj(_init_conjuncts(stmt) + conjuncts(stmt.pre))


def _and_all(*parts: SpecExpr) -> SpecExpr:
    flat: list[SpecExpr] = []
    for p in parts:
        flat.extend(conjuncts(p))
    return conj(flat)


def _check_formula(e: SpecExpr, stmt: SpecStatement, what: str,
                   want_bool=True, defs=None):
    errors = type_errors(e, stmt.env, defs)
    if errors:
        raise LawError(f"{what} does not type-check: {errors[0]}")
    if want_bool:
        ty = type_check(e, stmt.env, defs)
        if ty.kind != "bool":
            raise LawError(f"{what} must be a formula, got {ty}")


def _check_guard(g: ProgExpr, stmt: SpecStatement, defs=None) -> SpecExpr:
    gs = prog_expr_to_spec(g, stmt.env)
    _check_formula(gs, stmt, "guard", defs=defs)
    return gs


def _lifted_bindings(law, stmt: SpecStatement, defs) -> dict[str, SpecExpr]:
    """Simultaneous substitution map for the assignment laws; indexed
    targets become functional stores on the whole array."""
    subst_map: dict[str, SpecExpr] = {}
    seen_plain: set[str] = set()
    for b in law.bindings:
        p = stmt.frame_param(b.target)
        if p is None:
            kinds = {q.name for q in stmt.constants}
            if b.target in kinds:
                raise LawError(f"cannot assign to constant {b.target!r}")
            raise LawError(f"assignment target {b.target!r} is not in the frame")
        rhs = prog_expr_to_spec(b.expr, stmt.env)
        errors = type_errors(rhs, stmt.env, defs)
        if errors:
            raise LawError(f"assignment to {b.target!r} does not type-check: "
                           f"{errors[0]}")
        if b.index is None:
            if b.target in subst_map:
                raise LawError(f"duplicate assignment target {b.target!r}")
            rhs_ty = type_check(rhs, stmt.env, defs)
            if not widens_to(rhs_ty, p.ty):
                raise LawError(f"cannot assign {rhs_ty} to {b.target}: {p.ty}")
            subst_map[b.target] = rhs
            seen_plain.add(b.target)
        else:
            if b.target in seen_plain:
                raise LawError(f"target {b.target!r} assigned both whole and "
                               f"by element")
            if p.ty.kind != "array":
                raise LawError(f"indexed assignment needs an array, "
                               f"{b.target} is {p.ty}")
            idx = prog_expr_to_spec(b.index, stmt.env)
            base = subst_map.get(b.target, Var(b.target))
            subst_map[b.target] = Store(base, idx, rhs)
    return subst_map


def _assign_code(law, stmt: SpecStatement) -> Statement:
    """Left-to-right assignments; when a later right-hand side reads an
    earlier target, the old value is snapshotted into a fresh
    temporary first (simultaneous semantics)."""
    targets_before: list[str] = []
    needs_old: set[str] = set()
    for b in law.bindings:
        reads = _prog_names(b.expr)
        if b.index is not None:
            reads |= _prog_names(b.index)
        needs_old |= reads & set(targets_before)
        targets_before.append(b.target)
    used = {p.name for p in stmt.env}
    temp_for: dict[str, str] = {}
    prologue: list[Statement] = []
    for name in sorted(needs_old):
        temp = fresh_name(f"{name}_old", used)
        used.add(temp)
        temp_for[name] = temp
        prologue.append(Assign(temp, PName(name)))
    assigns: list[Statement] = []
    seen: set[str] = set()
    for b in law.bindings:
        expr = _rename_prog(b.expr, {n: t for n, t in temp_for.items() if n in seen})
        index = None
        if b.index is not None:
            index = _rename_prog(b.index, {n: t for n, t in temp_for.items() if n in seen})
        assigns.append(Assign(b.target, expr, index))
        seen.add(b.target)
    return seq_of(prologue + assigns)


def _prog_names(e: ProgExpr) -> set[str]:
    out = set()
    stack = [e]
    while stack:
        cur = stack.pop()
        if isinstance(cur, PName):
            out.add(cur.name)
        elif isinstance(cur, (PIndex, PSlice)):
            out.add(cur.base)
        stack.extend(cur.children())
    return out


def _rename_prog(e: ProgExpr, mapping: dict[str, str]) -> ProgExpr:
    if not mapping:
        return e
    if isinstance(e, PName):
        return PName(mapping.get(e.name, e.name))
    if isinstance(e, PBin):
        return PBin(e.op, _rename_prog(e.left, mapping), _rename_prog(e.right, mapping))
    if isinstance(e, PNot):
        return PNot(_rename_prog(e.expr, mapping))
    if isinstance(e, PNeg):
        return PNeg(_rename_prog(e.expr, mapping))
    if isinstance(e, PIndex):
        return PIndex(mapping.get(e.base, e.base), _rename_prog(e.index, mapping))
    if isinstance(e, PSlice):
        return PSlice(mapping.get(e.base, e.base),
                      _rename_prog(e.lo, mapping), _rename_prog(e.hi, mapping))
    return e


def _normalized(e: SpecExpr) -> SpecExpr:
    return conj(conjuncts(e))


def apply_law(stmt: SpecStatement,
              law: RefinementLaw,
              library=None,
              defs: Mapping | None = None) -> RefinementStep:
    """The scheme of the law on the statement.

    Raises LawError when the law does not fit (ill-typed parameters,
    assignment outside the frame, traverse on a non-array, unknown
    procedure).
    """
    name = law_name(law)
    ob = lambda label, hyp, concl: ProofObligation(
        label, hyp, concl, stmt.env, origin_law=name)

    if isinstance(law, (Skip, InitSkip)):
        return RefinementStep(
            children=(),
            code=Pass(),
            obligations=[ob("skip", _with_inits(stmt), stmt.post)],
        )

    if isinstance(law, SeqLaw):
        _check_formula(law.mid, stmt, "mid formula", defs=defs)
        first = SpecStatement(stmt.frame, stmt.constants, stmt.pre, law.mid)
        second = SpecStatement(stmt.frame, stmt.constants, law.mid, stmt.post)
        return RefinementStep(
            children=(first, second),
            code=seq_of([Hole(0), Hole(1)]),
            obligations=[],
        )

    if isinstance(law, FlexSeq):
        for label, f in (("A", law.a), ("B", law.b), ("C", law.c), ("D", law.d)):
            _check_formula(f, stmt, f"{label} formula", defs=defs)
        first = SpecStatement(stmt.frame, stmt.constants, law.a, law.b)
        second = SpecStatement(stmt.frame, stmt.constants, law.c, law.d)
        return RefinementStep(
            children=(first, second),
            code=seq_of([Hole(0), Hole(1)]),
            obligations=[
                ob("flexseq-pre", stmt.pre, law.a),
                ob("flexseq-mid", law.b, law.c),
                ob("flexseq-post", law.d, stmt.post),
            ],
        )

    if isinstance(law, AssignLaw):
        if not law.bindings:
            raise LawError("assignment needs at least one binding")
        subst_map = _lifted_bindings(law, stmt, defs)
        return RefinementStep(
            children=(),
            code=_assign_code(law, stmt),
            obligations=[ob("assign", _with_inits(stmt),
                            substitute(stmt.post, subst_map))],
        )

    if isinstance(law, FollowAssign):
        if not law.bindings:
            raise LawError("assignment needs at least one binding")
        subst_map = _lifted_bindings(law, stmt, defs)
        child = SpecStatement(stmt.frame, stmt.constants, stmt.pre,
                              substitute(stmt.post, subst_map))
        return RefinementStep(
            children=(child,),
            code=seq_of([Hole(0), _assign_code(law, stmt)]),
            obligations=[],
        )

    if isinstance(law, IfElse):
        gs = _check_guard(law.guard, stmt, defs)
        then_stmt = SpecStatement(stmt.frame, stmt.constants,
                                  _and_all(stmt.pre, gs), stmt.post)
        else_stmt = SpecStatement(stmt.frame, stmt.constants,
                                  _and_all(stmt.pre, negate_spec(gs)), stmt.post)
        return RefinementStep(
            children=(then_stmt, else_stmt),
            code=If(law.guard, Hole(0), Hole(1)),
            obligations=[],
        )

    if isinstance(law, Iterate):
        return _apply_iterate(stmt, law, defs, ob)

    if isinstance(law, Traverse):
        return _apply_traverse(stmt, law, defs, ob)

    if isinstance(law, Expand):
        if any(p.name == law.param.name for p in stmt.env):
            raise LawError(f"{law.param.name!r} is already declared")
        frame = stmt.frame + (law.param,)
        child_env = frame + stmt.constants
        errors = type_errors(law.init, child_env, defs)
        if errors:
            raise LawError(f"initial value does not type-check: {errors[0]}")
        post = _and_all(stmt.post, Rel("=", Var(law.param.name), law.init))
        child = SpecStatement(frame, stmt.constants, stmt.pre, post)
        return RefinementStep(children=(child,), code=Hole(0), obligations=[])

    if isinstance(law, ProcCall):
        if library is None:
            raise LawError("no refinement library is configured")
        entry = library.get(law.name)
        if entry is None:
            raise LawError(f"no library procedure named {law.name!r}")
        if len(law.args) != len(entry.params):
            raise LawError(f"{law.name} takes {len(entry.params)} argument(s), "
                           f"got {len(law.args)}")
        inst = {}
        for p, arg in zip(entry.params, law.args):
            arg_s = prog_expr_to_spec(arg, stmt.env)
            errors = type_errors(arg_s, stmt.env, defs)
            if errors:
                raise LawError(f"argument for {p.name} does not type-check: "
                               f"{errors[0]}")
            if not widens_to(type_check(arg_s, stmt.env, defs), p.ty):
                raise LawError(f"argument for {p.name} has the wrong type")
            inst[p.name] = arg_s
        return RefinementStep(
            children=(),
            code=Call(law.name, law.args),
            obligations=[
                ob("proccall-pre", stmt.pre, instantiate(entry.pre, inst)),
                ob("proccall-post", instantiate(entry.post, inst), stmt.post),
            ],
        )

    raise LawError(f"unknown law {type(law).__name__}")


def _apply_iterate(stmt, law: Iterate, defs, ob) -> RefinementStep:
    _check_formula(law.invariant, stmt, "invariant", defs=defs)
    gs = _check_guard(law.guard, stmt, defs)
    errors = type_errors(law.variant, stmt.env, defs)
    if errors:
        raise LawError(f"variant does not type-check: {errors[0]}")
    if not type_check(law.variant, stmt.env, defs).is_numeric:
        raise LawError("variant must be a numeric expression")

    inv = law.invariant
    v0 = mark_initial(law.variant, set(stmt.frame_names))
    if law.mode == INITIALISED:
        body_post = _and_all(inv, Rel("<=", Num(0), law.variant),
                             Rel("<", law.variant, v0))
    else:
        body_post = _and_all(inv, Rel("<", law.variant, v0))
    body = SpecStatement(stmt.frame, stmt.constants, _and_all(inv, gs), body_post)

    children: list[SpecStatement] = []
    entry_code: list[Statement] = []
    if _normalized(stmt.pre) != _normalized(inv):
        children.append(SpecStatement(stmt.frame, stmt.constants, stmt.pre, inv))
        entry_code.append(Hole(0))
    body_slot = len(children)
    children.append(body)

    if law.mode == FLEXIBLE:
        try:
            v_prog = spec_expr_to_prog(law.variant)
        except ProgError as exc:
            raise LawError(f"variant has no program form: {exc}") from exc
        used = {p.name for p in stmt.env}
        snap = "v0" if "v0" not in used else fresh_name("v0_", used)
        loop_body = seq_of([
            Assign(snap, v_prog),
            Hole(body_slot),
            Assert(PBin("!=", v_prog, PName(snap))),
        ])
    else:
        loop_body = Hole(body_slot)

    code = seq_of(entry_code + [While(law.guard, loop_body)])
    exit_hyp = _and_all(inv, negate_spec(gs))
    return RefinementStep(
        children=tuple(children),
        code=code,
        obligations=[ob("iterate-exit", exit_hyp, stmt.post)],
    )


def _apply_traverse(stmt, law: Traverse, defs, ob) -> RefinementStep:
    arr = stmt.frame_param(law.array)
    if arr is None:
        raise LawError(f"traverse needs {law.array!r} in the frame")
    if arr.ty.kind != "array":
        raise LawError(f"traverse needs an array, {law.array} is {arr.ty}")
    if any(p.name == law.index for p in stmt.constants):
        raise LawError(f"index {law.index!r} is a constant")
    idx_param = stmt.frame_param(law.index) or TypedParam(law.index, NAT)
    if not idx_param.ty.is_numeric:
        raise LawError(f"index {law.index!r} must be numeric")
    frame = stmt.frame if stmt.frame_param(law.index) else stmt.frame + (idx_param,)
    env = frame + stmt.constants

    for label, f in (("m", law.lo), ("n", law.hi)):
        errors = type_errors(f, stmt.env, defs)
        if errors:
            raise LawError(f"{label} does not type-check: {errors[0]}")
        if not type_check(f, stmt.env, defs).is_numeric:
            raise LawError(f"{label} must be numeric")
    errors = type_errors(law.prop, env, defs)
    if errors:
        raise LawError(f"P does not type-check: {errors[0]}")

    i = Var(law.index)
    p_at_lo = substitute(law.prop, {law.index: law.lo})
    p_next = substitute(law.prop, {law.index: Arith("+", i, Num(1))})
    first = SpecStatement(frame, stmt.constants, stmt.pre, p_at_lo)
    # the loop guard joins the body's hypothesis, as in the iteration
    # law this one is built from; without it array recurrences would be
    # refuted at the out-of-range boundary
    body = SpecStatement(frame, stmt.constants,
                         _and_all(law.prop, Rel("<", i, law.hi)), p_next)

    try:
        lo_prog = spec_expr_to_prog(law.lo)
        hi_prog = spec_expr_to_prog(law.hi)
    except ProgError as exc:
        raise LawError(f"range bound has no program form: {exc}") from exc
    code = seq_of([
        Hole(0),
        Assign(law.index, lo_prog),
        While(PBin("<", PName(law.index), hi_prog),
              seq_of([Hole(1),
                      Assign(law.index, PBin("+", PName(law.index), PNum(1)))])),
    ])
    covered = Quant("forall", idx_param,
                    Implies(And(Rel("<=", law.lo, i), Rel("<", i, law.hi)),
                            law.prop))
    # the loop exits with the property also established at the upper bound
    at_hi = substitute(law.prop, {law.index: law.hi})
    return RefinementStep(
        children=(first, body),
        code=code,
        obligations=[ob("traverse-cover", _and_all(covered, at_hi), stmt.post)],
    )


def instantiate(e: SpecExpr, bindings: Mapping[str, SpecExpr]) -> SpecExpr:
    """Substitution of formal parameters (variants or constants alike)
    by argument expressions, for procedure-value specifications."""
    from ..spec_lang.ast import _rebuild  # shared node rebuilder

    def go(e, bound):
        if isinstance(e, (Var, ConstRef)):
            if e.name in bound:
                return e
            return bindings.get(e.name, e)
        if isinstance(e, Quant):
            return Quant(e.kind, e.param, go(e.body, bound | {e.param.name}))
        kids = e.children()
        if not kids:
            return e
        return _rebuild(e, tuple(go(c, bound) for c in kids))

    return go(e, frozenset())
