"""SMT-LIB v2 emission for proof obligations, and model parsing.

The script asserts ``hypothesis /\\ ~conclusion``; ``unsat`` therefore
proves the obligation.  nat is a constrained Int, float is Real, arrays
use the standard theory with an explicit ``<name>__len`` symbol, and a
slice is translated as a shifted view of its base array.  Constructs
outside this fragment (array-typed binders, slice expansion nested in
more than two quantifiers) raise UnsupportedSmt and are reported
Unknown upstream.
"""

from __future__ import annotations

from fractions import Fraction

from ..refinement import ProofObligation
from ..spec_lang import (
    And,
    Arith,
    BoolLit,
    ConstRef,
    Implies,
    Init,
    Len,
    Neg,
    Not,
    Num,
    Or,
    PredApp,
    Quant,
    Rel,
    Select,
    SliceE,
    SpecError,
    SpecExpr,
    SpecType,
    Store,
    TypedParam,
    Var,
    free_vars,
    init_vars,
    walk,
)
from .guards import guarded_sides


class UnsupportedSmt(SpecError):
    pass


def _sort_of(ty: SpecType) -> str:
    if ty.kind == "bool":
        return "Bool"
    if ty.kind in ("nat", "int"):
        return "Int"
    if ty.kind == "float":
        return "Real"
    if ty.kind == "array":
        if ty.elem.kind == "array":
            raise UnsupportedSmt("nested arrays are outside the SMT fragment")
        return f"(Array Int {_sort_of(ty.elem)})"
    raise UnsupportedSmt(f"no SMT sort for {ty}")


class _View:
    """An array-typed term: how to select from it and its length."""

    def __init__(self, select_fn, length: str, elem_real: bool, native: str | None):
        self.select = select_fn
        self.length = length
        self.elem_real = elem_real
        self.native = native


class _Emitter:
    def __init__(self, params, defs):
        self.params = {p.name: p for p in params}
        self.defs = defs or {}
        self.lines: list[str] = []
        self.declared: set[str] = set()
        self.used_defs: list[str] = []
        self.locals: dict[str, SpecType] = {}
        self.qdepth = 0

    # -- declarations --------------------------------------------------------

    def declare(self, name: str, ty: SpecType):
        if name in self.declared:
            return
        self.declared.add(name)
        if ty.kind == "array":
            self.lines.append(f"(declare-const {name} {_sort_of(ty)})")
            self.lines.append(f"(declare-const {name}__len Int)")
            self.lines.append(f"(assert (>= {name}__len 0))")
            if ty.elem.kind == "nat":
                self.lines.append(
                    f"(assert (forall ((j Int)) (=> (and (<= 0 j) (< j {name}__len)) "
                    f"(>= (select {name} j) 0))))")
        else:
            self.lines.append(f"(declare-const {name} {_sort_of(ty)})")
            if ty.kind == "nat":
                self.lines.append(f"(assert (>= {name} 0))")

    def emit_def(self, name: str):
        if name in self.used_defs:
            return
        d = self.defs[name]
        for node in walk(d.body):
            if isinstance(node, PredApp):
                self.emit_def(node.name)
        saved = dict(self.locals)
        for p in d.params:
            if p.ty.kind == "array":
                raise UnsupportedSmt("array-typed definition parameters are "
                                     "outside the SMT fragment")
            self.locals[p.name] = p.ty
        body, kind = self.term(d.body)
        self.locals = saved
        params = " ".join(f"({p.name} {_sort_of(p.ty)})" for p in d.params)
        self.lines.append(f"(define-fun {name} ({params}) Bool {body})")
        self.used_defs.append(name)

    # -- terms ----------------------------------------------------------------

    def type_of_name(self, name: str) -> SpecType:
        if name in self.locals:
            return self.locals[name]
        p = self.params.get(name)
        if p is None:
            raise UnsupportedSmt(f"undeclared name {name!r}")
        self.declare(name, p.ty)
        return p.ty

    def term(self, e: SpecExpr) -> tuple[str, str]:
        """(text, kind) with kind in {bool,int,real,array}."""
        if isinstance(e, Num):
            if e.value.denominator == 1:
                n = e.value.numerator
                return (str(n) if n >= 0 else f"(- {-n})", "int")
            return (_real_literal(e.value), "real")
        if isinstance(e, BoolLit):
            return ("true" if e.value else "false", "bool")
        if isinstance(e, (Var, ConstRef)):
            ty = self.type_of_name(e.name)
            if ty.kind == "array":
                return (e.name, "array")
            return (e.name, _kind(ty))
        if isinstance(e, Neg):
            text, kind = self.term(e.expr)
            return (f"(- {text})", kind)
        if isinstance(e, Arith):
            lt, lk = self.term(e.left)
            rt, rk = self.term(e.right)
            op = e.op
            if op == "/":
                return (f"(/ {_to_real(lt, lk)} {_to_real(rt, rk)})", "real")
            if lk == "real" or rk == "real":
                return (f"({op} {_to_real(lt, lk)} {_to_real(rt, rk)})", "real")
            return (f"({op} {lt} {rt})", "int")
        if isinstance(e, Rel):
            return (self.relation(e), "bool")
        if isinstance(e, Not):
            return (f"(not {self.formula(e.expr)})", "bool")
        if isinstance(e, And):
            return (f"(and {self.formula(e.left)} {self.formula(e.right)})", "bool")
        if isinstance(e, Or):
            return (f"(or {self.formula(e.left)} {self.formula(e.right)})", "bool")
        if isinstance(e, Implies):
            return (f"(=> {self.formula(e.left)} {self.formula(e.right)})", "bool")
        if isinstance(e, Quant):
            return (self.quantifier(e), "bool")
        if isinstance(e, Select):
            view = self.view(e.array)
            idx, ik = self.term(e.index)
            if ik != "int":
                raise UnsupportedSmt("non-integer select index")
            return (view.select(idx), "real" if view.elem_real else "int")
        if isinstance(e, Len):
            return (self.view(e.array).length, "int")
        if isinstance(e, Init):
            raise AssertionError("Init must be grounded before emission")
        if isinstance(e, PredApp):
            self.emit_def(e.name)
            d = self.defs[e.name]
            args = []
            for arg, p in zip(e.args, d.params):
                text, kind = self.term(arg)
                want = _kind(p.ty)
                args.append(_to_real(text, kind) if want == "real" else text)
            return (f"({e.name} {' '.join(args)})" if args else e.name, "bool")
        if isinstance(e, (Store, SliceE)):
            raise UnsupportedSmt(f"{type(e).__name__} outside a select/compare "
                                 f"position is not emitted")
        raise UnsupportedSmt(f"cannot emit {type(e).__name__}")

    def formula(self, e: SpecExpr) -> str:
        text, kind = self.term(e)
        if kind != "bool":
            raise UnsupportedSmt("expected a formula")
        return text

    def relation(self, e: Rel) -> str:
        if self._is_arrayish(e.left) or self._is_arrayish(e.right):
            if e.op not in ("=", "<>"):
                raise UnsupportedSmt(f"ordering {e.op!r} on arrays")
            eq = self.array_equal(e.left, e.right)
            return eq if e.op == "=" else f"(not {eq})"
        lt, lk = self.term(e.left)
        rt, rk = self.term(e.right)
        if lk == "bool" or rk == "bool":
            if e.op not in ("=", "<>"):
                raise UnsupportedSmt(f"ordering {e.op!r} on booleans")
            eq = f"(= {lt} {rt})"
            return eq if e.op == "=" else f"(not {eq})"
        if lk == "real" or rk == "real":
            lt, rt = _to_real(lt, lk), _to_real(rt, rk)
        table = {"=": "=", "<": "<", "<=": "<=", ">": ">", ">=": ">="}
        if e.op == "<>":
            return f"(not (= {lt} {rt}))"
        return f"({table[e.op]} {lt} {rt})"

    def quantifier(self, e: Quant) -> str:
        ty = e.param.ty
        if ty.kind == "array":
            raise UnsupportedSmt("array-typed quantifier binders are outside "
                                 "the SMT fragment")
        saved = self.locals.get(e.param.name)
        had = e.param.name in self.locals
        self.locals[e.param.name] = ty
        self.qdepth += 1
        try:
            body = self.formula(e.body)
        finally:
            self.qdepth -= 1
            if had:
                self.locals[e.param.name] = saved
            else:
                self.locals.pop(e.param.name, None)
        name, sort = e.param.name, _sort_of(ty)
        if ty.kind == "nat":
            guard = f"(>= {name} 0)"
            body = (f"(=> {guard} {body})" if e.kind == "forall"
                    else f"(and {guard} {body})")
        return f"({e.kind} (({name} {sort})) {body})"

    # -- arrays -----------------------------------------------------------------

    def _is_arrayish(self, e: SpecExpr) -> bool:
        if isinstance(e, (Store, SliceE)):
            return True
        if isinstance(e, (Var, ConstRef)):
            ty = self.locals.get(e.name) or \
                (self.params[e.name].ty if e.name in self.params else None)
            return ty is not None and ty.kind == "array"
        return False

    def view(self, e: SpecExpr) -> _View:
        if isinstance(e, (Var, ConstRef)):
            ty = self.type_of_name(e.name)
            if ty.kind != "array":
                raise UnsupportedSmt(f"{e.name!r} is not an array")
            if ty.elem.kind == "array":
                raise UnsupportedSmt("nested arrays are outside the SMT fragment")
            name = e.name
            return _View(lambda i: f"(select {name} {i})", f"{name}__len",
                         ty.elem.kind == "float", name)
        if isinstance(e, Store):
            base = self.view(e.array)
            idx, ik = self.term(e.index)
            value, vk = self.term(e.value)
            if base.elem_real:
                value = _to_real(value, vk)
            if base.native is None:
                raise UnsupportedSmt("store on a slice view")
            native = f"(store {base.native} {idx} {value})"
            return _View(lambda i: f"(select {native} {i})", base.length,
                         base.elem_real, native)
        if isinstance(e, SliceE):
            if self.qdepth > 2:
                raise UnsupportedSmt("slice nested in more than two quantifiers")
            base = self.view(e.array)
            lo, lk = self.term(e.lo)
            hi, hk = self.term(e.hi)
            if lk != "int" or hk != "int":
                raise UnsupportedSmt("non-integer slice bounds")
            return _View(lambda i: base.select(f"(+ {lo} {i})"),
                         f"(- {hi} {lo})", base.elem_real, None)
        raise UnsupportedSmt(f"cannot view {type(e).__name__} as an array")

    def array_equal(self, left: SpecExpr, right: SpecExpr) -> str:
        if self.qdepth > 2:
            raise UnsupportedSmt("array comparison nested in more than two "
                                 "quantifiers")
        lv, rv = self.view(left), self.view(right)
        j = f"_j{self.qdepth}"
        self.qdepth += 1
        try:
            lsel, rsel = lv.select(j), rv.select(j)
        finally:
            self.qdepth -= 1
        if lv.elem_real != rv.elem_real:
            lsel = _to_real(lsel, "int" if not lv.elem_real else "real")
            rsel = _to_real(rsel, "int" if not rv.elem_real else "real")
        return (f"(and (= {lv.length} {rv.length}) "
                f"(forall (({j} Int)) (=> (and (<= 0 {j}) (< {j} {lv.length})) "
                f"(= {lsel} {rsel}))))")


def _kind(ty: SpecType) -> str:
    return {"bool": "bool", "nat": "int", "int": "int", "float": "real"}[ty.kind]


def _to_real(text: str, kind: str) -> str:
    if kind == "real":
        return text
    if kind == "int":
        return f"(to_real {text})"
    raise UnsupportedSmt("cannot coerce a non-numeric term to Real")


def _real_literal(v: Fraction) -> str:
    num = v.numerator
    if num < 0:
        return f"(- {_real_literal(-v)})"
    if v.denominator == 1:
        return f"{num}.0"
    return f"(/ {num}.0 {v.denominator}.0)"


def ground_inits(e: SpecExpr, frame_names: set[str]) -> SpecExpr:
    """Replace Init subterms by reads of fresh ``<name>_0`` constants."""
    from ..spec_lang.ast import _rebuild

    def go(node, inside):
        if isinstance(node, Init):
            return go(node.expr, True)
        if isinstance(node, Var) and inside and node.name in frame_names:
            return Var(f"{node.name}_0")
        if isinstance(node, Quant):
            return Quant(node.kind, node.param, go(node.body, inside))
        kids = node.children()
        if not kids:
            return node
        return _rebuild(node, tuple(go(c, inside) for c in kids))

    return go(e, False)


def emit_smtlib(ob: ProofObligation, defs=None) -> str:
    """SMT-LIB v2 script asserting hypothesis and negated conclusion."""
    hyp, concl = guarded_sides(ob)
    frame_names = {p.name for p in ob.params}
    inits = (init_vars(hyp) | init_vars(concl)) & frame_names
    hyp = ground_inits(hyp, frame_names)
    concl = ground_inits(concl, frame_names)

    by_name = {p.name: p for p in ob.params}
    params = list(ob.params)
    for name in sorted(inits):
        params.append(TypedParam(f"{name}_0", by_name[name].ty, by_name[name].kind))

    emitter = _Emitter(params, defs)
    mentioned = free_vars(hyp) | free_vars(concl)
    for p in params:
        if p.name in mentioned:
            emitter.declare(p.name, p.ty)
    hyp_text = emitter.formula(hyp)
    concl_text = emitter.formula(concl)

    lines = ["(set-logic ALL)"]
    lines.extend(emitter.lines)
    lines.append(f"(assert {hyp_text})")
    lines.append(f"(assert (not {concl_text}))")
    lines.append("(check-sat)")
    lines.append("(get-model)")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Model parsing


def _tokenize_sexpr(text: str):
    out = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
        elif c in "()":
            out.append(c)
            i += 1
        elif c == ";":
            while i < n and text[i] != "\n":
                i += 1
        elif c == "\"":
            j = i + 1
            while j < n and text[j] != "\"":
                j += 1
            out.append(text[i:j + 1])
            i = j + 1
        else:
            j = i
            while j < n and not text[j].isspace() and text[j] not in "();":
                j += 1
            out.append(text[i:j])
            i = j
    return out


def _read_sexprs(tokens):
    stack = [[]]
    for tok in tokens:
        if tok == "(":
            stack.append([])
        elif tok == ")":
            done = stack.pop()
            if not stack:
                raise ValueError("unbalanced model output")
            stack[-1].append(done)
        else:
            stack[-1].append(tok)
    return stack[0]


class ArrayModel:
    def __init__(self, default=Fraction(0)):
        self.default = default
        self.stores: dict[int, object] = {}

    def materialize(self, length: int) -> tuple:
        return tuple(self.stores.get(i, self.default) for i in range(length))

    @property
    def max_index(self):
        return max(self.stores, default=-1)


def _parse_value(sexpr):
    if isinstance(sexpr, str):
        if sexpr == "true":
            return True
        if sexpr == "false":
            return False
        return Fraction(sexpr)
    if not sexpr:
        raise ValueError("empty value")
    head = sexpr[0]
    if head == "-" and len(sexpr) == 2:
        return -_parse_value(sexpr[1])
    if head == "/" and len(sexpr) == 3:
        return _parse_value(sexpr[1]) / _parse_value(sexpr[2])
    if head == "store" and len(sexpr) == 4:
        base = _parse_value(sexpr[1])
        if not isinstance(base, ArrayModel):
            raise ValueError("store on a non-array value")
        idx = _parse_value(sexpr[2])
        out = ArrayModel(base.default)
        out.stores = dict(base.stores)
        out.stores[int(idx)] = _parse_value(sexpr[3])
        return out
    if isinstance(head, list) and head[:2] == ["as", "const"]:
        out = ArrayModel(_parse_value(sexpr[1]))
        return out
    raise ValueError(f"cannot parse model value {sexpr!r}")


def parse_model(text: str) -> dict:
    """define-fun entries of a solver model -> name to raw value."""
    forms = _read_sexprs(_tokenize_sexpr(text))
    entries = []
    for form in forms:
        if not isinstance(form, list):
            continue
        if form and form[0] == "model":
            entries.extend(form[1:])
        elif form and isinstance(form[0], list):
            entries.extend(form)
        else:
            entries.append(form)
    out = {}
    for entry in entries:
        if not (isinstance(entry, list) and len(entry) >= 5
                and entry[0] == "define-fun" and entry[2] == []):
            continue
        name = entry[1]
        try:
            out[name] = _parse_value(entry[4])
        except (ValueError, ZeroDivisionError):
            continue
    return out


def model_to_valuation(raw: dict, ob: ProofObligation) -> dict:
    """Raw model values -> a counterexample valuation keyed like the
    bounded checker's (``x`` plus ``x_0`` init axes)."""
    by_name = {p.name: p for p in ob.params}
    inits = init_vars(ob.hypothesis) | init_vars(ob.conclusion)
    names = set(free_vars(ob.hypothesis) | free_vars(ob.conclusion))
    out = {}
    wanted: list[tuple[str, TypedParam]] = []
    for name in sorted(names & set(by_name)):
        wanted.append((name, by_name[name]))
    for name in sorted(inits & set(by_name)):
        wanted.append((f"{name}_0", by_name[name]))
    for key, param in wanted:
        value = raw.get(key)
        if param.ty.kind == "array":
            length_v = raw.get(f"{key}__len")
            arr = value if isinstance(value, ArrayModel) else ArrayModel()
            if length_v is None:
                length = arr.max_index + 1
            else:
                length = max(int(length_v), 0)
            elem_default = Fraction(0) if param.ty.elem.kind != "bool" else False
            if not isinstance(arr.default, bool) and param.ty.elem.kind == "bool":
                arr = ArrayModel(elem_default)
            out[key] = arr.materialize(length)
        elif value is None:
            out[key] = _default_value(param.ty)
        else:
            out[key] = value
    return out


def _default_value(ty: SpecType):
    if ty.kind == "bool":
        return False
    if ty.kind == "array":
        return ()
    return Fraction(0)
