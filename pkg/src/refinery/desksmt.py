"""A desk-scale SMT-LIB v2 solver run as a subprocess.

Reads a script (file argument or stdin), answers ``sat``/``unsat``/
``unknown`` on the first line, and prints a model after ``(get-model)``
when satisfiable.  Scope: quantifier-free Bool/Int/Real with arrays as
opaque values.

* ``unsat`` comes from a sound refutation: negation normal form,
  disjunctive normal form, each cube abstracted to linear constraints
  over its monomials (with even-power positivity) and refuted by exact
  Fourier-Motzkin elimination.
* ``sat`` comes from a bounded model search over small rational grids;
  every reported model has been checked by direct evaluation.
* Anything else (quantifiers, undecided cubes, budget overruns) is
  ``unknown``.

This module is intentionally self-contained: it is the external-solver
side of the pipe and shares no code with the verifier that calls it.
"""

from __future__ import annotations

import itertools
import sys
from fractions import Fraction

MAX_CUBES = 8000
MAX_CONSTRAINTS = 4000
MAX_CANDIDATES = 400_000
MAX_NEQ_SPLITS = 6


# ---------------------------------------------------------------------------
# S-expressions


def tokenize(text: str) -> list[str]:
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
        elif c == "|":
            j = text.index("|", i + 1)
            out.append(text[i:j + 1])
            i = j + 1
        elif c == '"':
            j = text.index('"', i + 1)
            out.append(text[i:j + 1])
            i = j + 1
        else:
            j = i
            while j < n and not text[j].isspace() and text[j] not in "();":
                j += 1
            out.append(text[i:j])
            i = j
    return out


def read_forms(tokens: list[str]) -> list:
    stack: list[list] = [[]]
    for tok in tokens:
        if tok == "(":
            stack.append([])
        elif tok == ")":
            done = stack.pop()
            if not stack:
                raise SmtInputError("unbalanced parentheses")
            stack[-1].append(done)
        else:
            stack[-1].append(tok)
    if len(stack) != 1:
        raise SmtInputError("unbalanced parentheses")
    return stack[0]


class SmtInputError(Exception):
    pass


class GiveUp(Exception):
    """The input is outside the decided fragment."""


# ---------------------------------------------------------------------------
# Values


class ArrVal:
    """A total Int-indexed map with a default."""

    __slots__ = ("default", "stores")

    def __init__(self, default, stores=None):
        self.default = default
        self.stores = stores or {}

    def get(self, i):
        return self.stores.get(i, self.default)

    def set(self, i, v):
        stores = dict(self.stores)
        stores[i] = v
        return ArrVal(self.default, stores)

    def __eq__(self, other):
        if not isinstance(other, ArrVal):
            return NotImplemented
        if self.default != other.default:
            return False
        keys = set(self.stores) | set(other.stores)
        return all(self.get(k) == other.get(k) for k in keys)

    def __hash__(self):
        return hash(self.default)


def is_numeral(tok: str) -> bool:
    if not tok:
        return False
    body = tok[1:] if tok[0] == "-" else tok
    return body.replace(".", "", 1).isdigit() if body else False


# ---------------------------------------------------------------------------
# Solver state


class Solver:
    def __init__(self):
        self.sorts: dict[str, object] = {}    # const name -> sort
        self.defines: dict[str, tuple] = {}   # name -> (params, body)
        self.asserts: list = []
        self.last_verdict: str | None = None
        self.model: dict | None = None
        self.out: list[str] = []
        self.poisoned = False  # an undigested declaration or assert

    # -- script driving ------------------------------------------------------

    def run_script(self, text: str) -> str:
        try:
            forms = read_forms(tokenize(text))
        except SmtInputError as exc:
            return f'(error "{exc}")\n'
        for form in forms:
            try:
                self.command(form)
            except SmtInputError as exc:
                self.out.append(f'(error "{exc}")')
            except GiveUp:
                # whatever we failed to digest may constrain the
                # formula, so no later answer can be definitive
                self.poisoned = True
            except (IndexError, KeyError, TypeError, ValueError,
                    ZeroDivisionError) as exc:
                self.out.append(f'(error "malformed command: {exc}")')
                self.poisoned = True
        return "\n".join(self.out) + "\n"

    def command(self, form):
        if not isinstance(form, list) or not form:
            raise SmtInputError(f"bad command {form!r}")
        head = form[0]
        if head in ("set-logic", "set-info", "set-option", "push", "pop", "echo"):
            return
        if head == "exit":
            return
        if head == "declare-const":
            self.sorts[form[1]] = parse_sort(form[2])
            return
        if head == "declare-fun":
            if form[2] != []:
                raise GiveUp  # uninterpreted functions are out of scope
            self.sorts[form[1]] = parse_sort(form[3])
            return
        if head == "define-fun":
            name, params, _sort, body = form[1], form[2], form[3], form[4]
            plist = [(p[0], parse_sort(p[1])) for p in params]
            self.defines[name] = (plist, body)
            return
        if head == "assert":
            self.asserts.append(self.expand(form[1], {}))
            return
        if head == "check-sat":
            try:
                verdict = self.check_sat()
            except GiveUp:
                verdict = "unknown"
            self.last_verdict = verdict
            self.out.append(verdict)
            return
        if head == "get-model":
            if self.last_verdict == "sat" and self.model is not None:
                self.out.append(self.render_model())
            else:
                self.out.append('(error "model is not available")')
            return
        raise SmtInputError(f"unknown command {head!r}")

    def expand(self, term, binding):
        """Inline define-fun macros and substitute bound parameters."""
        if isinstance(term, str):
            if term in binding:
                return binding[term]
            if term in self.defines and not self.defines[term][0]:
                return self.expand(self.defines[term][1], {})
            return term
        head = term[0] if term else None
        if isinstance(head, str) and head in self.defines:
            params, body = self.defines[head]
            if len(params) != len(term) - 1:
                raise SmtInputError(f"bad arity for {head}")
            inner = {p[0]: self.expand(a, binding)
                     for p, a in zip(params, term[1:])}
            return self.expand(body, inner)
        if isinstance(head, str) and head in ("forall", "exists"):
            names = {p[0] for p in term[1]}
            kept = {k: v for k, v in binding.items() if k not in names}
            return [head, term[1], self.expand(term[2], kept)]
        return [self.expand(t, binding) for t in term]

    # -- sorts ----------------------------------------------------------------

    def sort_of(self, term, env=None) -> object:
        env = env or {}
        if isinstance(term, str):
            if term in ("true", "false"):
                return "Bool"
            if is_numeral(term):
                return "Real" if "." in term else "Int"
            if term in env:
                return env[term]
            if term in self.sorts:
                return self.sorts[term]
            raise GiveUp
        head = term[0]
        if head in ("and", "or", "not", "=>", "=", "distinct", "<", "<=",
                    ">", ">=", "forall", "exists"):
            return "Bool"
        if head == "to_real":
            return "Real"
        if head == "/":
            return "Real"
        if head in ("+", "-", "*"):
            sorts = [self.sort_of(t, env) for t in term[1:]]
            return "Real" if "Real" in sorts else "Int"
        if head == "select":
            arr = self.sort_of(term[1], env)
            if isinstance(arr, tuple) and arr[0] == "Array":
                return arr[2]
            raise GiveUp
        if head == "store":
            return self.sort_of(term[1], env)
        if head == "ite":
            return self.sort_of(term[2], env)
        raise GiveUp

    # -- decision -----------------------------------------------------------

    def check_sat(self) -> str:
        if self.poisoned:
            return "unknown"
        formula = ["and"] + self.asserts if self.asserts else "true"
        has_quant = _has_quantifier(formula)
        if not has_quant:
            try:
                if self.refute(formula):
                    return "unsat"
            except GiveUp:
                pass
            model = self.search_model(formula)
            if model is not None:
                self.model = model
                return "sat"
        return "unknown"

    # sat side ---------------------------------------------------------------

    def search_model(self, formula):
        if not self.sorts:
            return {} if self.evaluate(formula, {}) is True else None
        conjuncts = _flatten_and(formula)
        derived = self._equality_bindings(conjuncts)
        names = [n for n in self.sorts if n not in derived]
        grids = []
        total = 1
        for name in names:
            grid = _grid_for(self.sorts[name])
            grids.append(grid)
            total *= len(grid)
            if total > MAX_CANDIDATES:
                return None
        for combo in itertools.product(*grids):
            asg = dict(zip(names, combo))
            ok = True
            try:
                for name, term in derived.items():
                    asg[name] = self.evaluate(term, asg)
                for part in conjuncts:
                    if self.evaluate(part, asg) is not True:
                        ok = False
                        break
            except (ZeroDivisionError, GiveUp):
                ok = False
            if ok:
                return asg
        return None

    def _equality_bindings(self, conjuncts) -> dict:
        """Names whose value is forced by a top-level equality; they are
        computed instead of enumerated.  Bindings are kept flat: a bound
        term never mentions another bound name."""
        subst: dict[str, object] = {}
        for c in conjuncts:
            if not (isinstance(c, list) and len(c) == 3 and c[0] == "="):
                continue
            for u, v in ((c[1], c[2]), (c[2], c[1])):
                if not (isinstance(u, str) and u in self.sorts and u not in subst):
                    continue
                if _mentions_any(v, set(subst) | {u}):
                    continue
                for key in list(subst):
                    subst[key] = _replace(subst[key], u, v)
                subst[u] = v
                break
        return subst

    def evaluate(self, term, asg):
        if isinstance(term, str):
            if term == "true":
                return True
            if term == "false":
                return False
            if is_numeral(term):
                return Fraction(term)
            if term in asg:
                return asg[term]
            raise GiveUp
        head = term[0]
        args = term[1:]
        if head == "and":
            return all(self.evaluate(a, asg) is True for a in args)
        if head == "or":
            return any(self.evaluate(a, asg) is True for a in args)
        if head == "not":
            return self.evaluate(args[0], asg) is not True
        if head == "=>":
            value = True
            for a in args[:-1]:
                value = value and self.evaluate(a, asg) is True
                if not value:
                    return True
            return self.evaluate(args[-1], asg) is True
        if head == "=":
            vals = [self.evaluate(a, asg) for a in args]
            return all(v == vals[0] for v in vals[1:])
        if head == "distinct":
            vals = [self.evaluate(a, asg) for a in args]
            return len(set(map(_hashable, vals))) == len(vals)
        if head in ("<", "<=", ">", ">="):
            left = self.evaluate(args[0], asg)
            right = self.evaluate(args[1], asg)
            return {"<": left < right, "<=": left <= right,
                    ">": left > right, ">=": left >= right}[head]
        if head == "+":
            return sum(self.evaluate(a, asg) for a in args)
        if head == "-":
            if len(args) == 1:
                return -self.evaluate(args[0], asg)
            value = self.evaluate(args[0], asg)
            for a in args[1:]:
                value -= self.evaluate(a, asg)
            return value
        if head == "*":
            value = Fraction(1)
            for a in args:
                value *= self.evaluate(a, asg)
            return value
        if head == "/":
            value = self.evaluate(args[0], asg)
            for a in args[1:]:
                value = value / self.evaluate(a, asg)
            return value
        if head == "to_real":
            return self.evaluate(args[0], asg)
        if head == "select":
            arr = self.evaluate(args[0], asg)
            idx = self.evaluate(args[1], asg)
            if not isinstance(arr, ArrVal):
                raise GiveUp
            return arr.get(int(idx))
        if head == "store":
            arr = self.evaluate(args[0], asg)
            if not isinstance(arr, ArrVal):
                raise GiveUp
            return arr.set(int(self.evaluate(args[1], asg)),
                           self.evaluate(args[2], asg))
        if head == "ite":
            return self.evaluate(args[1] if self.evaluate(args[0], asg) is True
                                 else args[2], asg)
        raise GiveUp

    # unsat side --------------------------------------------------------------

    def refute(self, formula) -> bool:
        cubes = self.dnf(self.nnf(formula, True))
        for cube in cubes:
            if not self.cube_unsat(cube):
                raise GiveUp
        return True

    def nnf(self, term, positive):
        if isinstance(term, str):
            if term == "true":
                return "true" if positive else "false"
            if term == "false":
                return "false" if positive else "true"
            return term if positive else ["not", term]
        head = term[0]
        args = term[1:]
        if head == "not":
            return self.nnf(args[0], not positive)
        if head in ("and", "or"):
            flipped = {"and": "or", "or": "and"}[head]
            return [head if positive else flipped] + \
                [self.nnf(a, positive) for a in args]
        if head == "=>":
            expanded = ["or"] + [["not", a] for a in args[:-1]] + [args[-1]]
            return self.nnf(expanded, positive)
        if head in ("forall", "exists"):
            raise GiveUp
        if head == "=" and len(args) == 2 and self._is_bool(args[0]):
            a, b = args
            if positive:
                return ["or", ["and", self.nnf(a, True), self.nnf(b, True)],
                        ["and", self.nnf(a, False), self.nnf(b, False)]]
            return ["or", ["and", self.nnf(a, True), self.nnf(b, False)],
                    ["and", self.nnf(a, False), self.nnf(b, True)]]
        if head == "ite":
            raise GiveUp
        if head == "distinct":
            raise GiveUp
        return term if positive else ["not", term]

    def _is_bool(self, term) -> bool:
        try:
            return self.sort_of(term) == "Bool"
        except GiveUp:
            return False

    def dnf(self, term) -> list[list]:
        if isinstance(term, list) and term and term[0] == "and":
            cubes = [[]]
            for part in term[1:]:
                sub = self.dnf(part)
                cubes = [c + s for c in cubes for s in sub]
                if len(cubes) > MAX_CUBES:
                    raise GiveUp
            return cubes
        if isinstance(term, list) and term and term[0] == "or":
            out = []
            for part in term[1:]:
                out.extend(self.dnf(part))
                if len(out) > MAX_CUBES:
                    raise GiveUp
            return out
        if term == "true":
            return [[]]
        if term == "false":
            return []
        return [[term]]

    def cube_unsat(self, cube) -> bool:
        bools: dict[str, bool] = {}
        eqs: list[dict] = []
        ineqs: list[tuple[dict, bool]] = []  # poly <= 0 (strict flag)
        neqs: list[dict] = []

        def add_literal(lit) -> bool:
            positive = True
            while isinstance(lit, list) and lit and lit[0] == "not":
                positive = not positive
                lit = lit[1]
            if lit == "true":
                return positive
            if lit == "false":
                return not positive
            if isinstance(lit, str):
                key = lit
                if key in bools and bools[key] != positive:
                    return False
                bools[key] = positive
                return True
            head = lit[0]
            if head in ("<", "<=", ">", ">=", "="):
                left = self.poly(lit[1])
                right = self.poly(lit[2])
                diff = poly_sub(left, right)
                op = head if positive else \
                    {"<": ">=", "<=": ">", ">": "<=", ">=": "<", "=": "<>"}[head]
                if op == "=":
                    eqs.append(diff)
                elif op == "<>":
                    neqs.append(diff)
                elif op == "<":
                    ineqs.append((diff, True))
                elif op == "<=":
                    ineqs.append((diff, False))
                elif op == ">":
                    ineqs.append((poly_neg(diff), True))
                else:
                    ineqs.append((poly_neg(diff), False))
                return True
            # bool-sorted opaque term (e.g. select on a bool array)
            key = render_term(lit)
            if key in bools and bools[key] != positive:
                return False
            bools[key] = positive
            return True

        for lit in cube:
            if not add_literal(lit):
                return True  # propositional clash refutes the cube

        if len(neqs) > MAX_NEQ_SPLITS:
            raise GiveUp
        for signs in itertools.product((True, False), repeat=len(neqs)):
            branch = list(ineqs)
            for diff, as_less in zip(neqs, signs):
                branch.append((diff if as_less else poly_neg(diff), True))
            if not linear_unsat(list(eqs), branch):
                return False
        return True

    def poly(self, term) -> dict:
        """Exact polynomial over monomials; non-polynomial subterms
        become opaque variables (a sound linear abstraction)."""
        if isinstance(term, str):
            if is_numeral(term):
                return {(): Fraction(term)}
            return {((term, 1),): Fraction(1)}
        head = term[0]
        args = term[1:]
        if head == "+":
            out: dict = {}
            for a in args:
                out = poly_add(out, self.poly(a))
            return out
        if head == "-":
            if len(args) == 1:
                return poly_neg(self.poly(args[0]))
            out = self.poly(args[0])
            for a in args[1:]:
                out = poly_sub(out, self.poly(a))
            return out
        if head == "*":
            out = {(): Fraction(1)}
            for a in args:
                out = poly_mul(out, self.poly(a))
                if len(out) > 400:
                    raise GiveUp
            return out
        if head == "/":
            numer = self.poly(args[0])
            for a in args[1:]:
                denom = self.poly(a)
                if set(denom) <= {()}:
                    c = denom.get((), Fraction(0))
                    if c == 0:
                        raise GiveUp
                    numer = {m: v / c for m, v in numer.items()}
                else:
                    return {((render_term(term), 1),): Fraction(1)}
            return numer
        if head == "to_real":
            return self.poly(args[0])
        # select and anything else: opaque scalar
        return {((render_term(term), 1),): Fraction(1)}

    # -- model output -----------------------------------------------------------

    def render_model(self) -> str:
        lines = ["("]
        for name in self.sorts:
            sort = self.sorts[name]
            value = self.model.get(name)
            if value is None:
                continue
            lines.append(f"  (define-fun {name} () {render_sort(sort)} "
                         f"{render_value(value, sort)})")
        lines.append(")")
        return "\n".join(lines)


# ---------------------------------------------------------------------------
# Polynomials over monomials


def poly_add(a: dict, b: dict) -> dict:
    out = dict(a)
    for m, v in b.items():
        nv = out.get(m, Fraction(0)) + v
        if nv:
            out[m] = nv
        else:
            out.pop(m, None)
    return out


def poly_neg(a: dict) -> dict:
    return {m: -v for m, v in a.items()}


def poly_sub(a: dict, b: dict) -> dict:
    return poly_add(a, poly_neg(b))


def poly_mul(a: dict, b: dict) -> dict:
    out: dict = {}
    for m1, v1 in a.items():
        for m2, v2 in b.items():
            m = mono_mul(m1, m2)
            nv = out.get(m, Fraction(0)) + v1 * v2
            if nv:
                out[m] = nv
            else:
                out.pop(m, None)
    return out


def mono_mul(m1: tuple, m2: tuple) -> tuple:
    powers: dict[str, int] = {}
    for var, exp in m1 + m2:
        powers[var] = powers.get(var, 0) + exp
    return tuple(sorted(powers.items()))


# ---------------------------------------------------------------------------
# Linear refutation (Fourier-Motzkin over monomial variables)


def linear_unsat(eqs: list[dict], ineqs: list[tuple[dict, bool]]) -> bool:
    """True iff the constraint set (eq = 0, poly <= 0 / < 0) is
    infeasible over the rationals, treating each monomial as an
    independent variable with even powers known nonnegative."""
    monos = set()
    for p in eqs:
        monos.update(m for m in p if m != ())
    for p, _ in ineqs:
        monos.update(m for m in p if m != ())
    ineqs = list(ineqs)
    for m in monos:
        if all(exp % 2 == 0 for _, exp in m):
            ineqs.append(({m: Fraction(-1)}, False))  # m >= 0

    # substitute equalities out
    eqs = [dict(p) for p in eqs]
    while eqs:
        p = eqs.pop()
        target = next((m for m in p if m != ()), None)
        if target is None:
            if p.get((), Fraction(0)) != 0:
                return True
            continue
        coef = p[target]
        rest = {m: -v / coef for m, v in p.items() if m != target}
        eqs = [_subst(q, target, rest) for q in eqs]
        ineqs = [(_subst(q, target, rest), strict) for q, strict in ineqs]

    # eliminate variables one by one
    while True:
        constants = [(p, s) for p, s in ineqs if set(p) <= {()}]
        for p, strict in constants:
            c = p.get((), Fraction(0))
            if c > 0 or (strict and c == 0):
                return True
        variables = sorted({m for p, _ in ineqs for m in p if m != ()})
        if not variables:
            return False
        var = variables[0]
        uppers, lowers, rest = [], [], []
        for p, strict in ineqs:
            c = p.get(var, Fraction(0))
            if c > 0:
                uppers.append((p, strict, c))
            elif c < 0:
                lowers.append((p, strict, c))
            else:
                rest.append((p, strict))
        new = rest
        for (pu, su, cu) in uppers:
            for (pl, sl, cl) in lowers:
                combo = poly_add({m: v / cu for m, v in pu.items()},
                                 {m: -v / cl for m, v in pl.items()})
                combo.pop(var, None)
                new.append((combo, su or sl))
                if len(new) > MAX_CONSTRAINTS:
                    raise GiveUp
        ineqs = new


def _subst(p: dict, target: tuple, replacement: dict) -> dict:
    if target not in p:
        return dict(p)
    coef = p[target]
    out = {m: v for m, v in p.items() if m != target}
    return poly_add(out, {m: v * coef for m, v in replacement.items()})


# ---------------------------------------------------------------------------
# Sorts, grids, rendering


def parse_sort(form):
    if isinstance(form, str):
        if form in ("Bool", "Int", "Real"):
            return form
        raise GiveUp
    if len(form) == 3 and form[0] == "Array" and form[1] == "Int":
        return ("Array", "Int", parse_sort(form[2]))
    raise GiveUp


_INT_GRID = tuple(Fraction(i) for i in (0, 1, -1, 2, -2, 3, -3, 4, 5))
_REAL_GRID = tuple(Fraction(x) for x in
                   ("0", "1", "-1", "1/2", "-1/2", "2", "-2", "3/2", "3", "4",
                    "5", "1/4", "9/4"))


def _grid_for(sort):
    if sort == "Bool":
        return (False, True)
    if sort == "Int":
        return _INT_GRID
    if sort == "Real":
        return _REAL_GRID
    if isinstance(sort, tuple) and sort[0] == "Array":
        elem = _grid_for(sort[2])[:3]
        default = False if sort[2] == "Bool" else Fraction(0)
        candidates = [ArrVal(default)]
        for v in elem:
            candidates.append(ArrVal(default, {0: v}))
        for v in elem[:2]:
            for w in elem[:2]:
                candidates.append(ArrVal(default, {0: v, 1: w}))
        return tuple(candidates)
    raise GiveUp


def _hashable(v):
    if isinstance(v, ArrVal):
        return ("arr", v.default, tuple(sorted(v.stores.items())))
    return v


def render_term(term) -> str:
    if isinstance(term, str):
        return term
    return "(" + " ".join(render_term(t) for t in term) + ")"


def render_sort(sort) -> str:
    if isinstance(sort, tuple):
        return f"(Array Int {render_sort(sort[2])})"
    return sort


def render_value(value, sort) -> str:
    if sort == "Bool":
        return "true" if value else "false"
    if sort == "Int":
        n = int(value)
        return str(n) if n >= 0 else f"(- {-n})"
    if sort == "Real":
        return _render_real(value)
    if isinstance(sort, tuple) and sort[0] == "Array":
        elem_sort = sort[2]
        text = (f"((as const {render_sort(sort)}) "
                f"{render_value(value.default, elem_sort)})")
        for idx in sorted(value.stores):
            text = (f"(store {text} {idx} "
                    f"{render_value(value.stores[idx], elem_sort)})")
        return text
    raise GiveUp


def _render_real(v: Fraction) -> str:
    if v < 0:
        return f"(- {_render_real(-v)})"
    if v.denominator == 1:
        return f"{v.numerator}.0"
    return f"(/ {v.numerator}.0 {v.denominator}.0)"


def _flatten_and(formula) -> list:
    if isinstance(formula, list) and formula and formula[0] == "and":
        out = []
        for part in formula[1:]:
            out.extend(_flatten_and(part))
        return out
    return [formula]


def _mentions_any(term, names: set) -> bool:
    if isinstance(term, str):
        return term in names
    return any(_mentions_any(t, names) for t in term)


def _replace(term, name: str, repl):
    if isinstance(term, str):
        return repl if term == name else term
    return [_replace(t, name, repl) for t in term]


def _has_quantifier(term) -> bool:
    if isinstance(term, str):
        return False
    if term and term[0] in ("forall", "exists"):
        return True
    return any(_has_quantifier(t) for t in term if isinstance(t, (list, str)))


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    if argv:
        with open(argv[0], encoding="utf-8") as fh:
            text = fh.read()
    else:
        text = sys.stdin.read()
    solver = Solver()
    sys.stdout.write(solver.run_script(text))
    return 0


if __name__ == "__main__":
    sys.exit(main())
