"""Specification language: parsing, printing, typing, substitution,
evaluation."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from refinery.spec_lang import (
    BOOL,
    CONSTANT,
    FLOAT,
    INT,
    NAT,
    And,
    Arith,
    BoolLit,
    ConstRef,
    EvalError,
    Init,
    Not,
    Num,
    Or,
    Quant,
    Rel,
    Select,
    SpecTypeError,
    SubstitutionError,
    TypedParam,
    UnknownIdentifier,
    Var,
    array_of,
    eval_spec,
    free_vars,
    init_vars,
    parse_definition,
    parse_spec_expr,
    render_spec_expr,
    substitute,
    type_check,
    type_errors,
)
from refinery.verifier import DomainSpec

ENV = [TypedParam("x", FLOAT), TypedParam("y", FLOAT),
       TypedParam("N", FLOAT, CONSTANT), TypedParam("e", FLOAT, CONSTANT)]
ARR_ENV = [TypedParam("a", array_of(INT)), TypedParam("n", NAT, CONSTANT)]


def parse(text, env=ENV, **kw):
    return parse_spec_expr(text, env, **kw)


class TestParser:
    def test_conjunction_of_relations(self):
        e = parse("x*x <= N /\\ N < y*y")
        assert e == And(Rel("<=", Arith("*", Var("x"), Var("x")), ConstRef("N")),
                        Rel("<", ConstRef("N"), Arith("*", Var("y"), Var("y"))))

    def test_chained_relation_desugars(self):
        assert parse("x*x <= N < y*y") == parse("x*x <= N /\\ N < y*y")

    def test_true_literal(self):
        assert parse("true") == BoolLit(True)

    def test_quantifier_over_selects(self):
        e = parse("forall (i:nat), a[i] <= a[i+1]", ARR_ENV)
        assert isinstance(e, Quant) and e.kind == "forall"
        assert isinstance(e.body, Rel)
        assert isinstance(e.body.left, Select)
        # round-trip confirms the shape
        assert parse(render_spec_expr(e), ARR_ENV) == e

    def test_precedence_not_binds_over_and(self):
        e = parse("~ x < y /\\ x < y")
        assert isinstance(e, And) and isinstance(e.left, Not)

    def test_precedence_or_under_implies(self):
        e = parse("x < y \\/ y < x -> x <> y")
        assert e == parse("(x < y \\/ y < x) -> (x <> y)")

    def test_unknown_identifier_named(self):
        with pytest.raises(UnknownIdentifier) as err:
            parse("x + z < y")
        assert err.value.name == "z"

    def test_syntax_error_has_position(self):
        with pytest.raises(Exception) as err:
            parse("x + + y")
        assert "line 1" in str(err.value)

    def test_rational_literal(self):
        assert parse("1/2") == Num(Fraction(1, 2))
        assert parse("0.5") == Num(Fraction(1, 2))

    def test_init_marker(self):
        assert parse("x_0") == Init(Var("x"))
        assert parse("(y - x)_0") == Init(Arith("-", Var("y"), Var("x")))

    def test_embedded_type_check(self):
        with pytest.raises(SpecTypeError):
            parse("true /\\ 1")

    def test_constants_resolve_to_const_nodes(self):
        assert parse("N") == ConstRef("N")
        assert parse("x") == Var("x")


class TestRender:
    def test_canonical_conjunction(self):
        e = parse("x*x <= N /\\ N < y*y")
        assert render_spec_expr(e) == "x*x <= N /\\ N < y*y"

    def test_init_rendering(self):
        assert render_spec_expr(Init(Var("x"))) == "x_0"

    def test_substituted_fig4_obligation_text(self):
        post = parse("x*x <= N /\\ N < y*y /\\ y <= x+e")
        got = substitute(post, {"x": Num(0), "y": parse("N+1")})
        assert render_spec_expr(got) == \
            "0*0 <= N /\\ N < (N+1)*(N+1) /\\ N+1 <= 0+e"


class TestSubstitution:
    def test_empty_binding_identity(self):
        e = parse("x*x <= N")
        assert substitute(e, {}) is e

    def test_capture_avoiding_rename(self):
        e = parse_spec_expr("exists (x:int), x > y", [TypedParam("y", INT)])
        got = substitute(e, {"y": Var("x")})
        assert render_spec_expr(got) == "exists (x1:int), x1 > x"

    def test_constant_target_rejected(self):
        with pytest.raises(SubstitutionError):
            substitute(parse("N < y"), {"N": Num(1)})

    def test_init_nodes_untouched(self):
        e = parse("x = x_0")
        got = substitute(e, {"x": Num(3)})
        assert got == Rel("=", Num(3), Init(Var("x")))

    def test_bound_occurrences_untouched(self):
        e = parse_spec_expr("forall (x:int), x > y", [TypedParam("y", INT)])
        got = substitute(e, {"y": Num(0)})
        assert got == parse_spec_expr("forall (x:int), x > 0",
                                      [TypedParam("y", INT)])


class TestFreeVars:
    def test_simple(self):
        assert free_vars(parse("x*x <= N")) == {"x", "N"}

    def test_bound_excluded(self):
        e = parse("forall (i:nat), a[i] = 0", ARR_ENV)
        assert free_vars(e) == {"a"}

    def test_fig4_post(self):
        e = parse("x*x <= N /\\ N < y*y /\\ y <= x+e")
        assert free_vars(e) == {"x", "y", "N", "e"}

    def test_init_vars(self):
        e = parse("x = x_0 /\\ y < (y - x)_0")
        assert init_vars(e) == {"x", "y"}


class TestTypeCheck:
    def test_bool_result(self):
        assert type_check(parse("N >= 0 /\\ e > 0", check_types=False), ENV) == BOOL

    def test_error_position_reported(self):
        errors = type_errors(parse("true /\\ 1", check_types=False), ENV)
        assert errors and "conjunct" in errors[0]

    def test_array_select_type(self):
        e = parse_spec_expr("a[0] + 1", ARR_ENV, check_types=False)
        assert type_check(e, ARR_ENV) == INT  # select int widened by nat + int

    def test_widening_nat_int_float(self):
        env = [TypedParam("k", NAT), TypedParam("z", INT), TypedParam("f", FLOAT)]
        assert type_check(parse_spec_expr("k + z", env), env) == INT
        assert type_check(parse_spec_expr("z + f", env), env) == FLOAT
        assert type_check(parse_spec_expr("k - k", env), env) == INT
        assert type_check(parse_spec_expr("k / k", env), env) == FLOAT

    def test_stable_under_substitution(self):
        post = parse("x*x <= N /\\ N < y*y /\\ y <= x+e")
        sub = substitute(post, {"x": Num(0), "y": parse("N+1")})
        assert type_check(sub, ENV) == BOOL


class TestEval:
    def test_rational_evaluation(self):
        assert eval_spec(parse("0*0 <= N"), {"N": Fraction(1, 2)}) is True

    def test_init_semantics(self):
        v = {"x": Fraction(2)}
        assert eval_spec(parse("x = x_0"), v, pre_state=v) is True
        assert eval_spec(parse("x = x_0"), {"x": Fraction(2)},
                         pre_state={"x": Fraction(1)}) is False

    def test_witness_region_below_one(self):
        # N < y*y fails exactly in the region the motivating bug lives in
        assert eval_spec(parse("N < y*y"),
                         {"N": Fraction(1, 2), "y": Fraction(3, 2)}) is True
        assert eval_spec(parse("N < y*y"),
                         {"N": Fraction(1, 2), "y": Fraction(1, 2)}) is False

    def test_division_by_zero(self):
        with pytest.raises(EvalError):
            eval_spec(parse("x / y < 1"), {"x": Fraction(1), "y": Fraction(0)})

    def test_index_out_of_bounds(self):
        e = parse_spec_expr("a[3] = 0", ARR_ENV, check_types=False)
        with pytest.raises(EvalError):
            eval_spec(e, {"a": (Fraction(1),)})

    def test_short_circuit_guards_select(self):
        e = parse_spec_expr("n <= len(a) /\\ (forall (i:nat), i < n -> a[i] = 0)",
                            ARR_ENV)
        v = {"a": (Fraction(0),), "n": Fraction(5)}
        assert eval_spec(e, v, domains=DomainSpec()) is False

    def test_quantifier_needs_domain(self):
        e = parse_spec_expr("forall (i:nat), i >= 0", [])
        with pytest.raises(EvalError):
            eval_spec(e, {})
        assert eval_spec(e, {}, domains=DomainSpec()) is True

    def test_slice_half_open(self):
        e = parse_spec_expr("a[0:2] = a[1:3]", ARR_ENV, check_types=False)
        v = {"a": (Fraction(7), Fraction(7), Fraction(7))}
        assert eval_spec(e, v) is True
        with pytest.raises(EvalError):
            eval_spec(parse_spec_expr("a[2:1] = a[0:0]", ARR_ENV,
                                      check_types=False), v)


class TestDefinitions:
    def test_parse_and_eval(self):
        env = [TypedParam("A", INT, CONSTANT)]
        d = parse_definition("divides (d:int) (m:int) := exists (q:int), m = d * q",
                             env)
        defs = {d.name: d}
        e = parse_spec_expr("divides(2, A)", env, defs)
        dom = DomainSpec(int_range=(-4, 4))
        assert eval_spec(e, {"A": Fraction(4)}, domains=dom, defs=defs) is True
        assert eval_spec(e, {"A": Fraction(3)}, domains=dom, defs=defs) is False


# ---------------------------------------------------------------------------
# Property tests

_NUM_ENV = [TypedParam("x", FLOAT), TypedParam("y", FLOAT),
            TypedParam("N", FLOAT, CONSTANT)]

_numeric = st.deferred(lambda: st.one_of(
    st.integers(-9, 9).map(lambda n: Num(Fraction(n))),
    st.fractions(min_value=-4, max_value=4).map(Num),
    st.sampled_from([Var("x"), Var("y"), ConstRef("N")]),
    st.sampled_from([Var("x"), Var("y")]).map(Init),
    st.tuples(st.sampled_from("+-*"), _numeric, _numeric).map(
        lambda t: Arith(t[0], t[1], t[2])),
))

_formula = st.deferred(lambda: st.one_of(
    st.booleans().map(BoolLit),
    st.tuples(st.sampled_from(["<", "<=", "=", ">", ">=", "<>"]),
              _numeric, _numeric).map(lambda t: Rel(t[0], t[1], t[2])),
    _formula.map(Not),
    st.tuples(_formula, _formula).map(lambda t: And(*t)),
    st.tuples(_formula, _formula).map(lambda t: Or(*t)),
    st.tuples(st.sampled_from(["forall", "exists"]),
              st.sampled_from(["i", "j"]), _formula).map(
        lambda t: Quant(t[0], TypedParam(t[1], NAT), t[2])),
))


@given(_formula)
@settings(max_examples=200, deadline=None)
def test_round_trip_formulas(e):
    env = _NUM_ENV + [TypedParam("i", NAT), TypedParam("j", NAT)]
    assert parse_spec_expr(render_spec_expr(e), env, check_types=False) == e


@given(_numeric)
@settings(max_examples=200, deadline=None)
def test_round_trip_terms(e):
    env = _NUM_ENV
    assert parse_spec_expr(render_spec_expr(e), env, check_types=False) == e


@given(_formula, _numeric,
       st.fractions(min_value=-3, max_value=3),
       st.fractions(min_value=-3, max_value=3),
       st.fractions(min_value=-3, max_value=3))
@settings(max_examples=150, deadline=None)
def test_substitution_soundness(e, repl, vx, vy, vn):
    """eval(e[x := E], v) == eval(e, v[x := eval(E, v)])"""
    v = {"x": vx, "y": vy, "N": vn}
    dom = DomainSpec(nat_range=(0, 2))
    try:
        replaced = eval_spec(repl, v, v, dom)
        left = eval_spec(substitute(e, {"x": repl}), v, v, dom)
        right = eval_spec(e, {**v, "x": replaced}, v, dom)
    except EvalError:
        return  # division by zero in a generated term
    assert left == right


_numeric_init_free = _numeric.filter(lambda e: not _walk_inits(e))


@given(_formula, _numeric_init_free)
@settings(max_examples=150, deadline=None)
def test_substitution_preserves_init_markers(e, repl):
    before = _walk_inits(e)
    after = _walk_inits(substitute(e, {"x": repl}))
    # substituting the current-state x never touches pre-state reads
    assert sorted(map(repr, before)) == sorted(map(repr, after))


def _walk_inits(e):
    from refinery.spec_lang import walk
    return [node for node in walk(e) if isinstance(node, Init)]
