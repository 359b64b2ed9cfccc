import pytest
from hypothesis import given, settings, strategies as st

from lmv.formula import And, Arrow, Atom, BOTTOM, Or, print_formula
from lmv.gen import GenConfig, formula_pool, gen_term, gen_typed_term, item_rng, random_formula
from lmv.syntax import ParseError, parse_eterm, parse_formula, parse_term, print_eterm, print_term
from lmv.terms import App, Case, Inj, Lam, Mu, Named, Proj, Var, alpha_eq


def test_parse_builds_expected_tree():
    t = parse_term(r"(\x.x [y.in1 y, z.mu @a.(@a z)])")
    assert t == App(
        Lam("x", Var("x")),
        Case("y", Inj(1, Var("y")), "z", Mu("a", Named("a", Var("z")))),
    )


@pytest.mark.parametrize("text", [
    "x",
    r"\x.(x y)",
    "(x p1)",
    "(x p2)",
    "<x,<y,z>>",
    "in2 in1 x",
    "mu @a.(@a <x,(@a w)>)",
    "(u [x.mu @a.(@a <x,(@a w)>), y.v])",
    r"mu @a:(A -> B).(@a \x:A.mu @b:B.(@a \y:A.x))",
    r"\x:A & B | C.in1[A] x",
])
def test_print_is_a_fixed_point(text):
    t = parse_term(text)
    once = print_term(t, True)
    assert print_term(parse_term(once), True) == once


def test_annotations_print_only_on_request():
    t = parse_term(r"\x:A -> B.x")
    assert print_term(t) == r"\x.x"
    assert print_term(t, True) == r"\x:(A -> B).x"


def test_eterms():
    assert parse_eterm("p1") == Proj(1)
    assert print_eterm(parse_eterm("[x.x, y.y]")) == "[x.x, y.y]"
    assert print_eterm(parse_eterm("(f x)")) == "(f x)"


def test_whitespace_is_insignificant():
    assert alpha_eq(parse_term("  (f\n   x)  "), parse_term("(f x)"))


@pytest.mark.parametrize("text, line, col", [
    ("(f x", 1, 5),
    ("(f\n  ]", 2, 3),
    ("mu a.x", 1, 4),
    (r"\x.", 1, 4),
    ("x y", 1, 3),
])
def test_parse_errors_carry_positions(text, line, col):
    with pytest.raises(ParseError) as info:
        parse_term(text)
    assert info.value.line_col() == (line, col)
    assert info.value.format().startswith(f"{line}:{col}: ")


def test_parse_error_lists_expected_tokens():
    with pytest.raises(ParseError) as info:
        parse_term("(f")
    assert "expected" in info.value.format()


# -- formulas


def test_formula_precedence_and_associativity():
    a, b, c = Atom("A"), Atom("B"), Atom("C")
    assert parse_formula("A -> B -> C") == Arrow(a, Arrow(b, c))
    assert parse_formula("A & B | C -> #") == Arrow(Or(And(a, b), c), BOTTOM)
    assert print_formula(Arrow(Arrow(a, b), c)) == "(A -> B) -> C"
    assert print_formula(And(a, Or(b, c))) == "A & (B | C)"


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 10**6))
def test_formula_round_trip(seed):
    import random

    f = random_formula(random.Random(seed), 4)
    assert parse_formula(print_formula(f)) == f


# -- term round trip


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 16))
def test_untyped_round_trip(seed, n):
    t = gen_term(GenConfig(seed=seed, max_size=n), item_rng(seed, 0, "syntax"))
    assert alpha_eq(parse_term(print_term(t)), t)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**6))
def test_typed_round_trip_keeps_annotations(seed):
    rng = item_rng(seed, 0, "syntax")
    t = gen_typed_term(GenConfig(max_size=10), rng.choice(formula_pool()), rng)
    text = print_term(t, True)
    assert print_term(parse_term(text), True) == text
    assert parse_term(text) == t
