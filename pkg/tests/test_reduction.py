import pytest
from hypothesis import given, settings, strategies as st

from lmv.gen import GenConfig, gen_term, gen_value, item_rng
from lmv.reduction import (
    CBN_RULES,
    CBV_RULES,
    RedexSite,
    ReductionError,
    contract,
    find_redexes,
    format_path,
    normalize,
    parse_path,
    rules_at,
    step,
)
from lmv.syntax import parse_term, print_term
from lmv.terms import alpha_eq, is_value, occurrences, subterm_at

P = parse_term


@pytest.mark.parametrize("text, rule, result", [
    (r"(\x.<x,x> y)", "beta_v", "<y,y>"),
    ("(<x,y> p1)", "pi_v", "x"),
    ("(<x,y> p2)", "pi_v", "y"),
    ("(in1 z [x.(f x), y.y])", "D_v", "(f z)"),
    ("(in2 z [x.(f x), y.y])", "D_v", "z"),
    ("((u [x.v, y.w]) e)", "delta", "(u [x.(v e), y.(w e)])"),
    ("((u [x.v, y.w]) p1)", "delta", "(u [x.(v p1), y.(w p1)])"),
    ("(f (u [x.v, y.w]))", "delta_v'", "(u [x.(f v), y.(f w)])"),
    ("(mu @a.(@a x) e)", "mu", "mu @a.(@a (x e))"),
    ("(mu @a.(@a x) [y.y, z.z])", "mu", "mu @a.(@a (x [y.y, z.z]))"),
    ("(f mu @a.(@a x))", "mu_v'", "mu @a.(@a (f x))"),
])
def test_cbv_rules(text, rule, result):
    t = P(text)
    sites = find_redexes(t, "cbv")
    assert sites[0] == RedexSite((), rule)
    assert alpha_eq(contract(t, sites[0]), P(result))


@pytest.mark.parametrize("text", [
    r"(\x.x (f y))",
    "(<x,(f y)> p1)",
    "(in1 (f y) [x.x, y.y])",
    "((f y) mu @a.(@a x))",
    "((f y) (u [x.v, y.w]))",
])
def test_value_restrictions_block_cbv_but_not_cbn(text):
    t = P(text)
    assert rules_at(t, "cbv") == []
    assert len(rules_at(t, "cbn")) <= 1


@pytest.mark.parametrize("text, rule", [
    (r"(\x.x (f y))", "beta"),
    ("(<x,(f y)> p1)", "pi"),
    ("(in1 (f y) [x.x, y.y])", "D"),
])
def test_cbn_logical_rules(text, rule):
    assert rules_at(P(text), "cbn") == [rule]


def test_cbn_has_no_primed_rules():
    assert rules_at(P("(f mu @a.(@a x))"), "cbn") == []
    assert rules_at(P("(f (u [x.v, y.w]))"), "cbn") == []
    assert set(CBN_RULES) < set(CBV_RULES) | {"beta", "pi", "D"}


def test_delta_renames_case_binders_free_in_the_argument():
    t = P("((u [x.v, y.w]) x)")
    out = contract(t, RedexSite((), "delta"))
    assert alpha_eq(out, P("(u [x1.(v x), y.(w x)])"))


def test_mu_renames_binder_free_in_the_argument():
    t = P("(mu @a.(@b x) (@a y))")
    out = contract(t, RedexSite((), "mu"))
    assert alpha_eq(out, P("mu @c.(@b x)"))


def test_redexes_are_found_in_path_then_rule_order():
    t = P(r"((\x.x y) (<z,z> p1))")
    sites = find_redexes(t, "cbv")
    assert [format_path(s.occurrence) for s in sites] == ["0", "1"]


def test_contract_rejects_a_wrong_site():
    with pytest.raises(ReductionError):
        contract(P("(f x)"), RedexSite((), "beta_v"))
    with pytest.raises(ReductionError):
        contract(P("(f x)"), RedexSite((5,), "beta_v"))


def test_step_and_normal_forms():
    assert step(P("x")) is None
    site, out = step(P(r"(\x.x y)"))
    assert site == RedexSite((), "beta_v") and out == P("y")


def test_normalize_reports_exhaustion():
    omega = P(r"(\x.(x x) \x.(x x))")
    tr = normalize(omega, "cbv", fuel=5)
    assert tr.exhausted and len(tr.steps) == 5
    tr = normalize(P(r"(\x.x y)"), fuel=0)
    assert tr.exhausted and tr.final == P(r"(\x.x y)")
    tr = normalize(P("y"), fuel=0)
    assert not tr.exhausted


def test_normalize_example_term():
    tr = normalize(P("(((u [x.v,y.w]) [r.p,s.q]) e)"), "cbv", "lo")
    assert [s.rule for s, _ in tr.steps] == ["delta", "delta"]
    assert alpha_eq(tr.final, P("(u [x.(v [r.(p e),s.(q e)]), y.(w [r.(p e),s.(q e)])])"))


def test_random_strategy_is_seeded():
    t = P(r"((\x.x y) ((\x.x z) (<z,z> p1)))")
    a = normalize(t, strategy="random", seed=4)
    b = normalize(t, strategy="random", seed=4)
    assert [s for s, _ in a.steps] == [s for s, _ in b.steps]


def test_paths():
    assert format_path(()) == "."
    assert parse_path(".") == ()
    assert parse_path("0.1.1") == (0, 1, 1)
    with pytest.raises(ValueError):
        parse_path("0.x")


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 10**6))
def test_no_two_cbv_rules_share_an_occurrence(seed):
    t = gen_term(GenConfig(seed=seed, max_size=14), item_rng(seed, 0, "red"))
    for _, node in occurrences(t):
        assert len(rules_at(node, "cbv")) <= 1


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 10**6))
def test_values_reduce_to_values(seed):
    v = gen_value(GenConfig(seed=seed, max_size=10), item_rng(seed, 0, "red"))
    for site in find_redexes(v, "cbv"):
        assert is_value(contract(v, site))


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 10**6))
def test_contract_changes_only_below_the_site(seed):
    t = gen_term(GenConfig(seed=seed, max_size=10), item_rng(seed, 0, "red"))
    for site in find_redexes(t, "cbv"):
        out = contract(t, site)
        p = site.occurrence
        for path, node in occurrences(t):
            if not _related(path, p):
                # disjoint positions keep their subterm
                assert print_term(subterm_at(out, path)) == print_term(node)


def _related(a, b):
    n = min(len(a), len(b))
    return a[:n] == b[:n]
