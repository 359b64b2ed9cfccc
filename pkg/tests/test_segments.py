from itertools import combinations

import pytest
from hypothesis import given, settings, strategies as st

from lmv.gen import GenConfig, gen_term, item_rng
from lmv.segments import (
    SegmentCapExceeded,
    SegmentError,
    SegmentTree,
    SegmentWood,
    acceptors,
    buds,
    count_segment_trees,
    enumerate_segment_trees,
    extended_structural_reduce,
    is_segment_tree,
    maximal_segment_tree,
    restrict,
    segment_predecessor,
    segment_roots,
    segment_successors,
    tree_acceptors,
    validate_wood,
    wood_substitute,
)
from lmv.syntax import parse_term, print_term
from lmv.terms import App, Case, Mu, Named, Var, alpha_eq, children, is_segment_node, occurrences, replace_at, subterm_at

P = parse_term

E2 = P("(u [x. mu @a.(@a <x,(@a w)>), y. v])")
E3 = P(r"mu @a.(@a mu @b.(@b in2 \s.(@a in1 s)))")
MU = (1, 0)  # the mu @a. branch of E2


# -- an independent successor relation and a brute-force tree enumerator


def _succ(t, path=()):
    """Map each occurrence to its successors, found by one recursive walk."""
    out = {}

    def named_bodies(n, a, p):
        if isinstance(n, Mu) and n.name == a:
            return []
        found = [p + (0,)] if isinstance(n, Named) and n.name == a else []
        for i, k in enumerate(children(n)):
            found += named_bodies(k, a, p + (i,))
        return found

    def walk(n, p):
        if isinstance(n, App) and isinstance(n.arg, Case):
            out[p] = [p + (1, 0), p + (1, 1)]
        elif isinstance(n, Mu):
            out[p] = named_bodies(n.body, n.name, p + (0,))
        else:
            out[p] = []
        for i, k in enumerate(children(n)):
            walk(k, p + (i,))

    walk(t, path)
    return out


def _brute_trees(t, root):
    succ = _succ(t)
    seg = {p for p, n in occurrences(t) if is_segment_node(n)}
    pred = {c: p for p, cs in succ.items() for c in cs}
    # candidates: segment nodes reachable from root through segment nodes
    reach, todo = {root}, [root]
    while todo:
        for c in succ[todo.pop()]:
            if c in seg and c not in reach:
                reach.add(c)
                todo.append(c)
    others = sorted(reach - {root})
    trees = set()
    for k in range(len(others) + 1):
        for extra in combinations(others, k):
            s = {root, *extra}
            if all(pred.get(m) in s for m in extra):
                trees.add(frozenset(s))
    return trees


# -- successor relation


def test_successors_of_example():
    assert segment_successors(E2, ()) == [(1, 0), (1, 1)]
    assert segment_successors(E2, MU) == [(1, 0, 0, 0), (1, 0, 0, 0, 1, 0)]
    assert segment_successors(E2, (1, 1)) == []
    assert segment_predecessor(E2, (1, 0, 0, 0, 1, 0)) == MU
    assert segment_predecessor(E2, ()) is None


def test_shadowed_name_is_not_a_successor():
    t = P("mu @a.(@a mu @a.(@a x))")
    assert segment_successors(t, ()) == [(0, 0)]


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 10**6))
def test_successors_match_reference(seed):
    t = gen_term(GenConfig(seed=seed, max_size=12), item_rng(seed, 0, "seg"))
    ref = _succ(t)
    for p, _ in occurrences(t):
        assert segment_successors(t, p) == sorted(ref[p])


# -- trees


def test_example_trees_and_acceptors():
    trees = enumerate_segment_trees(E2)
    assert [t.sorted_members() for t in trees] == [[()], [(), MU]]
    assert tree_acceptors(E2, trees[0]) == [(1, 0), (1, 1)]
    assert tree_acceptors(E2, trees[1]) == [(1, 0, 0, 0), (1, 0, 0, 0, 1, 0), (1, 1)]
    assert maximal_segment_tree(E2) == trees[1]


def test_example_structural_reductions():
    t1, t2 = enumerate_segment_trees(E2)
    app = App(Var("V"), E2)
    assert alpha_eq(
        extended_structural_reduce(app, t1),
        P("(u [x. (V mu @a.(@a <x,(@a w)>)), y. (V v)])"),
    )
    assert alpha_eq(
        extended_structural_reduce(app, t2),
        P("(u [x. mu @a.(@a (V <x,(@a (V w))>)), y. (V v)])"),
    )
    right = extended_structural_reduce(App(E2, Var("e")), t1)
    assert alpha_eq(right, P("(u [x. (mu @a.(@a <x,(@a w)>) e), y. (v e)])"))


def test_structural_reduction_rejects_bad_shapes():
    with pytest.raises(SegmentError):
        extended_structural_reduce(App(Var("f"), Var("x")), SegmentTree((), frozenset({()})))
    with pytest.raises(SegmentError):
        extended_structural_reduce(App(Var("V"), E2), SegmentTree(MU, frozenset({MU})))


def test_root_must_be_predecessor_free():
    with pytest.raises(SegmentError):
        enumerate_segment_trees(E2, MU)
    with pytest.raises(SegmentError):
        enumerate_segment_trees(E2, (1, 1))


def test_cap_raises_instead_of_truncating():
    t = P("mu @a.(@a <(@a mu @b.(@b x)), <(@a mu @c.(@c y)), (@a mu @d.(@d z))>>)")
    assert count_segment_trees(t, ()) == 8
    with pytest.raises(SegmentCapExceeded):
        enumerate_segment_trees(t, (), cap=7)
    assert len(enumerate_segment_trees(t, (), cap=8)) == 8


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 10**6))
def test_enumeration_matches_brute_force(seed):
    t = gen_term(GenConfig(seed=seed, max_size=14), item_rng(seed, 0, "seg"))
    for root in segment_roots(t):
        got = enumerate_segment_trees(t, root, cap=10**6)
        assert {tr.members for tr in got} == _brute_trees(t, root)
        assert len(got) == count_segment_trees(t, root)
        assert all(is_segment_tree(t, tr) for tr in got)
        top = maximal_segment_tree(t, root)
        assert all(tr.members <= top.members for tr in got)
        # acceptors of the maximal tree are never segment nodes
        assert not any(is_segment_node(subterm_at(t, a)) for a in tree_acceptors(t, top))


# -- buds and woods


def test_buds_of_example():
    sub = (0, 0)
    inner = subterm_at(E3, sub)
    assert buds(inner) == [(), (0, 0, 0, 0, 0)]
    assert buds(E3) == [()]


def test_wood_example():
    o1, o2 = enumerate_segment_trees(E3)
    assert [t.sorted_members() for t in (o1, o2)] == [[()], [(), (0, 0)]]
    sub = (0, 0)
    q1 = restrict(E3, o1, sub)
    q2 = restrict(E3, o2, sub)
    assert q1 == SegmentWood((), frozenset({(), (0, 0, 0, 0, 0)}))
    assert q2 == SegmentWood((SegmentTree((), frozenset({()})),), frozenset({(0, 0, 0, 0, 0)}))
    assert q1.bud_set() == q2.bud_set()
    v = Var("V")
    want1 = P(r"mu @a.(@a (V mu @b.(@b in2 \s.(@a (V in1 s)))))")
    want2 = P(r"mu @a.(@a mu @b.(@b (V in2 \s.(@a (V in1 s)))))")
    inner = subterm_at(E3, sub)
    assert alpha_eq(replace_at(E3, sub, wood_substitute(inner, q1, v)), want1)
    assert alpha_eq(replace_at(E3, sub, wood_substitute(inner, q2, v)), want2)
    # the same terms from the trees of the whole term
    assert alpha_eq(wood_substitute(E3, o1, v), want1)
    assert alpha_eq(wood_substitute(E3, o2, v), want2)


def test_wood_validation():
    with pytest.raises(SegmentError):
        validate_wood(E2, SegmentWood((), frozenset({(1, 1)})))
    t = SegmentTree((), frozenset({()}))
    with pytest.raises(SegmentError):
        validate_wood(E2, SegmentWood((t, t), frozenset()))
    with pytest.raises(SegmentError):
        wood_substitute(E2, SegmentWood((), frozenset({()})), P("(f x)"))


def test_wood_acceptors_include_proper_buds():
    w = SegmentWood((), frozenset({()}))
    assert acceptors(E2, w) == [()]
    assert print_term(wood_substitute(E2, w, Var("e"), left=False)) == "((u [x.mu @a.(@a <x,(@a w)>), y.v]) e)"
