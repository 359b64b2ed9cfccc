"""Segment-successors, segment-trees, buds, segment-woods, wood substitution
and extended structural reduction.

Everything is expressed with occurrences (paths) rather than subterms so
that equal subterms at different positions stay distinct.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Union

from .terms import (
    App,
    ETerm,
    Mu,
    Named,
    Term,
    children,
    fresh_marker,
    is_case_term,
    is_segment_node,
    is_value,
    label_at,
    occurrences,
    subterm_at,
    wrap_marked,
)

DEFAULT_CAP = 64


class SegmentError(ValueError):
    pass


class SegmentCapExceeded(SegmentError):
    def __init__(self, count: int, cap: int):
        self.count = count
        self.cap = cap
        super().__init__(f"{count} segment-trees exceed the cap of {cap}")


@dataclass(frozen=True)
class SegmentTree:
    root: tuple
    members: frozenset

    def sorted_members(self) -> list:
        return sorted(self.members)


@dataclass(frozen=True)
class SegmentWood:
    trees: tuple = ()
    proper_buds: frozenset = frozenset()

    @property
    def trunk_pieces(self) -> frozenset:
        out: frozenset = frozenset()
        for tr in self.trees:
            out |= tr.members
        return out

    @property
    def roots(self) -> frozenset:
        return frozenset(tr.root for tr in self.trees)

    def bud_set(self) -> frozenset:
        return self.proper_buds | self.roots


def as_wood(tree: SegmentTree) -> SegmentWood:
    return SegmentWood((tree,), frozenset())


# ---------------------------------------------------------------------------
# the successor relation


def _node(t: Term, o) -> Term:
    try:
        return subterm_at(t, o)
    except ValueError as exc:
        raise SegmentError(str(exc)) from None


def _named_bodies(body: Term, a: str, base: tuple) -> list:
    """Paths of ``v`` for every ``(a v)`` in ``body`` bound by the enclosing binder."""
    out = []
    stack = [(base, body)]
    while stack:
        path, n = stack.pop()
        if isinstance(n, Mu) and n.name == a:
            continue
        if isinstance(n, Named) and n.name == a:
            out.append(path + (0,))
        kids = children(n)
        for i in reversed(range(len(kids))):
            stack.append((path + (i,), kids[i]))
    return sorted(out)


def segment_successors(t: Term, o) -> list:
    o = tuple(o)
    n = _node(t, o)
    if is_case_term(n):
        return [o + (1, 0), o + (1, 1)]
    if isinstance(n, Mu):
        return _named_bodies(n.body, n.name, o + (0,))
    return []


def segment_predecessor(t: Term, o):
    """The unique segment-predecessor of ``o``, or ``None``."""
    o = tuple(o)
    if len(o) >= 2 and o[-2] == 1 and is_case_term(_node(t, o[:-2])):
        return o[:-2]
    if len(o) >= 1 and o[-1] == 0:
        parent = _node(t, o[:-1])
        if isinstance(parent, Named):
            a = parent.name
            for k in range(len(o) - 2, -1, -1):
                anc = _node(t, o[:k])
                if isinstance(anc, Mu) and anc.name == a:
                    return o[:k]
    return None


def segment_roots(t: Term) -> list:
    """Or-/bottom-eliminations with no segment-predecessor, in path order."""
    return [
        p for p, n in occurrences(t) if is_segment_node(n) and segment_predecessor(t, p) is None
    ]


def buds(t: Term) -> list:
    out = [()]
    for p, n in occurrences(t):
        if isinstance(n, Named) and _is_free_at(t, p, n.name):
            out.append(p + (0,))
    return sorted(out)


def _is_free_at(t: Term, p: tuple, a: str) -> bool:
    for k in range(len(p)):
        anc = subterm_at(t, p[:k])
        if isinstance(anc, Mu) and anc.name == a:
            return False
    return True


def is_bud(t: Term, o) -> bool:
    o = tuple(o)
    if o == ():
        return True
    if not o or o[-1] != 0:
        return False
    parent = _node(t, o[:-1])
    return isinstance(parent, Named) and _is_free_at(t, o[:-1], parent.name)


# ---------------------------------------------------------------------------
# segment-trees


def _check_root(t: Term, root) -> tuple:
    root = tuple(root)
    if not is_segment_node(_node(t, root)):
        raise SegmentError(f"root {list(root)} is not an or-/bottom-elimination")
    if segment_predecessor(t, root) is not None:
        raise SegmentError(f"root {list(root)} has a segment-predecessor")
    return root


def _seg_children(t: Term, o) -> list:
    return [c for c in segment_successors(t, o) if is_segment_node(subterm_at(t, c))]


def _count(t: Term, o, memo) -> int:
    if o not in memo:
        total = 1
        for c in _seg_children(t, o):
            total *= 1 + _count(t, c, memo)
        memo[o] = total
    return memo[o]


def count_segment_trees(t: Term, root) -> int:
    root = _check_root(t, root)
    return _count(t, root, {})


def _subtrees(t: Term, o) -> list:
    options = [[frozenset()] + _subtrees(t, c) for c in _seg_children(t, o)]
    return [frozenset({o}).union(*combo) for combo in product(*options)]


def _order(trees) -> list:
    return sorted(trees, key=lambda tr: (len(tr.members), tr.sorted_members()))


def enumerate_segment_trees(t: Term, root=(), cap: int = DEFAULT_CAP) -> list:
    """All segment-trees from ``root`` in ``t``, by size then path order.

    Raises :class:`SegmentCapExceeded` rather than truncating.
    """
    root = _check_root(t, root)
    n = _count(t, root, {})
    if n > cap:
        raise SegmentCapExceeded(n, cap)
    return _order(SegmentTree(root, m) for m in _subtrees(t, root))


def maximal_segment_tree(t: Term, root=()) -> SegmentTree:
    root = _check_root(t, root)
    members = set()
    todo = [root]
    while todo:
        o = todo.pop()
        members.add(o)
        todo.extend(_seg_children(t, o))
    return SegmentTree(root, frozenset(members))


def is_segment_tree(t: Term, tree: SegmentTree) -> bool:
    try:
        _check_root(t, tree.root)
    except SegmentError:
        return False
    if tree.root not in tree.members:
        return False
    for m in tree.members:
        if not is_segment_node(subterm_at(t, m)):
            return False
        # betweenness: walk predecessors up to the root, all must be members
        cur = m
        while cur != tree.root:
            cur = segment_predecessor(t, cur)
            if cur is None or cur not in tree.members:
                return False
    return True


def tree_acceptors(t: Term, tree: SegmentTree) -> list:
    out = set()
    for m in tree.members:
        for s in segment_successors(t, m):
            if s not in tree.members:
                out.add(s)
    return sorted(out)


def acceptors(t: Term, w: Union[SegmentTree, SegmentWood]) -> list:
    if isinstance(w, SegmentTree):
        return tree_acceptors(t, w)
    out = set(w.proper_buds)
    for tr in w.trees:
        out |= set(tree_acceptors(t, tr))
    return sorted(out)


# ---------------------------------------------------------------------------
# segment-woods


def validate_wood(t: Term, w: SegmentWood) -> None:
    seen = set()
    for tr in w.trees:
        if not is_segment_tree(t, tr):
            raise SegmentError(f"not a segment-tree: {tr.sorted_members()}")
        if not is_bud(t, tr.root):
            raise SegmentError(f"tree root {list(tr.root)} is not a bud")
        if seen & tr.members:
            raise SegmentError("segment-trees of a wood must be disjoint")
        seen |= tr.members
    for b in w.proper_buds:
        if not is_bud(t, b):
            raise SegmentError(f"proper-bud {list(b)} is not a bud")
    if seen & w.proper_buds:
        raise SegmentError("proper-buds must be disjoint from the trees")


def restrict(t: Term, w: Union[SegmentTree, SegmentWood], sub) -> SegmentWood:
    """The wood induced by ``w`` on the subterm at ``sub`` (paths relative to it)."""
    sub = tuple(sub)
    s = _node(t, sub)
    if isinstance(w, SegmentTree):
        w = as_wood(w)
    k = len(sub)

    def inside(ps):
        return {p[k:] for p in ps if p[:k] == sub}

    members = inside(w.trunk_pieces)
    accs = inside(acceptors(t, w))
    trees = []
    for m in sorted(members):
        pred = segment_predecessor(s, m)
        if pred is None or pred not in members:
            grown = {m}
            todo = [m]
            while todo:
                o = todo.pop()
                for c in _seg_children(s, o):
                    if c in members and c not in grown:
                        grown.add(c)
                        todo.append(c)
            trees.append(SegmentTree(m, frozenset(grown)))
    tree_accs = set()
    for tr in trees:
        tree_accs |= set(tree_acceptors(s, tr))
    wood = SegmentWood(tuple(trees), frozenset(accs - tree_accs))
    validate_wood(s, wood)
    return wood


def wood_substitute(t: Term, w: Union[SegmentTree, SegmentWood], payload: ETerm, left: bool = True) -> Term:
    """``t[V/Q]`` (left) wraps each acceptor ``v`` as ``(V v)``; ``t[e/Q]`` as ``(v e)``."""
    if isinstance(w, SegmentTree):
        if not is_segment_tree(t, w):
            raise SegmentError("invalid segment-tree")
    else:
        validate_wood(t, w)
    if left and not is_value(payload):
        raise SegmentError("left payload must be a value")
    marker = fresh_marker()
    marked = label_at(t, acceptors(t, w), marker)
    return wrap_marked(marked, marker, payload, left)


def extended_structural_reduce(app: App, tree: SegmentTree) -> Term:
    """The reduct of ``(V r)`` or ``(r e)`` along ``tree`` (a segment-tree from ``r`` in ``r``)."""
    if not isinstance(app, App):
        raise SegmentError("expected an application")
    if tree.root != ():
        raise SegmentError("tree must be rooted at the operand itself")
    if is_segment_node(app.fun):
        return wood_substitute(app.fun, tree, app.arg, left=False)
    if is_value(app.fun) and isinstance(app.arg, Term) and is_segment_node(app.arg):
        return wood_substitute(app.arg, tree, app.fun, left=True)
    raise SegmentError("application is neither (V r) nor (r e) with r an or-/bottom-elimination")


def mark_acceptors(t: Term, tree: SegmentTree):
    """``(marker, t')`` with the acceptors of ``tree`` labelled in ``t'``."""
    marker = fresh_marker()
    return marker, label_at(t, tree_acceptors(t, tree), marker)
