"""Parallel reduction, complete development, and checkers for the key lemma,
the diamond property and confluence tiling.

Segment-trees are carried from a term to its reducts with marker labels:
the acceptors of the tree are labelled, the labelled term is reduced (labels
follow residuals), and the labelled nodes of the reduct are then wrapped by
the pushed value or E-term.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import product
from typing import Optional

from .reduction import contract, find_redexes
from .segments import (
    SegmentCapExceeded,
    enumerate_segment_trees,
    mark_acceptors,
    maximal_segment_tree,
)
from .terms import (
    App,
    Case,
    Inj,
    Lam,
    Mu,
    Named,
    Pair,
    Proj,
    Term,
    Var,
    add_labels,
    alpha_key,
    is_segment_node,
    is_value,
    strip_labels,
    subst_var,
    with_children,
    wrap_marked,
)


@dataclass(frozen=True)
class ReductBudget:
    max_reducts: int = 200
    max_trees_per_node: int = 16

    def __post_init__(self):
        if self.max_reducts < 1 or self.max_trees_per_node < 1:
            raise ValueError("budget limits must be positive")


DEFAULT_BUDGET = ReductBudget()


class BudgetOverflow(Exception):
    pass


# ---------------------------------------------------------------------------
# parallel reduction


class _Reducts:
    def __init__(self, budget: ReductBudget):
        self.budget = budget
        self.memo: dict = {}

    def _dedup(self, items) -> list:
        seen = {}
        for it in items:
            k = alpha_key(it, True)
            if k not in seen:
                seen[k] = it
                if len(seen) > self.budget.max_reducts:
                    raise BudgetOverflow()
        return list(seen.values())

    def _trees(self, t: Term) -> list:
        try:
            return enumerate_segment_trees(t, (), cap=self.budget.max_trees_per_node)
        except SegmentCapExceeded:
            raise BudgetOverflow() from None

    def eterm(self, e) -> list:
        if isinstance(e, Proj):
            return [e]
        if isinstance(e, Case):
            return [
                Case(e.var1, b1, e.var2, b2, e.labels)
                for b1, b2 in product(self.term(e.branch1), self.term(e.branch2))
            ]
        return self.term(e)

    def term(self, t: Term) -> list:
        k = alpha_key(t, True)
        hit = self.memo.get(k)
        if hit is None:
            hit = self.memo[k] = self._dedup(self._gen(t))
        return hit

    def _gen(self, t: Term):
        if isinstance(t, Var):
            yield t
            return
        if isinstance(t, (Lam, Mu, Inj, Named)):
            for b in self.term(t.body):
                yield with_children(t, (b,))
            return
        if isinstance(t, Pair):
            for l, r in product(self.term(t.left), self.term(t.right)):
                yield with_children(t, (l, r))
            return
        assert isinstance(t, App)
        f, e = t.fun, t.arg
        fs = self.term(f)
        es = self.eterm(e)
        for f2, e2 in product(fs, es):
            yield with_children(t, (f2, e2))
        # logical clauses
        if isinstance(f, Lam) and isinstance(e, Term) and is_value(e):
            for b, v in product(self.term(f.body), es):
                yield add_labels(subst_var(b, f.var, v), t.labels)
        if isinstance(f, Pair) and isinstance(e, Proj) and is_value(f.left) and is_value(f.right):
            for v in self.term(f.left if e.index == 1 else f.right):
                yield add_labels(v, t.labels)
        if isinstance(f, Inj) and isinstance(e, Case) and is_value(f.body):
            x, br = (e.var1, e.branch1) if f.index == 1 else (e.var2, e.branch2)
            for b, v in product(self.term(br), self.term(f.body)):
                yield add_labels(subst_var(b, x, v), t.labels)
        # structural clauses along every segment-tree of the operand
        if is_value(f) and isinstance(e, Term) and is_segment_node(e):
            for tree in self._trees(e):
                marker, marked = mark_acceptors(e, tree)
                for e2, v in product(self.term(marked), fs):
                    yield add_labels(wrap_marked(e2, marker, v, left=True), t.labels)
        if is_segment_node(f):
            for tree in self._trees(f):
                marker, marked = mark_acceptors(f, tree)
                for f2, e2 in product(self.term(marked), es):
                    yield add_labels(wrap_marked(f2, marker, e2, left=False), t.labels)


def parallel_reducts(t: Term, budget: ReductBudget = DEFAULT_BUDGET):
    """``(reducts, overflowed)``: every ``w`` with ``t`` parallel-reducing to ``w``.

    Reducts are deduplicated up to alpha with labels ignored.  On overflow the
    list is empty and the flag is set.
    """
    try:
        raw = _Reducts(budget).term(t)
    except BudgetOverflow:
        return [], True
    seen = {}
    for r in raw:
        r = strip_labels(r)
        seen.setdefault(alpha_key(r), r)
    return list(seen.values()), False


def labelled_reducts(t: Term, budget: ReductBudget = DEFAULT_BUDGET) -> Optional[list]:
    """Parallel reducts with marker labels kept, or ``None`` on overflow.

    Labels placed on ``t`` mark positions whose residuals are wanted.
    """
    try:
        return _Reducts(budget).term(t)
    except BudgetOverflow:
        return None


def eterm_reducts(e, budget: ReductBudget = DEFAULT_BUDGET) -> Optional[list]:
    """Reducts of an E-term: projections are fixed, other parts reduce pointwise."""
    try:
        return _Reducts(budget).eterm(e)
    except BudgetOverflow:
        return None


class _ReductSets:
    """Memoised reduct-key sets, shared by the checkers."""

    def __init__(self, budget: ReductBudget):
        self.budget = budget
        self.cache: dict = {}

    def keys(self, t: Term) -> Optional[frozenset]:
        k = alpha_key(t)
        if k not in self.cache:
            rs, over = parallel_reducts(t, self.budget)
            self.cache[k] = None if over else frozenset(alpha_key(r) for r in rs)
        return self.cache[k]

    def member(self, t: Term, u: Term) -> Optional[bool]:
        ks = self.keys(t)
        if ks is None:
            return None
        return alpha_key(u) in ks


def is_parallel_reduct(t: Term, u: Term, budget: ReductBudget = DEFAULT_BUDGET) -> Optional[bool]:
    """True/False, or ``None`` when the budget overflowed (inconclusive)."""
    return _ReductSets(budget).member(t, u)


# ---------------------------------------------------------------------------
# complete development


def complete_development(t: Term) -> Term:
    return _develop(t)


def _develop_e(e):
    if isinstance(e, Proj):
        return e
    if isinstance(e, Case):
        return Case(e.var1, _develop(e.branch1), e.var2, _develop(e.branch2), e.labels)
    return _develop(e)


def _develop(t: Term) -> Term:
    if isinstance(t, Var):
        return t
    if isinstance(t, (Lam, Mu, Inj, Named)):
        return with_children(t, (_develop(t.body),))
    if isinstance(t, Pair):
        return with_children(t, (_develop(t.left), _develop(t.right)))
    f, e = t.fun, t.arg
    if isinstance(f, Lam) and isinstance(e, Term) and is_value(e):
        return add_labels(subst_var(_develop(f.body), f.var, _develop(e)), t.labels)
    if isinstance(f, Pair) and isinstance(e, Proj) and is_value(f.left) and is_value(f.right):
        return add_labels(_develop(f.left if e.index == 1 else f.right), t.labels)
    if isinstance(f, Inj) and isinstance(e, Case) and is_value(f.body):
        x, br = (e.var1, e.branch1) if f.index == 1 else (e.var2, e.branch2)
        return add_labels(subst_var(_develop(br), x, _develop(f.body)), t.labels)
    if is_value(f) and isinstance(e, Term) and is_segment_node(e):
        # the maximal tree is taken on the original operand and carried through
        marker, marked = mark_acceptors(e, maximal_segment_tree(e))
        return add_labels(wrap_marked(_develop(marked), marker, _develop(f), left=True), t.labels)
    if is_segment_node(f):
        marker, marked = mark_acceptors(f, maximal_segment_tree(f))
        return add_labels(wrap_marked(_develop(marked), marker, _develop_e(e), left=False), t.labels)
    return with_children(t, (_develop(f), _develop_e(e)))


# ---------------------------------------------------------------------------
# checkers


@dataclass
class Verdict:
    status: str  # 'pass' | 'fail' | 'inconclusive'
    witness: list = field(default_factory=list)
    detail: str = ""
    join: Optional[Term] = None

    @property
    def ok(self) -> bool:
        return self.status == "pass"


def check_key_lemma(t: Term, budget: ReductBudget = DEFAULT_BUDGET) -> Verdict:
    """Every parallel reduct of ``t`` parallel-reduces to the development of ``t``."""
    star = complete_development(t)
    reducts, over = parallel_reducts(t, budget)
    if over:
        return Verdict("inconclusive", [t], "reduct budget exceeded", star)
    sets = _ReductSets(budget)
    inconclusive = []
    for r in reducts:
        m = sets.member(r, star)
        if m is False:
            return Verdict("fail", [t, r, star], "reduct does not reach the development", star)
        if m is None:
            inconclusive.append(r)
    if inconclusive:
        return Verdict("inconclusive", [t, inconclusive[0]], "reduct budget exceeded", star)
    return Verdict("pass", join=star)


def check_diamond(t: Term, budget: ReductBudget = DEFAULT_BUDGET, max_pairs: int = 50) -> Verdict:
    """Any two parallel reducts join in one parallel step at the development."""
    star = complete_development(t)
    reducts, over = parallel_reducts(t, budget)
    if over:
        return Verdict("inconclusive", [t], "reduct budget exceeded", star)
    sets = _ReductSets(budget)
    pairs = 0
    inconclusive = None
    for i, t1 in enumerate(reducts):
        for t2 in reducts[i:]:
            if pairs >= max_pairs:
                break
            pairs += 1
            for side in (t1, t2):
                m = sets.member(side, star)
                if m is False:
                    return Verdict("fail", [t, t1, t2, star], "pair does not join at the development", star)
                if m is None and inconclusive is None:
                    inconclusive = [t, t1, t2]
    if inconclusive:
        return Verdict("inconclusive", inconclusive, "reduct budget exceeded", star)
    return Verdict("pass", join=star, detail=f"{pairs} pairs")


def random_chain(t: Term, k: int, rng: random.Random, mode: str = "cbv") -> list:
    """``[t, t1, ..., tk]`` by uniformly chosen single steps (shorter at a normal form)."""
    chain = [t]
    for _ in range(k):
        sites = find_redexes(chain[-1], mode)
        if not sites:
            break
        chain.append(contract(chain[-1], rng.choice(sites)))
    return chain


def check_confluence_tile(
    t: Term,
    k: int,
    m: int,
    seed: int = 0,
    budget: ReductBudget = DEFAULT_BUDGET,
    chains: Optional[tuple] = None,
) -> Verdict:
    """Close two reduction chains from ``t`` by tiling with developments.

    Cell ``(i, j)`` is the development of cell ``(i-1, j-1)``; both of its
    incoming edges are checked to be parallel reductions.
    """
    if chains is None:
        rng = random.Random(seed)
        a = random_chain(t, k, rng)
        b = random_chain(t, m, rng)
    else:
        a, b = chains
    rows, cols = len(a), len(b)
    grid = [[None] * cols for _ in range(rows)]
    for i in range(rows):
        grid[i][0] = a[i]
    for j in range(cols):
        grid[0][j] = b[j]
    sets = _ReductSets(budget)
    for i in range(1, rows):
        for j in range(1, cols):
            corner = grid[i - 1][j - 1]
            cell = complete_development(corner)
            grid[i][j] = cell
            for src in (grid[i - 1][j], grid[i][j - 1]):
                mem = sets.member(src, cell)
                if mem is False:
                    return Verdict("fail", [t, src, cell], f"face ({i},{j}) does not close", cell)
                if mem is None:
                    return Verdict("inconclusive", [t, src], f"budget exceeded at ({i},{j})", cell)
    return Verdict("pass", join=grid[-1][-1], detail=f"{rows - 1}x{cols - 1} grid")
