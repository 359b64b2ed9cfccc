"""Abstract syntax of terms and E-terms, occurrences, marker labels,
alpha-equivalence, values and the three substitution forms.

Terms are immutable.  Every node carries a (possibly empty) frozenset of
marker ids in ``labels``; labels never take part in ``==`` or hashing, and
are used by the segment machinery to track indexed subterms through
reduction.  Binder annotations are carried for the type checker and are
otherwise ignored.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field, replace
from typing import Iterator, Optional, Union

from .formula import Formula

Labels = frozenset
NO_LABELS: frozenset = frozenset()

Occurrence = tuple  # tuple[int, ...]


class Term:
    __slots__ = ()

    def __str__(self) -> str:
        from .syntax import print_term

        return print_term(self)


@dataclass(frozen=True)
class Var(Term):
    name: str
    labels: frozenset = field(default=NO_LABELS, compare=False, repr=False)


@dataclass(frozen=True)
class Lam(Term):
    var: str
    body: Term
    ann: Optional[Formula] = None
    labels: frozenset = field(default=NO_LABELS, compare=False, repr=False)


@dataclass(frozen=True)
class App(Term):
    fun: Term
    arg: "ETerm"
    labels: frozenset = field(default=NO_LABELS, compare=False, repr=False)


@dataclass(frozen=True)
class Pair(Term):
    left: Term
    right: Term
    labels: frozenset = field(default=NO_LABELS, compare=False, repr=False)


@dataclass(frozen=True)
class Inj(Term):
    index: int
    body: Term
    ann: Optional[Formula] = None
    labels: frozenset = field(default=NO_LABELS, compare=False, repr=False)


@dataclass(frozen=True)
class Mu(Term):
    name: str
    body: Term
    ann: Optional[Formula] = None
    labels: frozenset = field(default=NO_LABELS, compare=False, repr=False)


@dataclass(frozen=True)
class Named(Term):
    name: str
    body: Term
    labels: frozenset = field(default=NO_LABELS, compare=False, repr=False)


@dataclass(frozen=True)
class Proj:
    index: int
    labels: frozenset = field(default=NO_LABELS, compare=False, repr=False)

    def __str__(self) -> str:
        return f"p{self.index}"


@dataclass(frozen=True)
class Case:
    var1: str
    branch1: Term
    var2: str
    branch2: Term
    labels: frozenset = field(default=NO_LABELS, compare=False, repr=False)

    def __str__(self) -> str:
        from .syntax import print_eterm

        return print_eterm(self)


ETerm = Union[Term, Proj, Case]
Node = Union[Term, Proj, Case]


# ---------------------------------------------------------------------------
# structure


def children(n: Node) -> tuple:
    if isinstance(n, (Var, Proj)):
        return ()
    if isinstance(n, (Lam, Inj, Mu, Named)):
        return (n.body,)
    if isinstance(n, App):
        return (n.fun, n.arg)
    if isinstance(n, Pair):
        return (n.left, n.right)
    if isinstance(n, Case):
        return (n.branch1, n.branch2)
    raise TypeError(f"not a term node: {n!r}")


def with_children(n: Node, kids) -> Node:
    if isinstance(n, (Var, Proj)):
        return n
    if isinstance(n, (Lam, Inj, Mu, Named)):
        (body,) = kids
        return n if body is n.body else replace(n, body=body)
    if isinstance(n, App):
        f, a = kids
        return n if (f is n.fun and a is n.arg) else App(f, a, n.labels)
    if isinstance(n, Pair):
        l, r = kids
        return n if (l is n.left and r is n.right) else Pair(l, r, n.labels)
    if isinstance(n, Case):
        b1, b2 = kids
        if b1 is n.branch1 and b2 is n.branch2:
            return n
        return Case(n.var1, b1, n.var2, b2, n.labels)
    raise TypeError(f"not a term node: {n!r}")


def with_labels(n: Node, labels) -> Node:
    labels = frozenset(labels)
    if labels == n.labels:
        return n
    return replace(n, labels=labels)


def add_labels(n: Node, labels) -> Node:
    if not labels:
        return n
    return with_labels(n, n.labels | labels)


def strip_labels(n: Node) -> Node:
    kids = tuple(strip_labels(k) for k in children(n))
    n = with_children(n, kids)
    return with_labels(n, NO_LABELS)


def has_label(n: Node, marker) -> bool:
    if marker in n.labels:
        return True
    return any(has_label(k, marker) for k in children(n))


def size(n: Node) -> int:
    return 1 + sum(size(k) for k in children(n))


def occurrences(n: Node, path: Occurrence = ()) -> Iterator[tuple]:
    """Pre-order walk yielding ``(path, node)``; paths are in lexicographic order."""
    yield path, n
    for i, k in enumerate(children(n)):
        yield from occurrences(k, path + (i,))


class OccurrenceError(ValueError):
    pass


def subterm_at(t: Node, path) -> Node:
    node = t
    for depth, i in enumerate(path):
        kids = children(node)
        if not 0 <= i < len(kids):
            raise OccurrenceError(f"invalid path {list(path)}: no child {i} at depth {depth}")
        node = kids[i]
    return node


def _is_term(n: Node) -> bool:
    return isinstance(n, Term)


def replace_at(t: Node, path, s: Node) -> Node:
    """Replace the node at ``path`` by ``s`` without any renaming.

    Projections and case E-terms may only appear in the argument slot of an
    application; everywhere else the replacement must be a term.
    """
    path = tuple(path)
    if not path:
        if _is_term(t) != _is_term(s):
            raise OccurrenceError("kind mismatch at the root")
        return s
    kids = list(children(t))
    i = path[0]
    if not 0 <= i < len(kids):
        raise OccurrenceError(f"invalid path: no child {i}")
    if len(path) == 1:
        arg_slot = isinstance(t, App) and i == 1
        if not arg_slot and not _is_term(s):
            raise OccurrenceError(f"kind mismatch: {type(s).__name__} outside an argument slot")
        kids[i] = s
    else:
        kids[i] = replace_at(kids[i], path[1:], s)
    return with_children(t, kids)


# ---------------------------------------------------------------------------
# classification


def is_value(t: Node) -> bool:
    if isinstance(t, (Var, Lam, Named)):
        return True
    if isinstance(t, Pair):
        return is_value(t.left) and is_value(t.right)
    if isinstance(t, Inj):
        return is_value(t.body)
    return False


def is_case_term(t: Node) -> bool:
    """An or-elimination ``(t [x.u, y.v])``."""
    return isinstance(t, App) and isinstance(t.arg, Case)


def is_segment_node(t: Node) -> bool:
    """Or-elimination or mu-abstraction (bottom-elimination)."""
    return isinstance(t, Mu) or is_case_term(t)


# ---------------------------------------------------------------------------
# variables


def free_vars(n: Node) -> set[str]:
    if isinstance(n, Var):
        return {n.name}
    if isinstance(n, Lam):
        return free_vars(n.body) - {n.var}
    if isinstance(n, Case):
        return (free_vars(n.branch1) - {n.var1}) | (free_vars(n.branch2) - {n.var2})
    out: set[str] = set()
    for k in children(n):
        out |= free_vars(k)
    return out


def free_mu_vars(n: Node) -> set[str]:
    if isinstance(n, Mu):
        return free_mu_vars(n.body) - {n.name}
    out: set[str] = set()
    if isinstance(n, Named):
        out.add(n.name)
    for k in children(n):
        out |= free_mu_vars(k)
    return out


def bound_names(n: Node) -> set[str]:
    out: set[str] = set()
    for _, m in occurrences(n):
        if isinstance(m, (Lam, Mu)):
            out.add(m.var if isinstance(m, Lam) else m.name)
        elif isinstance(m, Case):
            out |= {m.var1, m.var2}
    return out


_TRAILING_DIGITS = re.compile(r"\d+$")


def fresh_name(base: str, avoid) -> str:
    """``base`` with its numeric suffix replaced by the smallest one not in ``avoid``."""
    stem = _TRAILING_DIGITS.sub("", base) or base
    for i in itertools.count(1):
        cand = f"{stem}{i}"
        if cand not in avoid:
            return cand
    raise AssertionError("unreachable")


_markers = itertools.count(1)


def fresh_marker() -> int:
    return next(_markers)


# ---------------------------------------------------------------------------
# alpha-equivalence


def alpha_key(n: Node, respect_labels: bool = False):
    """A hashable key that is equal for alpha-equivalent nodes."""
    return _key(n, {}, {}, 0, respect_labels)


def _key(n, lam, mu, depth, rl):
    if isinstance(n, Var):
        k = ("v", lam.get(n.name, n.name))
    elif isinstance(n, Lam):
        k = ("l", _key(n.body, {**lam, n.var: depth}, mu, depth + 1, rl))
        if rl:
            k += (n.ann,)
    elif isinstance(n, Mu):
        k = ("m", _key(n.body, lam, {**mu, n.name: depth}, depth + 1, rl))
        if rl:
            k += (n.ann,)
    elif isinstance(n, Named):
        k = ("n", mu.get(n.name, n.name), _key(n.body, lam, mu, depth, rl))
    elif isinstance(n, App):
        k = ("a", _key(n.fun, lam, mu, depth, rl), _key(n.arg, lam, mu, depth, rl))
    elif isinstance(n, Pair):
        k = ("p", _key(n.left, lam, mu, depth, rl), _key(n.right, lam, mu, depth, rl))
    elif isinstance(n, Inj):
        k = ("i", n.index, _key(n.body, lam, mu, depth, rl))
        if rl:
            k += (n.ann,)
    elif isinstance(n, Proj):
        k = ("pi", n.index)
    elif isinstance(n, Case):
        k = (
            "c",
            _key(n.branch1, {**lam, n.var1: depth}, mu, depth + 1, rl),
            _key(n.branch2, {**lam, n.var2: depth}, mu, depth + 1, rl),
        )
    else:
        raise TypeError(f"not a term node: {n!r}")
    if rl and n.labels:
        k += (tuple(sorted(n.labels)),)
    return k


def alpha_eq(t: Node, u: Node, respect_labels: bool = False) -> bool:
    return alpha_key(t, respect_labels) == alpha_key(u, respect_labels)


# ---------------------------------------------------------------------------
# substitution


class _Rewriter:
    """Capture-avoiding traversal shared by all substitution forms.

    ``lam`` maps free lambda-variables to replacement terms and ``mu`` maps
    free mu-variables to an action on named terms ``(a v)``.  Binders whose
    name is free in a payload are renamed before descending.  Children are
    rewritten before their parent (innermost-first).
    """

    def __init__(self, lam=None, mu=None, avoid_lam=(), avoid_mu=()):
        self.lam = dict(lam or {})
        self.mu = dict(mu or {})
        self.avoid_lam = set(avoid_lam)
        self.avoid_mu = set(avoid_mu)
        for v in self.lam.values():
            self.avoid_lam |= free_vars(v)
            self.avoid_mu |= free_mu_vars(v)

    # scope helpers --------------------------------------------------------
    def _child(self, lam, mu, avoid_lam, avoid_mu) -> "_Rewriter":
        r = object.__new__(type(self))
        r.__dict__.update(self.__dict__)
        r.lam, r.mu, r.avoid_lam, r.avoid_mu = lam, mu, avoid_lam, avoid_mu
        return r

    def relevant(self, body: Node) -> bool:
        if self.lam and free_vars(body) & self.lam.keys():
            return True
        if self.mu and free_mu_vars(body) & self.mu.keys():
            return True
        return False

    def _enter_lam(self, x: str, body: Node):
        lam = self.lam
        if x in lam:
            lam = {k: v for k, v in lam.items() if k != x}
        inner = self._child(lam, self.mu, self.avoid_lam, self.avoid_mu)
        if x in self.avoid_lam and inner.relevant(body):
            new = fresh_name(x, self.avoid_lam | free_vars(body) | lam.keys())
            inner = self._child(
                {**lam, x: Var(new)}, self.mu, self.avoid_lam | {new}, self.avoid_mu
            )
            x = new
        return x, inner

    def _enter_mu(self, a: str, body: Node):
        mu = self.mu
        if a in mu:
            mu = {k: v for k, v in mu.items() if k != a}
        inner = self._child(self.lam, mu, self.avoid_lam, self.avoid_mu)
        if a in self.avoid_mu and inner.relevant(body):
            new = fresh_name(a, self.avoid_mu | free_mu_vars(body) | mu.keys())
            inner = self._child(
                self.lam, {**mu, a: ("rename", new)}, self.avoid_lam, self.avoid_mu | {new}
            )
            a = new
        return a, inner

    # traversal ------------------------------------------------------------
    def run(self, n: Node) -> Node:
        if not self.relevant(n):
            return n
        return self.node(n)

    def node(self, n: Node) -> Node:
        if isinstance(n, Var):
            if n.name in self.lam:
                return add_labels(self.lam[n.name], n.labels)
            return n
        if isinstance(n, Lam):
            x, inner = self._enter_lam(n.var, n.body)
            return Lam(x, inner.run(n.body), n.ann, n.labels)
        if isinstance(n, Mu):
            a, inner = self._enter_mu(n.name, n.body)
            return Mu(a, inner.run(n.body), n.ann, n.labels)
        if isinstance(n, Case):
            x1, in1 = self._enter_lam(n.var1, n.branch1)
            x2, in2 = self._enter_lam(n.var2, n.branch2)
            return Case(x1, in1.run(n.branch1), x2, in2.run(n.branch2), n.labels)
        if isinstance(n, Named):
            body = self.run(n.body)
            action = self.mu.get(n.name)
            if action is None:
                return with_children(n, (body,))
            kind, payload = action
            if kind == "rename":
                return Named(payload, body, n.labels)
            if kind == "arg":
                return Named(n.name, App(body, payload), n.labels)
            if kind == "fun":
                return Named(n.name, App(payload, body), n.labels)
            raise AssertionError(kind)
        return with_children(n, tuple(self.run(k) for k in children(n)))


def subst_var(t: Node, x: str, v: Term) -> Node:
    """``t[x:=v]``, capture-avoiding."""
    return _Rewriter(lam={x: v}).run(t)


def rename_lam(t: Node, x: str, y: str) -> Node:
    return subst_var(t, x, Var(y))


def rename_mu(t: Node, a: str, b: str) -> Node:
    return _Rewriter(mu={a: ("rename", b)}, avoid_mu={b}).run(t)


def mu_subst_arg(t: Node, a: str, e: ETerm) -> Node:
    """``t[a:=*e]``: every ``(a v)`` becomes ``(a (v' e))``."""
    return _Rewriter(
        mu={a: ("arg", e)}, avoid_lam=free_vars(e), avoid_mu=free_mu_vars(e)
    ).run(t)


class NotAValue(ValueError):
    pass


def mu_subst_fun(t: Node, a: str, v: Term) -> Node:
    """``t[a:=_*V]``: every ``(a u)`` becomes ``(a (V u'))``."""
    if not is_value(v):
        raise NotAValue(f"mu_subst_fun expects a value, got {v}")
    return _Rewriter(
        mu={a: ("fun", v)}, avoid_lam=free_vars(v), avoid_mu=free_mu_vars(v)
    ).run(t)


class _Wrapper(_Rewriter):
    """Wraps every node carrying ``marker`` by the payload, innermost-first."""

    def __init__(self, marker, payload: ETerm, left: bool):
        super().__init__(avoid_lam=free_vars(payload), avoid_mu=free_mu_vars(payload))
        self.marker = marker
        self.payload = payload
        self.left = left

    def relevant(self, body: Node) -> bool:
        return super().relevant(body) or has_label(body, self.marker)

    def node(self, n: Node) -> Node:
        out = super().node(n)
        if self.marker in n.labels:
            out = with_labels(out, out.labels - {self.marker})
            out = App(self.payload, out) if self.left else App(out, self.payload)
        return out


def wrap_marked(t: Node, marker, payload: ETerm, left: bool) -> Node:
    """Replace each node labelled ``marker`` by ``(payload v)`` (left) or ``(v payload)``."""
    return _Wrapper(marker, payload, left).run(t)


def label_at(t: Node, paths, marker) -> Node:
    """Add ``marker`` to the nodes at ``paths``."""
    for p in paths:
        node = subterm_at(t, p)
        t = _replace_raw(t, tuple(p), add_labels(node, {marker}))
    return t


def _replace_raw(t: Node, path: tuple, s: Node) -> Node:
    if not path:
        return s
    kids = list(children(t))
    kids[path[0]] = _replace_raw(kids[path[0]], path[1:], s)
    return with_children(t, kids)


def marked_paths(t: Node, marker) -> list:
    return [p for p, n in occurrences(t) if marker in n.labels]
