"""Classical natural-deduction type checking of annotated terms.

Judgments have the shape ``x:A, y:B ; @a:C |- t : D``.  Inference is
syntax-directed: lambda and mu binders carry their formula, and an injection
``in1[B] t`` carries the missing disjunct.  Case binders are typed from the
scrutinee.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from types import MappingProxyType
from typing import Optional

from .formula import And, Arrow, BOTTOM, Bottom, Formula, Or, print_formula
from .reduction import RedexSite, contract
from .syntax import print_term
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
    children,
    replace_at,
    subterm_at,
    with_children,
)

RULES = ("ax", "→i", "→e", "∧i", "∧e1", "∧e2", "∨i1", "∨i2", "∨e", "⊥i", "⊥e")


@dataclass(frozen=True)
class ContextPair:
    gamma: MappingProxyType = field(default_factory=lambda: MappingProxyType({}))
    delta: MappingProxyType = field(default_factory=lambda: MappingProxyType({}))

    @classmethod
    def of(cls, gamma=None, delta=None) -> "ContextPair":
        return cls(MappingProxyType(dict(gamma or {})), MappingProxyType(dict(delta or {})))

    def bind(self, x: str, f: Formula) -> "ContextPair":
        return ContextPair(MappingProxyType({**self.gamma, x: f}), self.delta)

    def bind_mu(self, a: str, f: Formula) -> "ContextPair":
        return ContextPair(self.gamma, MappingProxyType({**self.delta, a: f}))

    def __eq__(self, other):
        if not isinstance(other, ContextPair):
            return NotImplemented
        return dict(self.gamma) == dict(other.gamma) and dict(self.delta) == dict(other.delta)

    def __hash__(self):
        return hash((frozenset(self.gamma.items()), frozenset(self.delta.items())))

    def __str__(self) -> str:
        g = ", ".join(f"{x}:{print_formula(f)}" for x, f in self.gamma.items())
        d = ", ".join(f"@{a}:{print_formula(f)}" for a, f in self.delta.items())
        return f"{g} ; {d}".strip()


EMPTY = ContextPair()


@dataclass(frozen=True)
class Derivation:
    rule: str
    ctx: ContextPair
    term: Term
    formula: Formula
    premises: tuple = ()

    def judgment(self) -> str:
        return format_judgment(self.ctx, self.term, self.formula)


def format_judgment(ctx: ContextPair, t: Term, f: Formula) -> str:
    return f"{ctx} |- {print_term(t, True)} : {print_formula(f)}"


class TypeCheckError(Exception):
    def __init__(self, kind: str, message: str, occurrence=(), formulas=()):
        self.kind = kind  # 'unbound' | 'missing-annotation' | 'rule-mismatch'
        self.occurrence = tuple(occurrence)
        self.formulas = tuple(formulas)
        where = ".".join(map(str, self.occurrence)) or "."
        super().__init__(f"{kind} at {where}: {message}")


def _mismatch(path, msg, *formulas):
    return TypeCheckError("rule-mismatch", msg, path, formulas)


def infer(ctx: ContextPair, t: Term, _path=()) -> tuple:
    """``(formula, derivation)`` for ``t`` in ``ctx``."""
    p = tuple(_path)
    if isinstance(t, Var):
        if t.name not in ctx.gamma:
            raise TypeCheckError("unbound", f"variable {t.name}", p)
        f = ctx.gamma[t.name]
        return f, Derivation("ax", ctx, t, f)
    if isinstance(t, Lam):
        if t.ann is None:
            raise TypeCheckError("missing-annotation", f"binder \\{t.var}", p)
        b, d = infer(ctx.bind(t.var, t.ann), t.body, p + (0,))
        f = Arrow(t.ann, b)
        return f, Derivation("→i", ctx, t, f, (d,))
    if isinstance(t, Pair):
        a, da = infer(ctx, t.left, p + (0,))
        b, db = infer(ctx, t.right, p + (1,))
        f = And(a, b)
        return f, Derivation("∧i", ctx, t, f, (da, db))
    if isinstance(t, Inj):
        if t.ann is None:
            raise TypeCheckError("missing-annotation", f"injection in{t.index}", p)
        a, d = infer(ctx, t.body, p + (0,))
        f = Or(a, t.ann) if t.index == 1 else Or(t.ann, a)
        return f, Derivation(f"∨i{t.index}", ctx, t, f, (d,))
    if isinstance(t, Mu):
        if t.ann is None:
            raise TypeCheckError("missing-annotation", f"binder mu @{t.name}", p)
        b, d = infer(ctx.bind_mu(t.name, t.ann), t.body, p + (0,))
        if not isinstance(b, Bottom):
            raise _mismatch(p + (0,), "body of mu must have type #", BOTTOM, b)
        return t.ann, Derivation("⊥e", ctx, t, t.ann, (d,))
    if isinstance(t, Named):
        if t.name not in ctx.delta:
            raise TypeCheckError("unbound", f"mu-variable @{t.name}", p)
        want = ctx.delta[t.name]
        a, d = infer(ctx, t.body, p + (0,))
        if a != want:
            raise _mismatch(p + (0,), f"@{t.name} expects {want}, got {a}", want, a)
        return BOTTOM, Derivation("⊥i", ctx, t, BOTTOM, (d,))
    if isinstance(t, App):
        fty, df = infer(ctx, t.fun, p + (0,))
        e = t.arg
        if isinstance(e, Proj):
            if not isinstance(fty, And):
                raise _mismatch(p + (0,), f"projection from non-conjunction {fty}", fty)
            f = fty.left if e.index == 1 else fty.right
            return f, Derivation(f"∧e{e.index}", ctx, t, f, (df,))
        if isinstance(e, Case):
            if not isinstance(fty, Or):
                raise _mismatch(p + (0,), f"case on non-disjunction {fty}", fty)
            c1, d1 = infer(ctx.bind(e.var1, fty.left), e.branch1, p + (1, 0))
            c2, d2 = infer(ctx.bind(e.var2, fty.right), e.branch2, p + (1, 1))
            if c1 != c2:
                raise _mismatch(p + (1,), f"case branches disagree: {c1} vs {c2}", c1, c2)
            return c1, Derivation("∨e", ctx, t, c1, (df, d1, d2))
        if not isinstance(fty, Arrow):
            raise _mismatch(p + (0,), f"applying non-function of type {fty}", fty)
        a, da = infer(ctx, e, p + (1,))
        if a != fty.dom:
            raise _mismatch(p + (1,), f"argument has type {a}, expected {fty.dom}", fty.dom, a)
        return fty.cod, Derivation("→e", ctx, t, fty.cod, (df, da))
    raise TypeError(f"not a term: {t!r}")


def check(ctx: ContextPair, t: Term, goal: Formula) -> Derivation:
    f, d = infer(ctx, t)
    if f != goal:
        raise _mismatch((), f"expected {goal}, inferred {f}", goal, f)
    return d


# ---------------------------------------------------------------------------
# derivation re-checking


def check_derivation(d: Derivation) -> bool:
    """Re-check every node of ``d`` against its rule schema."""
    return _schema_ok(d) and all(check_derivation(p) for p in d.premises)


def _schema_ok(d: Derivation) -> bool:
    t, f, c, ps = d.term, d.formula, d.ctx, d.premises
    r = d.rule
    if r == "ax":
        return isinstance(t, Var) and c.gamma.get(t.name) == f and not ps
    if r == "→i":
        return (
            isinstance(t, Lam) and len(ps) == 1 and f == Arrow(t.ann, ps[0].formula)
            and ps[0].ctx == c.bind(t.var, t.ann) and ps[0].term == t.body
        )
    if r == "→e":
        return (
            isinstance(t, App) and isinstance(t.arg, Term) and len(ps) == 2
            and ps[0].term == t.fun and ps[1].term == t.arg
            and ps[0].formula == Arrow(ps[1].formula, f)
            and ps[0].ctx == c and ps[1].ctx == c
        )
    if r == "∧i":
        return (
            isinstance(t, Pair) and len(ps) == 2 and f == And(ps[0].formula, ps[1].formula)
            and (ps[0].term, ps[1].term) == (t.left, t.right) and ps[0].ctx == c == ps[1].ctx
        )
    if r in ("∧e1", "∧e2"):
        i = int(r[-1])
        if not (isinstance(t, App) and isinstance(t.arg, Proj) and t.arg.index == i and len(ps) == 1):
            return False
        pf = ps[0].formula
        return (
            isinstance(pf, And) and (pf.left if i == 1 else pf.right) == f
            and ps[0].term == t.fun and ps[0].ctx == c
        )
    if r in ("∨i1", "∨i2"):
        i = int(r[-1])
        if not (isinstance(t, Inj) and t.index == i and len(ps) == 1):
            return False
        want = Or(ps[0].formula, t.ann) if i == 1 else Or(t.ann, ps[0].formula)
        return f == want and ps[0].term == t.body and ps[0].ctx == c
    if r == "∨e":
        if not (isinstance(t, App) and isinstance(t.arg, Case) and len(ps) == 3):
            return False
        e, pf = t.arg, ps[0].formula
        return (
            isinstance(pf, Or) and ps[0].term == t.fun and ps[0].ctx == c
            and ps[1].term == e.branch1 and ps[1].ctx == c.bind(e.var1, pf.left)
            and ps[2].term == e.branch2 and ps[2].ctx == c.bind(e.var2, pf.right)
            and ps[1].formula == f == ps[2].formula
        )
    if r == "⊥i":
        return (
            isinstance(t, Named) and isinstance(f, Bottom) and len(ps) == 1
            and c.delta.get(t.name) == ps[0].formula and ps[0].term == t.body and ps[0].ctx == c
        )
    if r == "⊥e":
        return (
            isinstance(t, Mu) and len(ps) == 1 and f == t.ann
            and isinstance(ps[0].formula, Bottom) and ps[0].term == t.body
            and ps[0].ctx == c.bind_mu(t.name, t.ann)
        )
    return False


# ---------------------------------------------------------------------------
# per-occurrence formulas


def formulas_at(ctx: ContextPair, t: Term) -> dict:
    """Map from the occurrence of every term node to its inferred formula."""
    _, d = infer(ctx, t)
    out: dict = {}
    _collect(d, (), out)
    return out


def _collect(d: Derivation, path: tuple, out: dict) -> None:
    out[path] = d.formula
    if d.rule == "∨e":
        paths = [path + (0,), path + (1, 0), path + (1, 1)]
    else:
        paths = [path + (i,) for i in range(len(d.premises))]
    for p, sub in zip(paths, d.premises):
        _collect(sub, p, out)


# ---------------------------------------------------------------------------
# erasure and typed contraction


def erase(t):
    """Drop every annotation."""
    kids = tuple(erase(k) for k in children(t))
    t = with_children(t, kids)
    if isinstance(t, (Lam, Mu, Inj)) and t.ann is not None:
        t = replace(t, ann=None)
    return t


class ReconstructionError(Exception):
    pass


def contract_typed(ctx: ContextPair, t: Term, site: RedexSite, table: Optional[dict] = None) -> Term:
    """Contract an annotated term, re-annotating binders the rule retypes.

    The mu-rules change the type of the bound mu-variable to the type of the
    redex, which is read off the derivation of ``t``.
    """
    out = contract(t, site)
    if site.rule in ("mu", "mu_v'"):
        if table is None:
            table = formulas_at(ctx, t)
        f = table.get(tuple(site.occurrence))
        node = subterm_at(out, site.occurrence)
        if f is None or not isinstance(node, Mu):
            raise ReconstructionError(f"cannot re-annotate {site.rule} at {site.occurrence}")
        out = replace_at(out, site.occurrence, replace(node, ann=f))
    return out


def parse_context(text: str) -> ContextPair:
    """``x:A, y:B ; @a:C`` (either side may be empty)."""
    from .syntax import parse_formula

    text = text.strip()
    left, _, right = text.partition(";")
    gamma, delta = {}, {}
    for part, target, mu in ((left, gamma, False), (right, delta, True)):
        for decl in filter(None, (d.strip() for d in part.split(","))):
            name, sep, f = decl.partition(":")
            name = name.strip()
            if not sep or not name:
                raise ValueError(f"bad declaration {decl!r}")
            if mu != name.startswith("@"):
                raise ValueError(f"declaration {decl!r} on the wrong side of ';'")
            target[name.lstrip("@")] = parse_formula(f)
    return ContextPair.of(gamma, delta)
