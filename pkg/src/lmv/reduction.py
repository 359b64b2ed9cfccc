"""Redex discovery and one-step / multi-step reduction.

Two modes are supported: ``cbv`` (the seven call-by-value rules) and ``cbn``
(the five cut-elimination rules).  Reduction is closed under all contexts.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .terms import (
    App,
    Case,
    Inj,
    Lam,
    Mu,
    Pair,
    Proj,
    Term,
    add_labels,
    free_mu_vars,
    free_vars,
    fresh_name,
    is_case_term,
    is_value,
    mu_subst_arg,
    mu_subst_fun,
    occurrences,
    rename_lam,
    rename_mu,
    replace_at,
    subst_var,
    subterm_at,
)

CBV_RULES = ("beta_v", "pi_v", "D_v", "delta", "delta_v'", "mu", "mu_v'")
CBN_RULES = ("beta", "pi", "D", "delta", "mu")
MODES = {"cbv": CBV_RULES, "cbn": CBN_RULES}

LOGICAL = {"beta_v", "pi_v", "D_v", "beta", "pi", "D"}


@dataclass(frozen=True)
class RedexSite:
    occurrence: tuple
    rule: str


@dataclass
class ReductionTrace:
    initial: Term
    steps: list = field(default_factory=list)  # [(RedexSite, Term)]
    exhausted: bool = False

    @property
    def final(self) -> Term:
        return self.steps[-1][1] if self.steps else self.initial


class ReductionError(ValueError):
    pass


def _check_mode(mode: str) -> tuple:
    try:
        return MODES[mode]
    except KeyError:
        raise ValueError(f"unknown mode {mode!r} (expected cbv or cbn)") from None


def rules_at(node, mode: str = "cbv") -> list[str]:
    """Every rule whose left-hand side matches ``node`` itself."""
    _check_mode(mode)
    if not isinstance(node, App):
        return []
    f, e = node.fun, node.arg
    cbv = mode == "cbv"
    out = []
    if isinstance(f, Lam) and not isinstance(e, (Proj, Case)):
        if not cbv:
            out.append("beta")
        elif is_value(e):
            out.append("beta_v")
    if isinstance(f, Pair) and isinstance(e, Proj):
        if not cbv:
            out.append("pi")
        elif is_value(f.left) and is_value(f.right):
            out.append("pi_v")
    if isinstance(f, Inj) and isinstance(e, Case):
        if not cbv:
            out.append("D")
        elif is_value(f.body):
            out.append("D_v")
    if is_case_term(f):
        out.append("delta")
    if cbv and is_value(f) and is_case_term(e):
        out.append("delta_v'")
    if isinstance(f, Mu):
        out.append("mu")
    if cbv and is_value(f) and isinstance(e, Mu):
        out.append("mu_v'")
    order = MODES[mode]
    return sorted(out, key=order.index)


def find_redexes(t: Term, mode: str = "cbv") -> list[RedexSite]:
    sites = []
    for path, node in occurrences(t):
        for rule in rules_at(node, mode):
            sites.append(RedexSite(path, rule))
    return sites


def _distribute(case: Case, wrap) -> Case:
    """Rebuild ``case`` with each branch ``t_i`` replaced by ``wrap(t_i)``.

    ``wrap`` brings in an outside term, so branch binders free in it are
    renamed first.
    """
    outside, outside_mu = wrap.free
    parts = []
    for x, b in ((case.var1, case.branch1), (case.var2, case.branch2)):
        if x in outside:
            new = fresh_name(x, outside | free_vars(b))
            b = rename_lam(b, x, new)
            x = new
        parts.append((x, wrap(b)))
    (x1, b1), (x2, b2) = parts
    return Case(x1, b1, x2, b2, case.labels)


class _Wrap:
    def __init__(self, payload, left: bool):
        self.payload = payload
        self.left = left
        self.free = (free_vars(payload), free_mu_vars(payload))

    def __call__(self, b):
        return App(self.payload, b) if self.left else App(b, self.payload)


def contractum(node: App, rule: str) -> Term:
    """The reduct of the redex ``node`` under ``rule``.

    The labels of the redex move to the root of the contractum.
    """
    f, e = node.fun, node.arg
    if rule in ("beta", "beta_v"):
        out = subst_var(f.body, f.var, e)
    elif rule in ("pi", "pi_v"):
        out = f.left if e.index == 1 else f.right
    elif rule in ("D", "D_v"):
        x, b = (e.var1, e.branch1) if f.index == 1 else (e.var2, e.branch2)
        out = subst_var(b, x, f.body)
    elif rule == "delta":
        inner = f
        out = App(inner.fun, _distribute(inner.arg, _Wrap(e, left=False)), inner.labels)
    elif rule == "delta_v'":
        inner = e
        out = App(inner.fun, _distribute(inner.arg, _Wrap(f, left=True)), inner.labels)
    elif rule == "mu":
        a, body = _fresh_mu(f, free_mu_vars(e))
        out = Mu(a, mu_subst_arg(body, a, e), f.ann, f.labels)
    elif rule == "mu_v'":
        a, body = _fresh_mu(e, free_mu_vars(f))
        out = Mu(a, mu_subst_fun(body, a, f), e.ann, e.labels)
    else:
        raise ReductionError(f"unknown rule {rule!r}")
    return add_labels(out, node.labels)


def _fresh_mu(m: Mu, avoid: set):
    if m.name not in avoid:
        return m.name, m.body
    new = fresh_name(m.name, avoid | free_mu_vars(m.body))
    return new, rename_mu(m.body, m.name, new)


def _mode_of(rule: str) -> str:
    return "cbv" if rule in CBV_RULES else "cbn"


def contract(t: Term, site: RedexSite) -> Term:
    try:
        node = subterm_at(t, site.occurrence)
    except ValueError as exc:
        raise ReductionError(str(exc)) from None
    if site.rule not in rules_at(node, _mode_of(site.rule)):
        raise ReductionError(
            f"no {site.rule} redex at {list(site.occurrence)}"
        )
    return replace_at(t, site.occurrence, contractum(node, site.rule))


def step(t: Term, mode: str = "cbv", strategy: str = "lo", rng=None):
    """One step by ``strategy``; returns ``(site, reduct)`` or ``None`` at a normal form."""
    sites = find_redexes(t, mode)
    if not sites:
        return None
    if strategy == "lo":
        site = sites[0]
    elif strategy == "random":
        site = (rng or random.Random(0)).choice(sites)
    else:
        raise ValueError(f"unknown strategy {strategy!r}")
    return site, contract(t, site)


def normalize(
    t: Term, mode: str = "cbv", strategy: str = "lo", seed: int = 0, fuel: int = 1000
) -> ReductionTrace:
    if fuel < 0:
        raise ValueError("fuel must be non-negative")
    _check_mode(mode)
    rng = random.Random(seed)
    trace = ReductionTrace(t)
    cur = t
    while True:
        if not find_redexes(cur, mode):
            return trace
        if len(trace.steps) >= fuel:
            trace.exhausted = True
            return trace
        site, cur = step(cur, mode, strategy, rng)
        trace.steps.append((site, cur))


def format_path(path) -> str:
    return ".".join(map(str, path)) if path else "."


def parse_path(text: str) -> tuple:
    text = text.strip()
    if text in ("", "."):
        return ()
    try:
        return tuple(int(p) for p in text.split("."))
    except ValueError:
        raise ValueError(f"bad occurrence path {text!r}") from None
