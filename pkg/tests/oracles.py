"""Independent reference implementations used only by the tests.

They are written differently from the library on purpose: binders are first
renamed apart (Barendregt convention) so substitution never needs capture
checks, and alpha-equivalence goes through de Bruijn indices.
"""

import itertools
from collections import deque

from lmv.terms import App, Case, Inj, Lam, Mu, Named, Pair, Proj, Var

_counter = itertools.count()


def _fresh(stem):
    return f"{stem}_{next(_counter)}"


def rename_apart(t, lam=None, mu=None):
    """Give every binder a globally unique name."""
    lam = lam or {}
    mu = mu or {}
    if isinstance(t, Var):
        return Var(lam.get(t.name, t.name))
    if isinstance(t, Lam):
        x = _fresh("v")
        return Lam(x, rename_apart(t.body, {**lam, t.var: x}, mu), t.ann)
    if isinstance(t, Mu):
        a = _fresh("m")
        return Mu(a, rename_apart(t.body, lam, {**mu, t.name: a}), t.ann)
    if isinstance(t, Named):
        return Named(mu.get(t.name, t.name), rename_apart(t.body, lam, mu))
    if isinstance(t, App):
        return App(rename_apart(t.fun, lam, mu), rename_apart(t.arg, lam, mu))
    if isinstance(t, Pair):
        return Pair(rename_apart(t.left, lam, mu), rename_apart(t.right, lam, mu))
    if isinstance(t, Inj):
        return Inj(t.index, rename_apart(t.body, lam, mu), t.ann)
    if isinstance(t, Proj):
        return t
    if isinstance(t, Case):
        x1, x2 = _fresh("v"), _fresh("v")
        return Case(
            x1, rename_apart(t.branch1, {**lam, t.var1: x1}, mu),
            x2, rename_apart(t.branch2, {**lam, t.var2: x2}, mu),
        )
    raise TypeError(t)


def _map(t, f):
    """Rebuild ``t`` bottom-up, applying ``f`` to each rebuilt node."""
    if isinstance(t, (Var, Proj)):
        return f(t)
    if isinstance(t, Lam):
        return f(Lam(t.var, _map(t.body, f), t.ann))
    if isinstance(t, Mu):
        return f(Mu(t.name, _map(t.body, f), t.ann))
    if isinstance(t, Named):
        return f(Named(t.name, _map(t.body, f)))
    if isinstance(t, App):
        return f(App(_map(t.fun, f), _map(t.arg, f)))
    if isinstance(t, Pair):
        return f(Pair(_map(t.left, f), _map(t.right, f)))
    if isinstance(t, Inj):
        return f(Inj(t.index, _map(t.body, f), t.ann))
    if isinstance(t, Case):
        return f(Case(t.var1, _map(t.branch1, f), t.var2, _map(t.branch2, f)))
    raise TypeError(t)


def subst(t, x, v):
    """``t[x:=v]``; every copy of ``v`` is renamed apart again."""
    t = rename_apart(t)
    return _map(t, lambda n: rename_apart(v) if isinstance(n, Var) and n.name == x else n)


def mu_arg(t, a, e):
    """``t[a:=*e]``: each free ``(a u)`` becomes ``(a (u e))``."""
    t = rename_apart(t)
    return _map(t, lambda n: Named(a, App(n.body, rename_apart(e))) if isinstance(n, Named) and n.name == a else n)


def mu_fun(t, a, v):
    """``t[a:=_*v]``: each free ``(a u)`` becomes ``(a (v u))``."""
    t = rename_apart(t)
    return _map(t, lambda n: Named(a, App(rename_apart(v), n.body)) if isinstance(n, Named) and n.name == a else n)


def de_bruijn(t, lam=(), mu=()):
    """Nameless form: bound names become distances to their binder."""
    if isinstance(t, Var):
        return ("var", lam.index(t.name)) if t.name in lam else ("free", t.name)
    if isinstance(t, Lam):
        return ("lam", de_bruijn(t.body, (t.var,) + lam, mu))
    if isinstance(t, Mu):
        return ("mu", de_bruijn(t.body, lam, (t.name,) + mu))
    if isinstance(t, Named):
        a = ("bound", mu.index(t.name)) if t.name in mu else ("free", t.name)
        return ("named", a, de_bruijn(t.body, lam, mu))
    if isinstance(t, App):
        return ("app", de_bruijn(t.fun, lam, mu), de_bruijn(t.arg, lam, mu))
    if isinstance(t, Pair):
        return ("pair", de_bruijn(t.left, lam, mu), de_bruijn(t.right, lam, mu))
    if isinstance(t, Inj):
        return ("inj", t.index, de_bruijn(t.body, lam, mu))
    if isinstance(t, Proj):
        return ("proj", t.index)
    if isinstance(t, Case):
        return (
            "case",
            de_bruijn(t.branch1, (t.var1,) + lam, mu),
            de_bruijn(t.branch2, (t.var2,) + lam, mu),
        )
    raise TypeError(t)


def reachable(t, steps, mode="cbv"):
    """De Bruijn forms of every term reachable from ``t`` in at most ``steps`` single steps."""
    from lmv.reduction import contract, find_redexes

    seen = {de_bruijn(t)}
    frontier = deque([(t, 0)])
    while frontier:
        u, d = frontier.popleft()
        if d == steps:
            continue
        for site in find_redexes(u, mode):
            w = contract(u, site)
            k = de_bruijn(w)
            if k not in seen:
                seen.add(k)
                frontier.append((w, d + 1))
    return seen
