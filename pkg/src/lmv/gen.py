"""Seeded random generation of untyped terms, values and typed terms."""

from __future__ import annotations

import random
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

from .formula import And, Arrow, Atom, BOTTOM, Bottom, Formula, Or, depth, is_tautology
from .terms import App, Case, Inj, Lam, Mu, Named, Pair, Proj, Term, Var, size


@dataclass(frozen=True)
class GenConfig:
    seed: int = 0
    max_size: int = 10
    free_var_pool: tuple = ("x", "y", "z")
    free_mu_pool: tuple = ("a", "b")
    mu_bias: float = 0.25
    case_bias: float = 0.25

    def __post_init__(self):
        if self.max_size < 1:
            raise ValueError("max_size must be at least 1")
        if not (0 <= self.mu_bias <= 1 and 0 <= self.case_bias <= 1):
            raise ValueError("biases must lie in [0, 1]")
        if self.mu_bias + self.case_bias > 1:
            raise ValueError("mu_bias + case_bias must not exceed 1")


def item_rng(seed: int, index: int, salt: str = "") -> random.Random:
    """Independent deterministic stream for corpus item ``index``."""
    return random.Random(f"{salt}:{seed}:{index}")


# ---------------------------------------------------------------------------
# untyped terms


class _Untyped:
    def __init__(self, cfg: GenConfig, rng: random.Random):
        self.cfg = cfg
        self.rng = rng
        self.counter = 0

    def _fresh(self, stem: str) -> str:
        self.counter += 1
        return f"{stem}{self.counter}"

    def var(self, scope) -> Var:
        pool = list(scope) + list(self.cfg.free_var_pool)
        if scope and self.rng.random() < 0.7:
            pool = list(scope)
        return Var(self.rng.choice(pool))

    def mu_name(self, mscope) -> str:
        if mscope and self.rng.random() < 0.85:
            return self.rng.choice(list(mscope))
        return self.rng.choice(self.cfg.free_mu_pool)

    def split(self, n: int, parts: int) -> list:
        # n >= parts; each part >= 1
        cuts = sorted(self.rng.sample(range(1, n), parts - 1)) if parts > 1 else []
        bounds = [0] + cuts + [n]
        return [bounds[i + 1] - bounds[i] for i in range(parts)]

    def term(self, n: int, scope=(), mscope=()) -> Term:
        """A term of exactly ``n`` nodes."""
        rng = self.rng
        if n == 1:
            return self.var(scope)
        choices = []
        # (weight, builder); builders need n at least as large as their guard
        other = max(0.0, 1.0 - self.cfg.mu_bias - self.cfg.case_bias)
        if n >= 2:
            choices.append((self.cfg.mu_bias, self.mu))
            choices.append((other * 0.15, self.lam))
            choices.append((other * 0.05, self.inj))
            choices.append((other * 0.1, self.named))
        if n >= 3:
            choices.append((other * 0.1, self.app))
            choices.append((other * 0.5, self.redex))
            choices.append((other * 0.05, self.pair))
            choices.append((other * 0.05, self.proj))
        if n >= 5:
            choices.append((self.cfg.case_bias, self.case))
        total = sum(w for w, _ in choices)
        if total <= 0:
            return self.var(scope)
        r = rng.random() * total
        for w, build in choices:
            r -= w
            if r <= 0:
                return build(n, scope, mscope)
        return choices[-1][1](n, scope, mscope)

    def lam(self, n, scope, mscope):
        x = self._fresh("x")
        return Lam(x, self.term(n - 1, scope + (x,), mscope))

    def inj(self, n, scope, mscope):
        return Inj(self.rng.choice((1, 2)), self.term(n - 1, scope, mscope))

    def named(self, n, scope, mscope):
        return Named(self.mu_name(mscope), self.term(n - 1, scope, mscope))

    def mu(self, n, scope, mscope):
        a = self._fresh("a")
        inner = mscope + (a,)
        if n >= 3 and self.rng.random() < 0.7:
            body = Named(a, self.term(n - 2, scope, inner))
        else:
            body = self.term(n - 1, scope, inner)
        return Mu(a, body)

    def pair(self, n, scope, mscope):
        l, r = self.split(n - 1, 2)
        return Pair(self.term(l, scope, mscope), self.term(r, scope, mscope))

    def proj(self, n, scope, mscope):
        return App(self.term(n - 2, scope, mscope), Proj(self.rng.choice((1, 2))))

    def app(self, n, scope, mscope):
        f, a = self.split(n - 1, 2)
        fun = self.term(f, scope, mscope)
        if f >= 2 and self.rng.random() < 0.3:
            fun = self.lam(f, scope, mscope)
        return App(fun, self.term(a, scope, mscope))

    def redex(self, n, scope, mscope):
        """An application shaped like a redex of one of the seven rules."""
        rng = self.rng
        kinds = ["beta", "delta_v'", "mu", "mu_v'"]
        if n >= 5:
            kinds.append("pi")
        if n >= 6:
            kinds.append("D")
        if n >= 7:
            kinds += ["delta", "delta"]
        kind = rng.choice(kinds)
        if kind == "beta":
            f, a = self.split(n - 1, 2)
            return App(self.lam(f, scope, mscope) if f >= 2 else self.var(scope), self.value(a, scope, mscope))
        if kind == "pi":
            l, r = self.split(n - 3, 2)
            return App(Pair(self.value(l, scope, mscope), self.value(r, scope, mscope)), Proj(rng.choice((1, 2))))
        if kind == "D":
            v, b1, b2 = self.split(n - 3, 3)
            x1, x2 = self._fresh("x"), self._fresh("x")
            return App(
                Inj(rng.choice((1, 2)), self.value(v, scope, mscope)),
                Case(x1, self.term(b1, scope + (x1,), mscope), x2, self.term(b2, scope + (x2,), mscope)),
            )
        if kind == "delta":
            f, a = self.split(n - 1, 2)
            if f < 5:
                f, a = 5, n - 6
            return App(self.case(f, scope, mscope), self.term(a, scope, mscope))
        if kind == "mu":
            f, a = self.split(n - 1, 2)
            return App(self.mu(f, scope, mscope) if f >= 2 else self.var(scope), self.term(a, scope, mscope))
        # delta_v' / mu_v'
        f, a = self.split(n - 1, 2)
        if a < 2:
            return App(self.value(f, scope, mscope), self.term(a, scope, mscope))
        arg = self.case(a, scope, mscope) if kind == "delta_v'" and a >= 5 else self.mu(a, scope, mscope)
        return App(self.value(f, scope, mscope), arg)

    def case(self, n, scope, mscope):
        s, b1, b2 = self.split(n - 2, 3)
        x1, x2 = self._fresh("x"), self._fresh("x")
        scrut = self.term(s, scope, mscope)
        return App(
            scrut,
            Case(x1, self.term(b1, scope + (x1,), mscope), x2, self.term(b2, scope + (x2,), mscope)),
        )

    def value(self, n, scope=(), mscope=()) -> Term:
        """A value of exactly ``n`` nodes."""
        rng = self.rng
        if n == 1:
            return self.var(scope)
        opts = ["lam", "named", "inj"] + (["pair"] if n >= 3 else [])
        kind = rng.choice(opts)
        if kind == "lam":
            x = self._fresh("x")
            return Lam(x, self.term(n - 1, scope + (x,), mscope))
        if kind == "named":
            return Named(self.mu_name(mscope), self.term(n - 1, scope, mscope))
        if kind == "inj":
            return Inj(rng.choice((1, 2)), self.value(n - 1, scope, mscope))
        l, r = self.split(n - 1, 2)
        return Pair(self.value(l, scope, mscope), self.value(r, scope, mscope))


def _pick_size(cfg: GenConfig, rng: random.Random) -> int:
    # mostly near the bound, where redexes and segments have room
    if cfg.max_size == 1 or rng.random() < 0.2:
        return rng.randint(1, cfg.max_size)
    return rng.randint(cfg.max_size // 2 + 1, cfg.max_size)


def gen_term(cfg: GenConfig, rng: Optional[random.Random] = None) -> Term:
    rng = rng or random.Random(cfg.seed)
    g = _Untyped(cfg, rng)
    return g.term(_pick_size(cfg, rng))


def gen_term_of_size(cfg: GenConfig, n: int, rng: Optional[random.Random] = None) -> Term:
    rng = rng or random.Random(cfg.seed)
    return _Untyped(cfg, rng).term(n)


def gen_value(cfg: GenConfig, rng: Optional[random.Random] = None) -> Term:
    rng = rng or random.Random(cfg.seed)
    g = _Untyped(cfg, rng)
    return g.value(_pick_size(cfg, rng))


# ---------------------------------------------------------------------------
# typed terms


class GenerationFailure(Exception):
    pass


ATOMS = ("A", "B", "C")


def random_formula(rng: random.Random, max_depth: int = 3, atoms=ATOMS) -> Formula:
    if max_depth == 0 or rng.random() < 0.3:
        return BOTTOM if rng.random() < 0.1 else Atom(rng.choice(atoms))
    ctor = rng.choice((Arrow, Arrow, And, Or))
    return ctor(random_formula(rng, max_depth - 1, atoms), random_formula(rng, max_depth - 1, atoms))


@lru_cache(maxsize=None)
def _formula_pool(n: int, seed: int) -> tuple:
    rng = random.Random(seed)
    pool: list = []
    while len(pool) < n:
        f = random_formula(rng)
        if depth(f) >= 1 and is_tautology(f) and f not in pool and _reliable(f):
            pool.append(f)
    return tuple(pool)


def formula_pool(n: int = 48, seed: int = 0) -> list:
    """A fixed pool of classical tautologies over three atoms, depth at most 3.

    Tautologies the bounded search cannot prove on every probe seed are left
    out so that typed corpora rarely lose items to generation failure.
    """
    return list(_formula_pool(n, seed))


def _reliable(goal: Formula, probes: int = 6) -> bool:
    cfg = GenConfig(max_size=10)
    for k in range(probes):
        try:
            gen_typed_term(cfg, goal, random.Random(f"probe:{k}"), retries=2)
        except GenerationFailure:
            return False
    return True


def _subformulas(f: Formula, out: set) -> set:
    out.add(f)
    if isinstance(f, Arrow):
        _subformulas(f.dom, out)
        _subformulas(f.cod, out)
    elif isinstance(f, (And, Or)):
        _subformulas(f.left, out)
        _subformulas(f.right, out)
    return out


class _Typed:
    """Randomised goal-directed derivation builder with bounded work."""

    def __init__(self, rng: random.Random, max_size: int, cut_rate: float = 0.35, max_calls: int = 4000):
        self.rng = rng
        self.max_size = max_size
        self.cut_rate = cut_rate
        self.calls = 0
        self.max_calls = max_calls
        self.counter = 0

    def fresh(self, stem: str) -> str:
        self.counter += 1
        return f"{stem}{self.counter}"

    def prove(self, goal: Formula, gamma: tuple, delta: tuple, fuel: int) -> Optional[Term]:
        self.calls += 1
        if self.calls > self.max_calls or fuel <= 0:
            return None
        opts = ["ax", "intro", "elim", "classical"]
        ws = [4, 3, 2, 1]
        order = []
        if fuel > 3:
            # a cut tried first plants a redex; otherwise it is the last resort
            if self.rng.random() < self.cut_rate:
                order.append("cut")
            else:
                opts.append("cut")
                ws.append(0.5)
        while opts:
            i = self.rng.choices(range(len(opts)), ws)[0]
            order.append(opts.pop(i))
            ws.pop(i)
        for opt in order:
            t = getattr(self, "_" + opt)(goal, gamma, delta, fuel)
            if t is not None:
                return t
        return None

    def _ax(self, goal, gamma, delta, fuel):
        hits = [x for x, f in gamma if f == goal]
        # innermost binding shadows outer ones with the same name
        visible = {x: f for x, f in gamma}
        hits = [x for x in hits if visible[x] == goal]
        return Var(self.rng.choice(hits)) if hits else None

    def _intro(self, goal, gamma, delta, fuel):
        if isinstance(goal, Arrow):
            x = self.fresh("x")
            body = self.prove(goal.cod, gamma + ((x, goal.dom),), delta, fuel - 1)
            return None if body is None else Lam(x, body, goal.dom)
        if isinstance(goal, And):
            l = self.prove(goal.left, gamma, delta, fuel - 1)
            if l is None:
                return None
            r = self.prove(goal.right, gamma, delta, fuel - 1 - size(l))
            return None if r is None else Pair(l, r)
        if isinstance(goal, Or):
            i = self.rng.choice((1, 2))
            for idx in (i, 3 - i):
                part, other = (goal.left, goal.right) if idx == 1 else (goal.right, goal.left)
                b = self.prove(part, gamma, delta, fuel - 1)
                if b is not None:
                    return Inj(idx, b, other)
            return None
        if isinstance(goal, Bottom):
            names = list({a: f for a, f in delta}.items())
            self.rng.shuffle(names)
            for a, f in names[:2]:
                b = self.prove(f, gamma, delta, fuel - 1)
                if b is not None:
                    return Named(a, b)
        return None

    def _elim(self, goal, gamma, delta, fuel):
        visible = list({x: f for x, f in gamma}.items())
        self.rng.shuffle(visible)
        for x, f in visible[:3]:
            t = self._spine(Var(x), f, goal, gamma, delta, fuel - 1, 3)
            if t is not None:
                return t
        return None

    def _spine(self, head: Term, f: Formula, goal, gamma, delta, fuel, steps):
        if f == goal:
            return head
        if steps == 0 or fuel <= 0:
            return None
        if isinstance(f, Arrow):
            arg = self.prove(f.dom, gamma, delta, min(fuel - 1, 4))
            if arg is None:
                return None
            return self._spine(App(head, arg), f.cod, goal, gamma, delta, fuel - 1 - size(arg), steps - 1)
        if isinstance(f, And):
            i = self.rng.choice((1, 2))
            part = f.left if i == 1 else f.right
            return self._spine(App(head, Proj(i)), part, goal, gamma, delta, fuel - 1, steps - 1)
        if isinstance(f, Or):
            y, z = self.fresh("x"), self.fresh("x")
            b1 = self.prove(goal, gamma + ((y, f.left),), delta, fuel - 2)
            if b1 is None:
                return None
            b2 = self.prove(goal, gamma + ((z, f.right),), delta, fuel - 2 - size(b1))
            return None if b2 is None else App(head, Case(y, b1, z, b2))
        if isinstance(f, Bottom) and not isinstance(goal, Bottom):
            return Mu(self.fresh("a"), head, goal)
        return None

    def _classical(self, goal, gamma, delta, fuel):
        if isinstance(goal, Bottom):
            return None
        a = self.fresh("a")
        body = self.prove(BOTTOM, gamma, delta + ((a, goal),), fuel - 1)
        return None if body is None else Mu(a, body, goal)

    def _cut_formula(self, goal, gamma) -> Formula:
        if gamma and self.rng.random() < 0.6:
            # a hypothesis is always provable, so the cut is likely to close
            return self.rng.choice(gamma)[1]
        pool: set = set()
        _subformulas(goal, pool)
        for _, f in gamma:
            _subformulas(f, pool)
        pool |= {Atom(a) for a in ATOMS}
        return self.rng.choice(sorted(pool, key=str))

    def _cut(self, goal, gamma, delta, fuel):
        rng = self.rng
        kind = rng.choice(("beta", "beta", "pi", "D", "mu", "mu_v'", "delta"))
        a = self._cut_formula(goal, gamma)
        if kind == "beta":
            x = self.fresh("x")
            body = self.prove(goal, gamma + ((x, a),), delta, fuel // 2)
            arg = body and self.prove(a, gamma, delta, fuel // 2)
            return App(Lam(x, body, a), arg) if arg is not None else None
        if kind == "pi":
            l = self.prove(goal, gamma, delta, fuel // 2)
            r = l and self.prove(a, gamma, delta, fuel // 3)
            if r is None:
                return None
            return App(Pair(l, r), Proj(1)) if rng.random() < 0.5 else App(Pair(r, l), Proj(2))
        if kind == "D":
            v = self.prove(a, gamma, delta, fuel // 3)
            other = self._cut_formula(goal, gamma)
            if v is None:
                return None
            x1, x2 = self.fresh("x"), self.fresh("x")
            b1 = self.prove(goal, gamma + ((x1, a),), delta, fuel // 3)
            b2 = b1 and self.prove(goal, gamma + ((x2, other),), delta, fuel // 3)
            return App(Inj(1, v, other), Case(x1, b1, x2, b2)) if b2 is not None else None
        if kind == "mu":
            # (mu a:(A -> goal). ... e) with e : A
            m = self._classical(Arrow(a, goal), gamma, delta, fuel // 2)
            arg = m and self.prove(a, gamma, delta, fuel // 3)
            return App(m, arg) if arg is not None else None
        if kind == "mu_v'":
            f = self.prove(Arrow(a, goal), gamma, delta, fuel // 2)
            m = f and self._classical(a, gamma, delta, fuel // 3)
            return App(f, m) if m is not None else None
        # delta: ((s [..]) e) where the case computes a function
        x = self.fresh("x")
        fun = self._elim_or(Arrow(a, goal), gamma, delta, fuel // 2)
        arg = fun and self.prove(a, gamma, delta, fuel // 3)
        return App(fun, arg) if arg is not None else None

    def _elim_or(self, goal, gamma, delta, fuel):
        """A case analysis on a fresh injection producing ``goal``."""
        a = Atom(self.rng.choice(ATOMS))
        for x, f in gamma:
            if isinstance(f, Or):
                return self._spine(Var(x), f, goal, gamma, delta, fuel, 1)
        v = self.prove(a, gamma, delta, 3)
        if v is None:
            return None
        x1, x2 = self.fresh("x"), self.fresh("x")
        b1 = self.prove(goal, gamma + ((x1, a),), delta, fuel // 2)
        b2 = b1 and self.prove(goal, gamma + ((x2, a),), delta, fuel // 2)
        return App(Inj(1, v, a), Case(x1, b1, x2, b2)) if b2 is not None else None


def gen_typed_term(cfg: GenConfig, goal: Formula, rng: Optional[random.Random] = None, retries: int = 8) -> Term:
    """A closed annotated term proving ``goal``; raises :class:`GenerationFailure`."""
    from .typecheck import EMPTY, infer

    rng = rng or random.Random(cfg.seed)
    for attempt in range(retries):
        # later attempts get more room; deep classical goals need it
        fuel = cfg.max_size + 4 * attempt
        g = _Typed(rng, fuel)
        t = g.prove(goal, (), (), fuel)
        if t is not None and size(t) <= 4 * cfg.max_size:
            f, _ = infer(EMPTY, t)
            if f != goal:
                raise AssertionError(f"generator produced {f} for goal {goal}")
            return t
    raise GenerationFailure(f"no term of type {goal} within the bounds")
