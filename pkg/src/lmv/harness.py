"""Property suites over seeded generated corpora.

Every corpus item gets its own random stream derived from (seed, index,
suite), so a report does not depend on the order or the number of workers
that processed the items.
"""

from __future__ import annotations

import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from functools import partial
from typing import Callable, Optional

from .gen import (
    GenConfig,
    GenerationFailure,
    formula_pool,
    gen_term,
    gen_typed_term,
    gen_value,
    item_rng,
)
from .parallel import (
    DEFAULT_BUDGET,
    ReductBudget,
    _ReductSets,
    check_confluence_tile,
    check_diamond,
    check_key_lemma,
    eterm_reducts,
    labelled_reducts,
    parallel_reducts,
)
from .reduction import contract, find_redexes, normalize, rules_at
from .segments import (
    SegmentCapExceeded,
    SegmentWood,
    acceptors,
    buds,
    enumerate_segment_trees,
    segment_roots,
    validate_wood,
    wood_substitute,
)
from .syntax import ParseError, parse_term, print_eterm, print_term
from .terms import (
    Case,
    Proj,
    Term,
    alpha_eq,
    free_mu_vars,
    free_vars,
    fresh_marker,
    is_segment_node,
    is_value,
    label_at,
    mu_subst_arg,
    mu_subst_fun,
    occurrences,
    strip_labels,
    subst_var,
    subterm_at,
    wrap_marked,
)
from .typecheck import (
    EMPTY,
    ReconstructionError,
    TypeCheckError,
    check,
    contract_typed,
    formulas_at,
)

SKIP_CAP = 0.2
PAIR_CAP = 50


@dataclass
class CaseResult:
    status: str  # pass | fail | inconclusive | skip
    detail: str = ""
    terms: tuple = ()
    diagnostics: int = 0


@dataclass
class Witness:
    suite: str
    seed: int
    index: int
    status: str
    detail: str
    terms: tuple

    def format(self) -> str:
        head = f"{self.status.upper()} suite={self.suite} seed={self.seed} item={self.index}: {self.detail}"
        return "\n".join([head] + [f"    {s}" for s in self.terms])


@dataclass
class SuiteReport:
    suite: str
    seed: int
    size: int
    run: int = 0
    passed: int = 0
    failed: int = 0
    inconclusive: int = 0
    skipped: int = 0
    diagnostics: int = 0
    aborted: bool = False
    wall_time: float = 0.0
    witnesses: list = field(default_factory=list)
    cases: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.failed == 0 and not self.aborted

    def add(self, index: int, res: CaseResult) -> None:
        self.run += 1
        if res.status == "pass":
            self.passed += 1
        elif res.status == "fail":
            self.failed += 1
        elif res.status == "inconclusive":
            self.inconclusive += 1
        elif res.status == "skip":
            self.skipped += 1
        else:
            raise ValueError(f"bad case status {res.status!r}")
        self.diagnostics += res.diagnostics
        self.cases.append(res)
        if res.status in ("fail", "inconclusive"):
            self.witnesses.append(Witness(self.suite, self.seed, index, res.status, res.detail, res.terms))

    def table(self) -> str:
        cols = ("suite", "size", "run", "pass", "fail", "incon", "skip", "diag", "time")
        row = (
            self.suite, self.size, self.run, self.passed, self.failed,
            self.inconclusive, self.skipped, self.diagnostics, f"{self.wall_time:.2f}s",
        )
        fmt = "{:<15}{:>6}{:>7}{:>7}{:>7}{:>7}{:>7}{:>7}{:>10}"
        lines = [fmt.format(*cols), fmt.format(*row)]
        if self.aborted:
            lines.append(f"aborted: {self.skipped} skips exceed {int(SKIP_CAP * 100)}% of the corpus")
        return "\n".join(lines)

    def result_line(self) -> str:
        return (
            f"RESULT suite={self.suite} pass={self.passed} fail={self.failed} "
            f"inconclusive={self.inconclusive} skip={self.skipped}"
        )

    def render(self, show_inconclusive: bool = False) -> str:
        out = [self.table()]
        for w in self.witnesses:
            if w.status == "fail" or show_inconclusive:
                out.append(w.format())
        out.append(self.result_line())
        return "\n".join(out)


def _verdict(v, t: Term) -> CaseResult:
    terms = tuple(print_term(strip_labels(x)) for x in v.witness) or (print_term(t),)
    detail = v.detail
    if v.status == "pass" and v.join is not None:
        detail = print_term(strip_labels(v.join))
    return CaseResult(v.status, detail, terms)


def _term_with(cfg: GenConfig, rng: random.Random, want: Callable[[Term], bool], tries: int = 20) -> Term:
    """A generated term satisfying ``want`` if one turns up, else the last draw."""
    t = gen_term(cfg, rng)
    for _ in range(tries):
        if want(t):
            break
        t = gen_term(cfg, rng)
    return t


# ---------------------------------------------------------------------------
# untyped suites


def case_key_lemma(cfg: GenConfig, rng: random.Random, budget: ReductBudget) -> CaseResult:
    t = gen_term(cfg, rng)
    return _verdict(check_key_lemma(t, budget), t)


def case_diamond(cfg: GenConfig, rng: random.Random, budget: ReductBudget) -> CaseResult:
    t = gen_term(cfg, rng)
    return _verdict(check_diamond(t, budget, PAIR_CAP), t)


def case_confluence(cfg: GenConfig, rng: random.Random, budget: ReductBudget, k: int = 3, m: int = 3) -> CaseResult:
    t = _term_with(cfg, rng, lambda u: bool(find_redexes(u)))
    return _verdict(check_confluence_tile(t, k, m, rng.randrange(2**32), budget), t)


def case_critical_pairs(cfg: GenConfig, rng: random.Random, budget: ReductBudget) -> CaseResult:
    t = gen_term(cfg, rng)
    for path, node in occurrences(t):
        rules = rules_at(node, "cbv")
        if len(rules) > 1:
            return CaseResult("fail", f"rules {', '.join(rules)} overlap at {list(path)}", (print_term(t),))
    return CaseResult("pass")


def case_roundtrip(cfg: GenConfig, rng: random.Random, budget: ReductBudget) -> CaseResult:
    if rng.random() < 0.5:
        t = gen_term(cfg, rng)
        annotated = False
    else:
        goal = rng.choice(formula_pool())
        try:
            t = gen_typed_term(cfg, goal, rng)
        except GenerationFailure:
            t = gen_term(cfg, rng)
        annotated = True
    text = print_term(t, annotated)
    try:
        back = parse_term(text)
    except ParseError as exc:
        return CaseResult("fail", f"printed term does not parse: {exc.format()}", (text,))
    if not alpha_eq(back, t):
        return CaseResult("fail", "parse(print(t)) differs from t", (text, print_term(back, annotated)))
    if annotated and print_term(back, True) != text:
        return CaseResult("fail", "annotations lost in round trip", (text, print_term(back, True)))
    return CaseResult("pass")


def case_values(cfg: GenConfig, rng: random.Random, budget: ReductBudget, fuel: int = 20) -> CaseResult:
    """Every term reachable from a value along a leftmost and a random trace,
    together with each of its one-step reducts, is a value."""
    v = gen_value(cfg, rng)
    exhausted = False
    for strategy in ("lo", "random"):
        trace = normalize(v, "cbv", strategy, rng.randrange(2**32), fuel)
        exhausted |= trace.exhausted
        for w in [v] + [u for _, u in trace.steps]:
            for site in find_redexes(w, "cbv"):
                r = contract(w, site)
                if not is_value(r):
                    return CaseResult(
                        "fail", f"{site.rule} at {list(site.occurrence)} leaves the values",
                        (print_term(v), print_term(w), print_term(r)),
                    )
    if exhausted:
        return CaseResult("skip", f"no normal form within {fuel} steps", (print_term(v),))
    return CaseResult("pass")


# ---------------------------------------------------------------------------
# substitution and wood lemmas


def _pairs(xs: list, ys: list, rng: random.Random, cap: int = PAIR_CAP) -> list:
    pairs = [(x, y) for x in xs for y in ys]
    if len(pairs) > cap:
        pairs = rng.sample(pairs, cap)
    return pairs


def _small_eterm(cfg: GenConfig, rng: random.Random):
    small = replace(cfg, max_size=max(1, min(cfg.max_size, 4)))
    r = rng.random()
    if r < 0.25:
        return Proj(rng.choice((1, 2)))
    if r < 0.6:
        return gen_term(small, rng)
    x1, x2 = rng.sample(("u", "w", "x", "y"), 2)
    return Case(x1, gen_term(small, rng), x2, gen_term(small, rng))


def _lemma_check(lhs_of, rhs_of, ts: list, ps: list, rng, budget, shown) -> CaseResult:
    """``lhs_of(t, p) ≻ rhs_of(t', p')`` for sampled reduct pairs."""
    sets = _ReductSets(budget)
    inconclusive = None
    for t2, p2 in _pairs(ts, ps, rng):
        lhs, rhs = lhs_of(), rhs_of(t2, p2)
        m = sets.member(lhs, rhs)
        if m is False:
            return CaseResult("fail", "substituted reduct is not a parallel reduct", shown + (print_term(lhs), print_term(strip_labels(rhs))))
        if m is None and inconclusive is None:
            inconclusive = CaseResult("inconclusive", "reduct budget exceeded", shown + (print_term(lhs),))
    return inconclusive or CaseResult("pass")


def case_subst(cfg: GenConfig, rng: random.Random, budget: ReductBudget, form: Optional[int] = None) -> CaseResult:
    """One of the three substitution forms on a small instance."""
    form = form or rng.choice((1, 2, 3))
    small = replace(cfg, max_size=max(1, min(cfg.max_size, 4)))
    if form == 1:
        t = _term_with(cfg, rng, lambda u: bool(free_vars(u)))
        name = min(free_vars(t)) if free_vars(t) else "x"
        p = gen_value(small, rng)
    else:
        t = _term_with(cfg, rng, lambda u: bool(free_mu_vars(u)))
        name = min(free_mu_vars(t)) if free_mu_vars(t) else "a"
        p = gen_value(small, rng) if form == 3 else _small_eterm(cfg, rng)
    sub = {1: subst_var, 2: mu_subst_arg, 3: mu_subst_fun}[form]
    ts, over = parallel_reducts(t, budget)
    ps = eterm_reducts(p, budget) if form == 2 else parallel_reducts(p, budget)[0] or None
    shown = (f"form {form} on {name}", print_term(t), print_eterm(p))
    if over or ps is None:
        return CaseResult("inconclusive", "reduct budget exceeded", shown)
    ps = [strip_labels(q) for q in ps]
    return _lemma_check(lambda: sub(t, name, p), lambda t2, p2: sub(t2, name, p2), ts, ps, rng, budget, shown)


def random_wood_pair(t: Term, rng: random.Random, cap: int = 16):
    """Two woods with equal bud sets, the trunk of the first inside the second."""
    trees1, trees2, proper1, proper2 = [], [], set(), set()
    for b in buds(t):
        r = rng.random()
        if r < 0.3:
            continue
        if r < 0.5 or not is_segment_node(subterm_at(t, b)):
            proper1.add(b)
            proper2.add(b)
            continue
        try:
            options = enumerate_segment_trees(t, b, cap)
        except SegmentCapExceeded:
            options = []
        if not options:
            proper1.add(b)
            proper2.add(b)
            continue
        big = rng.choice(options)
        trees2.append(big)
        smaller = [o for o in options if o.members <= big.members]
        choice = rng.randrange(len(smaller) + 1)
        if choice == len(smaller):
            proper1.add(b)
        else:
            trees1.append(smaller[choice])
    q1 = SegmentWood(tuple(trees1), frozenset(proper1))
    q2 = SegmentWood(tuple(trees2), frozenset(proper2))
    validate_wood(t, q1)
    validate_wood(t, q2)
    return q1, q2


def case_woods(cfg: GenConfig, rng: random.Random, budget: ReductBudget) -> CaseResult:
    """``t[V/Q1] ≻ t'[V'/Q2]`` (or with an E-term) with Q2 carried to ``t'`` by labels."""
    t = _term_with(cfg, rng, lambda u: bool(segment_roots(u)))
    q1, q2 = random_wood_pair(t, rng)
    small = replace(cfg, max_size=max(1, min(cfg.max_size, 4)))
    left = rng.random() < 0.5
    p = gen_value(small, rng) if left else _small_eterm(cfg, rng)
    marker = fresh_marker()
    ts = labelled_reducts(label_at(t, acceptors(t, q2), marker), budget)
    ps = parallel_reducts(p, budget)[0] or None if left else eterm_reducts(p, budget)
    shown = (
        f"{'value' if left else 'E-term'} {print_eterm(p)}",
        print_term(t),
        f"Q1 trees={[sorted(tr.members) for tr in q1.trees]} buds={sorted(q1.proper_buds)}",
        f"Q2 trees={[sorted(tr.members) for tr in q2.trees]} buds={sorted(q2.proper_buds)}",
    )
    if ts is None or ps is None:
        return CaseResult("inconclusive", "reduct budget exceeded", shown)
    ps = [strip_labels(q) for q in ps]
    lhs = wood_substitute(t, q1, p, left)
    return _lemma_check(
        lambda: lhs,
        lambda t2, p2: strip_labels(wrap_marked(t2, marker, p2, left)),
        ts, ps, rng, budget, shown,
    )


# ---------------------------------------------------------------------------
# typed suites


def _typed_term(cfg: GenConfig, rng: random.Random, attempts: int = 5):
    pool = formula_pool()
    for _ in range(attempts):
        goal = rng.choice(pool)
        try:
            return gen_typed_term(cfg, goal, rng), goal
        except GenerationFailure:
            continue
    return None, None


def case_subject(cfg: GenConfig, rng: random.Random, budget: ReductBudget, fuel: int = 20) -> CaseResult:
    """Each one-step CBV reduct along a random trace re-checks at the goal.

    Segment-trees of every visited term are also checked to be uniformly
    typed.
    """
    t, goal = _typed_term(cfg, rng)
    if t is None:
        return CaseResult("inconclusive", "typed generation failed")
    cur = t
    diagnostics = 0
    for _ in range(fuel):
        shown = (f"goal {goal}", print_term(t, True), print_term(cur, True))
        try:
            table = formulas_at(EMPTY, cur)
        except TypeCheckError as exc:
            return CaseResult("fail", f"reduct no longer checks: {exc}", shown)
        bad = _mixed_segment(cur, table)
        if bad:
            return CaseResult("fail", bad, shown)
        sites = find_redexes(cur, "cbv")
        if not sites:
            break
        nxt = []
        for site in sites:
            try:
                r = contract_typed(EMPTY, cur, site, table)
            except ReconstructionError:
                diagnostics += 1
                continue
            try:
                check(EMPTY, r, goal)
            except TypeCheckError as exc:
                return CaseResult("fail", f"{site.rule} at {list(site.occurrence)}: {exc}", shown + (print_term(r, True),))
            nxt.append(r)
        if not nxt:
            break
        cur = rng.choice(nxt)
    else:
        if find_redexes(cur, "cbv"):
            return CaseResult("skip", f"no normal form within {fuel} steps", (print_term(t, True),), diagnostics)
    if diagnostics:
        return CaseResult("inconclusive", "annotation reconstruction failed", (print_term(t, True),), diagnostics)
    return CaseResult("pass")


def _mixed_segment(t: Term, table: dict) -> str:
    for root in segment_roots(t):
        try:
            trees = enumerate_segment_trees(t, root, 64)
        except SegmentCapExceeded:
            continue
        for tree in trees:
            kinds = {table[m] for m in tree.members}
            if len(kinds) > 1:
                return f"segment-tree at {list(root)} mixes formulas {sorted(map(str, kinds))}"
    return ""


def case_cbn_sn(cfg: GenConfig, rng: random.Random, budget: ReductBudget, fuel: int = 200) -> CaseResult:
    """Leftmost CBN normalisation of a typed term; only reported."""
    t, goal = _typed_term(cfg, rng)
    if t is None:
        return CaseResult("inconclusive", "typed generation failed")
    trace = normalize(t, "cbn", "lo", 0, fuel)
    if trace.exhausted:
        return CaseResult("skip", f"no normal form within {fuel} steps", (print_term(t, True),))
    return CaseResult("pass", f"{len(trace.steps)} steps")


SUITES = {
    "key-lemma": case_key_lemma,
    "diamond": case_diamond,
    "confluence": case_confluence,
    "subject": case_subject,
    "values": case_values,
    "subst": case_subst,
    "woods": case_woods,
    "roundtrip": case_roundtrip,
    "critical-pairs": case_critical_pairs,
    "cbn-sn": case_cbn_sn,
}


class SuiteAborted(Exception):
    pass


def run_case(name: str, cfg: GenConfig, budget: ReductBudget, index: int) -> CaseResult:
    rng = item_rng(cfg.seed, index, name)
    try:
        return SUITES[name](cfg, rng, budget)
    except Exception as exc:  # a crash is a failure with a reproducer, not a dead run
        return CaseResult("fail", f"{type(exc).__name__}: {exc}")


def run_suite(
    name: str,
    cfg: GenConfig,
    count: int,
    budget: ReductBudget = DEFAULT_BUDGET,
    jobs: int = 1,
    skip_cap: float = SKIP_CAP,
) -> SuiteReport:
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r} (expected one of {', '.join(SUITES)})")
    if count < 0 or jobs < 1:
        raise ValueError("count must be non-negative and jobs positive")
    report = SuiteReport(name, cfg.seed, cfg.max_size)
    start = time.perf_counter()
    work = partial(run_case, name, cfg, budget)
    limit = skip_cap * count
    if jobs == 1:
        results = map(work, range(count))
        pool = None
    else:
        pool = ProcessPoolExecutor(jobs)
        results = pool.map(work, range(count), chunksize=max(1, count // (4 * jobs)))
    try:
        for i, res in enumerate(results):
            report.add(i, res)
            if report.skipped > limit:
                report.aborted = True
                break
    finally:
        if pool is not None:
            pool.shutdown(cancel_futures=True)
    report.wall_time = time.perf_counter() - start
    return report
