"""Propositional formulas used as types: atoms, falsity, implication,
conjunction and disjunction."""

from __future__ import annotations

from dataclasses import dataclass


class Formula:
    __slots__ = ()

    def __str__(self) -> str:
        return print_formula(self)


@dataclass(frozen=True)
class Atom(Formula):
    name: str


@dataclass(frozen=True)
class Bottom(Formula):
    pass


@dataclass(frozen=True)
class Arrow(Formula):
    dom: Formula
    cod: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


BOTTOM = Bottom()

# binding strength: & binds tighter than |, which binds tighter than ->
_PREC = {Arrow: 1, Or: 2, And: 3}


def _prec(f: Formula) -> int:
    return _PREC.get(type(f), 4)


def print_formula(f: Formula) -> str:
    if isinstance(f, Atom):
        return f.name
    if isinstance(f, Bottom):
        return "#"
    if isinstance(f, Arrow):
        # right-associative
        left = print_formula(f.dom)
        if _prec(f.dom) <= 1:
            left = f"({left})"
        return f"{left} -> {print_formula(f.cod)}"
    op = " & " if isinstance(f, And) else " | "
    p = _prec(f)
    # & and | are printed left-associatively
    left = print_formula(f.left)
    if _prec(f.left) < p:
        left = f"({left})"
    right = print_formula(f.right)
    if _prec(f.right) <= p:
        right = f"({right})"
    return f"{left}{op}{right}"


def atoms(f: Formula) -> set[str]:
    if isinstance(f, Atom):
        return {f.name}
    if isinstance(f, Bottom):
        return set()
    if isinstance(f, Arrow):
        return atoms(f.dom) | atoms(f.cod)
    return atoms(f.left) | atoms(f.right)


def evaluate(f: Formula, valuation: dict[str, bool]) -> bool:
    """Classical truth value of `f` under `valuation`."""
    if isinstance(f, Atom):
        return valuation[f.name]
    if isinstance(f, Bottom):
        return False
    if isinstance(f, Arrow):
        return (not evaluate(f.dom, valuation)) or evaluate(f.cod, valuation)
    if isinstance(f, And):
        return evaluate(f.left, valuation) and evaluate(f.right, valuation)
    return evaluate(f.left, valuation) or evaluate(f.right, valuation)


def is_tautology(f: Formula) -> bool:
    from itertools import product

    names = sorted(atoms(f))
    return all(
        evaluate(f, dict(zip(names, bits)))
        for bits in product((False, True), repeat=len(names))
    )


def depth(f: Formula) -> int:
    if isinstance(f, (Atom, Bottom)):
        return 0
    if isinstance(f, Arrow):
        return 1 + max(depth(f.dom), depth(f.cod))
    return 1 + max(depth(f.left), depth(f.right))
