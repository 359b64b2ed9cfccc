"""Concrete syntax: tokenizer, recursive-descent parser and printer.

Grammar::

    F ::= UPPER-ident | '#' | F '->' F | F '&' F | F '|' F | '(' F ')'
    T ::= ident | '\\' ident [':' F] '.' T | 'mu' '@'ident [':' F] '.' T
        | '(' '@'ident T ')' | '(' T E ')' | '<' T ',' T '>'
        | 'in1' ['[' F ']'] T | 'in2' ['[' F ']'] T
    E ::= T | 'p1' | 'p2' | '[' ident '.' T ',' ident '.' T ']'

``&`` binds tighter than ``|``, which binds tighter than the
right-associative ``->``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .formula import And, Arrow, Atom, BOTTOM, Formula, Or, print_formula
from .terms import App, Case, ETerm, Inj, Lam, Mu, Named, Pair, Proj, Term, Var

KEYWORDS = {"mu", "in1", "in2", "p1", "p2"}

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<arrow>->)
  | (?P<mu_name>@[A-Za-z_][A-Za-z0-9_']*)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
  | (?P<punct>[\\.:()<>,\[\]&|\#])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class SourceSpan:
    start: int
    end: int


@dataclass(frozen=True)
class Token:
    kind: str  # 'ident', 'mu_name', 'kw', 'sym', 'eof'
    text: str
    span: SourceSpan


class ParseError(Exception):
    def __init__(self, message: str, span: SourceSpan, expected=(), source: str = ""):
        self.message = message
        self.span = span
        self.expected = frozenset(expected)
        self.source = source
        super().__init__(self.format())

    def line_col(self) -> tuple[int, int]:
        prefix = self.source[: self.span.start]
        line = prefix.count("\n") + 1
        col = self.span.start - (prefix.rfind("\n") + 1) + 1
        return line, col

    def format(self) -> str:
        line, col = self.line_col()
        msg = self.message
        if self.expected:
            msg += " (expected " + ", ".join(sorted(self.expected)) + ")"
        return f"{line}:{col}: {msg}"


def tokenize(text: str) -> list[Token]:
    toks = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(
                f"unexpected character {text[pos]!r}", SourceSpan(pos, pos + 1), source=text
            )
        kind = m.lastgroup
        span = SourceSpan(m.start(), m.end())
        if kind == "ident":
            kind = "kw" if m.group() in KEYWORDS else "ident"
        elif kind in ("punct", "arrow"):
            kind = "sym"
        if kind != "ws":
            toks.append(Token(kind, m.group(), span))
        pos = m.end()
    toks.append(Token("eof", "", SourceSpan(len(text), len(text))))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = tokenize(text)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def error(self, expected) -> ParseError:
        t = self.tok
        found = "end of input" if t.kind == "eof" else repr(t.text)
        return ParseError(f"unexpected {found}", t.span, expected, self.text)

    def at(self, text: str) -> bool:
        return self.tok.kind in ("sym", "kw") and self.tok.text == text

    def expect(self, text: str) -> Token:
        if not self.at(text):
            raise self.error({repr(text)})
        t = self.tok
        self.i += 1
        return t

    def ident(self) -> str:
        if self.tok.kind != "ident":
            raise self.error({"identifier"})
        t = self.tok
        self.i += 1
        return t.text

    def mu_name(self) -> str:
        if self.tok.kind != "mu_name":
            raise self.error({"@name"})
        t = self.tok
        self.i += 1
        return t.text[1:]

    def finish(self):
        if self.tok.kind != "eof":
            raise self.error({"end of input"})

    # formulas -------------------------------------------------------------
    def formula(self) -> Formula:
        left = self.disj()
        if self.at("->"):
            self.i += 1
            return Arrow(left, self.formula())
        return left

    def disj(self) -> Formula:
        f = self.conj()
        while self.at("|"):
            self.i += 1
            f = Or(f, self.conj())
        return f

    def conj(self) -> Formula:
        f = self.formula_atom()
        while self.at("&"):
            self.i += 1
            f = And(f, self.formula_atom())
        return f

    def formula_atom(self) -> Formula:
        t = self.tok
        if self.at("#"):
            self.i += 1
            return BOTTOM
        if self.at("("):
            self.i += 1
            f = self.formula()
            self.expect(")")
            return f
        if t.kind == "ident" and t.text[0].isupper():
            self.i += 1
            return Atom(t.text)
        raise self.error({"atom", "'#'", "'('"})

    def opt_annotation(self):
        if self.at(":"):
            self.i += 1
            return self.formula()
        return None

    # terms ----------------------------------------------------------------
    def term(self) -> Term:
        t = self.tok
        if t.kind == "ident":
            self.i += 1
            return Var(t.text)
        if self.at("\\"):
            self.i += 1
            x = self.ident()
            ann = self.opt_annotation()
            self.expect(".")
            return Lam(x, self.term(), ann)
        if self.at("mu"):
            self.i += 1
            a = self.mu_name()
            ann = self.opt_annotation()
            self.expect(".")
            return Mu(a, self.term(), ann)
        if self.at("in1") or self.at("in2"):
            self.i += 1
            index = 1 if t.text == "in1" else 2
            ann = None
            if self.at("["):
                self.i += 1
                ann = self.formula()
                self.expect("]")
            return Inj(index, self.term(), ann)
        if self.at("<"):
            self.i += 1
            left = self.term()
            self.expect(",")
            right = self.term()
            self.expect(">")
            return Pair(left, right)
        if self.at("("):
            self.i += 1
            if self.tok.kind == "mu_name":
                a = self.mu_name()
                body = self.term()
                self.expect(")")
                return Named(a, body)
            fun = self.term()
            arg = self.eterm()
            self.expect(")")
            return App(fun, arg)
        raise self.error({"identifier", "'\\'", "'mu'", "'in1'", "'in2'", "'<'", "'('"})

    def eterm(self) -> ETerm:
        if self.at("p1") or self.at("p2"):
            index = 1 if self.tok.text == "p1" else 2
            self.i += 1
            return Proj(index)
        if self.at("["):
            self.i += 1
            x1 = self.ident()
            self.expect(".")
            b1 = self.term()
            self.expect(",")
            x2 = self.ident()
            self.expect(".")
            b2 = self.term()
            self.expect("]")
            return Case(x1, b1, x2, b2)
        return self.term()


def parse_term(text: str) -> Term:
    p = _Parser(text)
    t = p.term()
    p.finish()
    return t


def parse_eterm(text: str) -> ETerm:
    p = _Parser(text)
    e = p.eterm()
    p.finish()
    return e


def parse_formula(text: str) -> Formula:
    p = _Parser(text)
    f = p.formula()
    p.finish()
    return f


# ---------------------------------------------------------------------------
# printing


def _ann(f: Formula) -> str:
    s = print_formula(f)
    return s if isinstance(f, Atom) or s == "#" else f"({s})"


def print_term(t, with_annotations: bool = False) -> str:
    out: list[str] = []
    _emit(t, with_annotations, out)
    return "".join(out)


def print_eterm(e, with_annotations: bool = False) -> str:
    return print_term(e, with_annotations)


def _emit(t, annot: bool, out: list) -> None:
    if isinstance(t, Var):
        out.append(t.name)
    elif isinstance(t, Lam):
        out.append(f"\\{t.var}")
        if annot and t.ann is not None:
            out.append(":" + _ann(t.ann))
        out.append(".")
        _emit(t.body, annot, out)
    elif isinstance(t, Mu):
        out.append(f"mu @{t.name}")
        if annot and t.ann is not None:
            out.append(":" + _ann(t.ann))
        out.append(".")
        _emit(t.body, annot, out)
    elif isinstance(t, Named):
        out.append(f"(@{t.name} ")
        _emit(t.body, annot, out)
        out.append(")")
    elif isinstance(t, App):
        out.append("(")
        _emit(t.fun, annot, out)
        out.append(" ")
        _emit(t.arg, annot, out)
        out.append(")")
    elif isinstance(t, Pair):
        out.append("<")
        _emit(t.left, annot, out)
        out.append(",")
        _emit(t.right, annot, out)
        out.append(">")
    elif isinstance(t, Inj):
        out.append(f"in{t.index}")
        if annot and t.ann is not None:
            out.append(f"[{print_formula(t.ann)}]")
        out.append(" ")
        _emit(t.body, annot, out)
    elif isinstance(t, Proj):
        out.append(f"p{t.index}")
    elif isinstance(t, Case):
        out.append(f"[{t.var1}.")
        _emit(t.branch1, annot, out)
        out.append(f", {t.var2}.")
        _emit(t.branch2, annot, out)
        out.append("]")
    else:
        raise TypeError(f"not a term: {t!r}")
