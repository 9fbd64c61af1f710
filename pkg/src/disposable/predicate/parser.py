"""Recursive-descent parser for Walnut-flavoured first-order formulas.

Grammar, loosest binding first::

    formula  := ('A' | 'E') vars formula | iff
    iff      := implies ('<=>' implies)*
    implies  := or ('=>' implies)?
    or       := and ('|' and)*
    and      := unary ('&' unary)*
    unary    := '~' unary | quantified | '(' formula ')' | call | chain
    chain    := term (cmp term)+
    term     := product ('+' product)*
    product  := NUM '*' atom | atom
    atom     := VAR | NUM | SEQ '[' term ']' | '(' term ')'

A quantifier extends as far right as possible.  ``c*t`` is expanded to
``t + ... + t`` while parsing.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union


class FormulaSyntaxError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


# ---------------------------------------------------------------- terms

@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Const:
    value: int


@dataclass(frozen=True)
class Add:
    left: "Term"
    right: "Term"


@dataclass(frozen=True)
class SeqRef:
    sequence: str
    index: "Term"


Term = Union[Var, Const, Add, SeqRef]


# ---------------------------------------------------------------- formulas

@dataclass(frozen=True)
class Compare:
    op: str
    left: Term
    right: Term


@dataclass(frozen=True)
class Call:
    name: str
    args: tuple[Term, ...]


@dataclass(frozen=True)
class Not:
    body: "Formula"


@dataclass(frozen=True)
class BinOp:
    op: str  # '&', '|', '=>', '<=>'
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Quant:
    kind: str  # 'A' or 'E'
    names: tuple[str, ...]
    body: "Formula"


Formula = Union[Compare, Call, Not, BinOp, Quant]


# ---------------------------------------------------------------- lexer

_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<op><=>|=>|<=|>=|!=|[<>=&|~+*()\[\],$?])
  | (?P<num>\d+)
  | (?P<quant>[AE])(?=[a-z_\s,(]|$)
  | (?P<seq>[A-Z][A-Za-z0-9_]*)
  | (?P<name>[a-z_][A-Za-z0-9_]*)
""", re.VERBOSE)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    pos: int


def tokenize(text: str) -> list[Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise FormulaSyntaxError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        if kind != "ws":
            tokens.append(Token(kind, m.group(), pos))
        pos = m.end()
    tokens.append(Token("end", "", len(text)))
    return tokens


COMPARISONS = ("=", "!=", "<", "<=", ">", ">=")


@dataclass
class ParsedFormula:
    formula: Formula
    base: str = "msd_2"

    @property
    def free(self) -> frozenset[str]:
        return free_variables(self.formula)


class _Parser:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.i = 0

    # helpers
    def peek(self, offset: int = 0) -> Token:
        return self.tokens[min(self.i + offset, len(self.tokens) - 1)]

    def take(self, text: str | None = None, kind: str | None = None) -> Token:
        tok = self.peek()
        if (text is not None and tok.text != text) or (kind is not None and tok.kind != kind):
            want = text or kind
            raise FormulaSyntaxError(f"expected {want!r}, found {tok.text or 'end of input'!r}", tok.pos)
        self.i += 1
        return tok

    def at(self, text: str) -> bool:
        return self.peek().text == text and self.peek().kind == "op"

    # formulas
    def formula(self) -> Formula:
        if self.peek().kind == "quant":
            kind = self.take(kind="quant").text
            names = [self.take(kind="name").text]
            while self.at(","):
                self.take(",")
                names.append(self.take(kind="name").text)
            return Quant(kind, tuple(names), self.formula())
        return self.iff()

    def iff(self) -> Formula:
        left = self.implies()
        while self.at("<=>"):
            self.take("<=>")
            left = BinOp("<=>", left, self.implies())
        return left

    def implies(self) -> Formula:
        left = self.disjunction()
        if self.at("=>"):
            self.take("=>")
            return BinOp("=>", left, self.implies_or_quant())
        return left

    def implies_or_quant(self) -> Formula:
        return self.formula() if self.peek().kind == "quant" else self.implies()

    def disjunction(self) -> Formula:
        left = self.conjunction()
        while self.at("|"):
            self.take("|")
            left = BinOp("|", left, self.operand())
        return left

    def conjunction(self) -> Formula:
        left = self.unary()
        while self.at("&"):
            self.take("&")
            left = BinOp("&", left, self.unary_or_quant())
        return left

    def operand(self) -> Formula:
        return self.formula() if self.peek().kind == "quant" else self.conjunction()

    def unary_or_quant(self) -> Formula:
        return self.formula() if self.peek().kind == "quant" else self.unary()

    def unary(self) -> Formula:
        tok = self.peek()
        if tok.kind == "quant":
            return self.formula()
        if self.at("~"):
            self.take("~")
            return Not(self.unary())
        if self.at("$"):
            return self.call()
        if self.at("("):
            # either a parenthesized formula or a comparison starting with '(' term
            save = self.i
            try:
                return self.chain()
            except FormulaSyntaxError:
                self.i = save
            self.take("(")
            inner = self.formula()
            self.take(")")
            return inner
        return self.chain()

    def call(self) -> Formula:
        self.take("$")
        name = self.take(kind="name").text
        self.take("(")
        args = [self.term()]
        while self.at(","):
            self.take(",")
            args.append(self.term())
        self.take(")")
        return Call(name, tuple(args))

    def chain(self) -> Formula:
        terms = [self.term()]
        ops = []
        while self.peek().kind == "op" and self.peek().text in COMPARISONS:
            ops.append(self.take().text)
            terms.append(self.term())
        if not ops:
            tok = self.peek()
            raise FormulaSyntaxError("expected a comparison", tok.pos)
        result: Formula = Compare(ops[0], terms[0], terms[1])
        for k in range(1, len(ops)):
            result = BinOp("&", result, Compare(ops[k], terms[k], terms[k + 1]))
        return result

    # terms
    def term(self) -> Term:
        left = self.product()
        while self.at("+"):
            self.take("+")
            left = Add(left, self.product())
        return left

    def product(self) -> Term:
        tok = self.peek()
        if tok.kind == "num" and self.peek(1).text == "*":
            factor = int(self.take().text)
            self.take("*")
            inner = self.atom()
            if factor == 0:
                return Const(0)
            result = inner
            for _ in range(factor - 1):
                result = Add(result, inner)
            return result
        return self.atom()

    def atom(self) -> Term:
        tok = self.peek()
        if tok.kind == "num":
            self.take()
            return Const(int(tok.text))
        if tok.kind == "name":
            self.take()
            return Var(tok.text)
        if tok.kind == "seq":
            self.take()
            self.take("[")
            index = self.term()
            self.take("]")
            return SeqRef(tok.text, index)
        if self.at("("):
            self.take("(")
            inner = self.term()
            self.take(")")
            return inner
        raise FormulaSyntaxError(f"expected a term, found {tok.text or 'end of input'!r}", tok.pos)


def parse_formula(text: str) -> ParsedFormula:
    """Parse a formula, accepting an optional leading ``?msd_2`` base marker."""
    p = _Parser(text)
    base = "msd_2"
    if p.at("?"):
        p.take("?")
        base = p.take(kind="name").text
        if base != "msd_2":
            raise FormulaSyntaxError(f"unsupported numeration system {base!r}", p.peek().pos)
    f = p.formula()
    tok = p.peek()
    if tok.kind != "end":
        raise FormulaSyntaxError(f"unexpected {tok.text!r}", tok.pos)
    return ParsedFormula(f, base)


# ---------------------------------------------------------------- analysis

def term_variables(t: Term) -> frozenset[str]:
    if isinstance(t, Var):
        return frozenset([t.name])
    if isinstance(t, Add):
        return term_variables(t.left) | term_variables(t.right)
    if isinstance(t, SeqRef):
        return term_variables(t.index)
    return frozenset()


def free_variables(f: Formula) -> frozenset[str]:
    if isinstance(f, Compare):
        return term_variables(f.left) | term_variables(f.right)
    if isinstance(f, Call):
        return frozenset().union(*(term_variables(a) for a in f.args))
    if isinstance(f, Not):
        return free_variables(f.body)
    if isinstance(f, BinOp):
        return free_variables(f.left) | free_variables(f.right)
    if isinstance(f, Quant):
        return free_variables(f.body) - set(f.names)
    raise TypeError(f)


def bound_variables(f: Formula) -> frozenset[str]:
    if isinstance(f, Not):
        return bound_variables(f.body)
    if isinstance(f, BinOp):
        return bound_variables(f.left) | bound_variables(f.right)
    if isinstance(f, Quant):
        return frozenset(f.names) | bound_variables(f.body)
    return frozenset()
