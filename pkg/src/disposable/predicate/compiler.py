"""Compile parsed formulas to track automata."""

from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np

from ..dfao import Dfao, thue_morse_dfao, vtm_dfao
from . import automaton as ta
from .automaton import DEFAULT_STATE_LIMIT, TrackAutomaton
from .parser import (Add, BinOp, Call, Compare, Const, Formula, Not, ParsedFormula, Quant, SeqRef, Term, Var,
                     free_variables, parse_formula)


class CompileError(ValueError):
    pass


def _check_padding_invariant(d: Dfao) -> None:
    if d.order != "msd":
        raise CompileError("sequences must be given by msd automata")
    q0 = d.initial
    q1 = d.transitions[q0][0]
    # reading a leading zero must not change any later output
    seen = {(q0, q1)}
    stack = [(q0, q1)]
    while stack:
        a, b = stack.pop()
        if d.outputs[a] != d.outputs[b]:
            raise CompileError("sequence automaton is not invariant under leading zeros")
        for digit in (0, 1):
            nxt = (d.transitions[a][digit], d.transitions[b][digit])
            if nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)


@dataclass
class PredicateEnv:
    """Named predicates (compiled automata) and named automatic sequences."""

    predicates: dict[str, TrackAutomaton] = field(default_factory=dict)
    sequences: dict[str, Dfao] = field(default_factory=dict)
    state_limit: int = DEFAULT_STATE_LIMIT

    @classmethod
    def default(cls) -> "PredicateEnv":
        return cls(sequences={"VTM": vtm_dfao(), "T": thue_morse_dfao()})

    def add_sequence(self, name: str, d: Dfao) -> None:
        _check_padding_invariant(d)
        self.sequences[name] = d

    def define(self, name: str, text: str) -> TrackAutomaton:
        """Compile ``text`` and store the result under ``name``."""
        a = compile_formula(text, self)
        self.predicates[name] = a
        return a


class _Compiler:
    def __init__(self, env: PredicateEnv):
        self.env = env
        self.fresh_count = 0
        self.cache: dict[Formula, TrackAutomaton] = {}
        self.limit = env.state_limit

    def fresh(self) -> str:
        self.fresh_count += 1
        return f"#{self.fresh_count}"

    # terms: returns (track name, constraint automaton or None)
    def term(self, t: Term):
        if isinstance(t, Var):
            return t.name, None
        if isinstance(t, Const):
            f = self.fresh()
            return f, ta.equals_constant(f, t.value)
        if isinstance(t, Add):
            lv, la = self.term(t.left)
            rv, ra = self.term(t.right)
            f = self.fresh()
            rel = ta.addition("#x", "#y", "#z")
            rel = ta.rename(rel, {"#x": lv, "#y": rv, "#z": f})
            rel = self.conj(rel, la)
            rel = self.conj(rel, ra)
            for name in {lv, rv}:
                if name.startswith("#"):
                    rel = ta.project(rel, name, self.limit)
            return f, rel
        raise CompileError(f"{t} is not an arithmetic term")

    def conj(self, a, b):
        if a is None:
            return b
        if b is None:
            return a
        return ta.conjoin(a, b, state_limit=self.limit)

    def drop(self, a: TrackAutomaton, names) -> TrackAutomaton:
        for name in names:
            if name.startswith("#") and name in a.tracks:
                a = ta.project(a, name, self.limit)
        return a

    def compare(self, f: Compare) -> TrackAutomaton:
        left, right = f.left, f.right
        if isinstance(left, SeqRef) or isinstance(right, SeqRef):
            return self.sequence_compare(f)
        lv, la = self.term(left)
        rv, ra = self.term(right)
        if lv == rv:
            holds = f.op in ("=", "<=", ">=")
            rel = ta.constant((lv,), holds)
        else:
            rel = _relation(f.op, lv, rv)
        rel = self.conj(self.conj(rel, la), ra)
        return self.drop(rel, [lv, rv])

    def sequence(self, name: str) -> Dfao:
        try:
            return self.env.sequences[name]
        except KeyError:
            raise CompileError(f"unknown sequence {name!r}") from None

    def sequence_compare(self, f: Compare) -> TrackAutomaton:
        left, right = f.left, f.right
        if isinstance(right, SeqRef) and not isinstance(left, SeqRef):
            left, right = right, left
            f = Compare(_FLIP[f.op], left, right)
        d = self.sequence(left.sequence)
        lv, la = self.term(left.index)
        if isinstance(right, Const):
            rel = ta.sequence_compare_constant(d.delta_array(), d.outputs, d.initial, lv, f.op, right.value)
            return self.drop(self.conj(rel, la), [lv])
        if not isinstance(right, SeqRef):
            raise CompileError("a sequence value can only be compared with another sequence value or a constant")
        e = self.sequence(right.sequence)
        rv, ra = self.term(right.index)
        if lv == rv:
            rel = _two_sequence_compare(d, e, "#p", "#q", f.op)
            rel = ta.rename(rel, {"#p": lv, "#q": lv})
        else:
            rel = _two_sequence_compare(d, e, lv, rv, f.op)
        rel = self.conj(self.conj(rel, la), ra)
        return self.drop(rel, [lv, rv])

    def call(self, f: Call) -> TrackAutomaton:
        try:
            pred = self.env.predicates[f.name]
        except KeyError:
            raise CompileError(f"unknown predicate ${f.name}") from None
        if len(f.args) != pred.arity:
            raise CompileError(f"${f.name} takes {pred.arity} arguments, got {len(f.args)}")
        names = []
        constraints = None
        for arg in f.args:
            v, c = self.term(arg)
            names.append(v)
            constraints = self.conj(constraints, c)
        # move stored track names out of the way before renaming onto arguments
        tmp = {t: f"#arg{k}" for k, t in enumerate(pred.tracks)}
        rel = ta.rename(ta.rename(pred, tmp), {tmp[t]: names[k] for k, t in enumerate(pred.tracks)})
        rel = self.conj(rel, constraints)
        return self.drop(rel, names)

    def compile(self, f: Formula) -> TrackAutomaton:
        hit = self.cache.get(f)
        if hit is not None:
            return hit
        if isinstance(f, Compare):
            out = self.compare(f)
        elif isinstance(f, Call):
            out = self.call(f)
        elif isinstance(f, BinOp):
            a = self.compile(f.left)
            b = self.compile(f.right)
            op = {"&": np.logical_and, "|": np.logical_or,
                  "=>": lambda x, y: ~x | y, "<=>": np.equal}[f.op]
            out = ta.product(a, b, op, state_limit=self.limit)
        elif isinstance(f, Quant):
            out = self.compile(f.body)
            universal = f.kind == "A"
            if universal:
                out = ta.complement(out)
            for name in f.names:
                if name in out.tracks:
                    out = ta.project(out, name, self.limit)
            if universal:
                out = ta.complement(out)
        elif isinstance(f, Not):
            out = ta.complement(self.compile(f.body))
        else:
            raise CompileError(f"cannot compile {f!r}")
        self.cache[f] = out
        return out


_FLIP = {"=": "=", "!=": "!=", "<": ">", ">": "<", "<=": ">=", ">=": "<="}


def _relation(op: str, x: str, y: str) -> TrackAutomaton:
    if op == "=":
        return ta.equal(x, y)
    if op == "!=":
        return ta.complement(ta.equal(x, y))
    if op == "<":
        return ta.less(x, y)
    if op == "<=":
        return ta.less(x, y, or_equal=True)
    if op == ">":
        return ta.less(y, x)
    if op == ">=":
        return ta.less(y, x, or_equal=True)
    raise CompileError(f"unknown comparison {op!r}")


def _two_sequence_compare(d: Dfao, e: Dfao, x: str, y: str, op: str) -> TrackAutomaton:
    if d is e:
        return ta.sequence_compare(d.delta_array(), d.outputs, d.initial, x, y, op)
    dd, de = d.delta_array(), e.delta_array()
    kd, ke = dd.shape[0], de.shape[0]
    pairs = np.arange(kd * ke)
    p, q = np.divmod(pairs, ke)
    delta = np.empty((kd * ke, 4), dtype=np.int64)
    for letter in range(4):
        delta[:, letter] = dd[p, letter & 1] * ke + de[q, letter >> 1]
    finals = ta._OPS[op](np.asarray(d.outputs)[p], np.asarray(e.outputs)[q])
    return ta.minimize(TrackAutomaton((x, y), delta, finals, d.initial * ke + e.initial))


def compile_formula(formula: str | ParsedFormula | Formula, env: PredicateEnv | None = None) -> TrackAutomaton:
    """Minimal automaton over the formula's free variables, tracks in sorted order."""
    env = env or PredicateEnv.default()
    if isinstance(formula, str):
        formula = parse_formula(formula)
    if isinstance(formula, ParsedFormula):
        formula = formula.formula
    out = _Compiler(env).compile(formula)
    free = sorted(free_variables(formula))
    missing = [v for v in free if v not in out.tracks]
    if missing:
        out = ta.extend_tracks(out, tuple(out.tracks) + tuple(missing))
    return ta.minimize(ta.reorder(out, free))


# ---------------------------------------------------------------- command files

_EVAL = re.compile(r'^\s*(?:eval|def)\s+([A-Za-z_][A-Za-z0-9_]*)\s+"(.*)"\s*;?\s*$', re.DOTALL)


def split_commands(text: str) -> list[tuple[str, str]]:
    """Parse ``eval NAME "FORMULA";`` commands; formulas may span lines."""
    commands = []
    buf = []
    for line in text.splitlines():
        stripped = line.strip()
        if not buf and (not stripped or stripped.startswith("#")):
            continue
        buf.append(line)
        joined = "\n".join(buf)
        if joined.count('"') >= 2:
            m = _EVAL.match(joined)
            if not m:
                raise ValueError(f"bad command: {joined.strip()!r}")
            commands.append((m[1], " ".join(m[2].split())))
            buf = []
    if buf:
        raise ValueError(f"unterminated command: {' '.join(buf)!r}")
    return commands


def run_commands(text: str, env: PredicateEnv | None = None) -> tuple[PredicateEnv, list[str]]:
    env = env or PredicateEnv.default()
    names = []
    for name, body in split_commands(text):
        env.define(name, body)
        names.append(name)
    return env, names
