"""Base-2 automata with output: evaluation, the vtm and Thue-Morse generators, minimization."""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Dfao:
    """Deterministic finite automaton with output over the digits {0, 1}.

    ``transitions[q] = (next on 0, next on 1)``; ``outputs[q]`` is the letter
    emitted when a representation ends in ``q``.  ``order`` is ``"msd"`` or
    ``"lsd"``.
    """

    transitions: tuple[tuple[int, int], ...]
    outputs: tuple[int, ...]
    initial: int = 0
    order: str = "msd"

    def __post_init__(self):
        k = len(self.transitions)
        if len(self.outputs) != k:
            raise ValueError("one output per state")
        if not 0 <= self.initial < k:
            raise ValueError("initial state out of range")
        if self.order not in ("msd", "lsd"):
            raise ValueError("order must be msd or lsd")
        for row in self.transitions:
            if len(row) != 2 or not all(0 <= q < k for q in row):
                raise ValueError("transition table must be total on {0, 1}")

    @property
    def state_count(self) -> int:
        return len(self.transitions)

    def delta_array(self) -> np.ndarray:
        return np.array(self.transitions, dtype=np.int64).reshape(-1, 2)

    def run(self, digits: str) -> int:
        """State reached after reading ``digits`` in the automaton's own order."""
        q = self.initial
        for d in digits:
            q = self.transitions[q][int(d)]
        return q

    def __call__(self, n: int) -> int:
        return eval_dfao(self, n)


def msd2(n: int) -> str:
    """Base-2 digits, most significant first, with ``msd2(0) == ""``."""
    if n < 0:
        raise ValueError("natural numbers only")
    return format(n, "b") if n else ""


def eval_dfao(d: Dfao, n: int) -> int:
    digits = msd2(n)
    if d.order == "lsd":
        digits = digits[::-1]
    return d.outputs[d.run(digits)]


def eval_many(d: Dfao, ns: np.ndarray) -> np.ndarray:
    """Vectorized ``eval_dfao`` on canonical (unpadded) representations."""
    ns = np.asarray(ns, dtype=np.int64)
    delta = d.delta_array()
    out = np.asarray(d.outputs, dtype=np.int64)
    state = np.full(ns.shape, d.initial, dtype=np.int64)
    if ns.size == 0:
        return out[state]
    bits = max(int(ns.max()).bit_length(), 1)
    if d.order == "msd":
        started = np.zeros(ns.shape, dtype=bool)
        for b in range(bits - 1, -1, -1):
            digit = (ns >> b) & 1
            started |= digit.astype(bool)
            state = np.where(started, delta[state, digit], state)
    else:
        for b in range(bits):
            live = (ns >> b) > 0
            digit = (ns >> b) & 1
            state = np.where(live, delta[state, digit], state)
    return out[state]


def minimize_dfao(d: Dfao) -> Dfao:
    """Merge output-equivalent states (Moore refinement) and drop unreachable ones.

    States are renumbered in breadth-first order from the initial state, so
    equivalent automata minimize to identical values.
    """
    delta = d.delta_array()
    reach = [d.initial]
    seen = {d.initial}
    for q in reach:
        for r in d.transitions[q]:
            if r not in seen:
                seen.add(r)
                reach.append(r)
    states = np.array(sorted(seen))
    outputs = np.asarray(d.outputs)
    _, block = np.unique(outputs, return_inverse=True)
    while True:
        sig = np.stack([block, block[delta[:, 0]], block[delta[:, 1]]], axis=1)
        sub = sig[states]
        _, new_sub = np.unique(sub, axis=0, return_inverse=True)
        new_block = block.copy()
        new_block[states] = new_sub.ravel()
        if len(np.unique(new_sub)) == len(np.unique(block[states])):
            block = new_block
            break
        block = new_block
    order: dict[int, int] = {}
    rep: list[int] = []
    queue = [d.initial]
    order[int(block[d.initial])] = 0
    rep.append(d.initial)
    for q in queue:
        for r in d.transitions[q]:
            b = int(block[r])
            if b not in order:
                order[b] = len(rep)
                rep.append(r)
                queue.append(r)
    transitions = tuple((order[int(block[d.transitions[q][0]])], order[int(block[d.transitions[q][1]])]) for q in rep)
    return Dfao(transitions, tuple(int(d.outputs[q]) for q in rep), 0, d.order)


def thue_morse_dfao() -> Dfao:
    return Dfao(((0, 1), (1, 0)), (0, 1), 0, "msd")


# pair (t(n), t(n+1)) of Thue-Morse values -> vtm[n]
VTM_PAIR_MAP = {(0, 1): 0, (1, 1): 1, (1, 0): 2, (0, 0): 1}


def vtm_product_dfao() -> Dfao:
    """Unminimized msd automaton tracking ``(t(n), t(n+1))``.

    Reading a digit 0 makes ``n + 1`` end in that digit flipped, so
    ``t(n+1) = t(n) + 1``; reading a 1 extends the trailing carry run and
    leaves ``t(n+1)`` as it was.
    """
    pairs = [(a, b) for a in (0, 1) for b in (0, 1)]
    index = {p: i for i, p in enumerate(pairs)}
    transitions = []
    for a, b in pairs:
        on0 = (a, 1 - a)
        on1 = (1 - a, b)
        transitions.append((index[on0], index[on1]))
    outputs = tuple(VTM_PAIR_MAP[p] for p in pairs)
    return Dfao(tuple(transitions), outputs, index[(0, 1)], "msd")


def vtm_dfao() -> Dfao:
    return minimize_dfao(vtm_product_dfao())


def reverse_to_lsd(d: Dfao) -> Dfao:
    """Equivalent lsd-first automaton (subset construction on the reversal).

    Requires ``d`` to be msd-padding-invariant, as all automata here are.
    """
    if d.order != "msd":
        raise ValueError("expected an msd automaton")
    k = d.state_count
    # a reversed-run state is the vector of final states reached from every start
    start = tuple(range(k))
    seen = {start: 0}
    queue = [start]
    trans = []
    for vec in queue:
        row = []
        for digit in (0, 1):
            nxt = tuple(vec[d.transitions[q][digit]] for q in range(k))
            if nxt not in seen:
                seen[nxt] = len(queue)
                queue.append(nxt)
            row.append(seen[nxt])
        trans.append(tuple(row))
    outputs = tuple(d.outputs[vec[d.initial]] for vec in queue)
    return minimize_dfao(Dfao(tuple(trans), outputs, 0, "lsd"))


# ---------------------------------------------------------------- text format

def dumps(d: Dfao) -> str:
    lines = [f"states {d.state_count}, initial {d.initial}, order {d.order}"]
    for q, (a, b) in enumerate(d.transitions):
        lines.append(f"{q} 0 -> {a}")
        lines.append(f"{q} 1 -> {b}")
    for q, out in enumerate(d.outputs):
        lines.append(f"output {q} = {out}")
    return "\n".join(lines) + "\n"


_HEADER = re.compile(r"states\s+(\d+)\s*,\s*initial\s+(\d+)\s*,\s*order\s+(msd|lsd)")
_EDGE = re.compile(r"(\d+)\s+([01])\s*->\s*(\d+)")
_OUT = re.compile(r"output\s+(\d+)\s*=\s*(\d+)")


def loads(text: str) -> Dfao:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    m = _HEADER.fullmatch(lines[0])
    if not m:
        raise ValueError(f"bad header: {lines[0]!r}")
    k, initial, order = int(m[1]), int(m[2]), m[3]
    trans = [[None, None] for _ in range(k)]
    outs = [None] * k
    for ln in lines[1:]:
        if e := _EDGE.fullmatch(ln):
            trans[int(e[1])][int(e[2])] = int(e[3])
        elif o := _OUT.fullmatch(ln):
            outs[int(o[1])] = int(o[2])
        else:
            raise ValueError(f"bad line: {ln!r}")
    if any(None in row for row in trans) or None in outs:
        raise ValueError("incomplete automaton")
    return Dfao(tuple(tuple(r) for r in trans), tuple(outs), initial, order)
