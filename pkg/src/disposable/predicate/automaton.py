"""Multi-track base-2 automata (msd-first) representing relations on naturals.

A letter is an integer whose bit ``t`` is the digit on track ``t``.  Every
automaton is deterministic and complete, and accepts a tuple exactly when it
accepts any zero-padded representation of it.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

DEFAULT_STATE_LIMIT = 1_000_000


class StateLimitExceeded(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class TrackAutomaton:
    tracks: tuple[str, ...]
    delta: np.ndarray  # (states, 2 ** len(tracks)) int64
    finals: np.ndarray  # (states,) bool
    initial: int = 0

    def __post_init__(self):
        if self.delta.shape[1] != 1 << len(self.tracks):
            raise ValueError("alphabet size must be 2 ** track count")
        if len(set(self.tracks)) != len(self.tracks):
            raise ValueError(f"duplicate track names in {self.tracks}")

    @property
    def state_count(self) -> int:
        return self.delta.shape[0]

    @property
    def arity(self) -> int:
        return len(self.tracks)

    def accepts(self, *values: int) -> bool:
        if len(values) != self.arity:
            raise ValueError(f"expected {self.arity} values")
        q = self.initial
        for letter in encode(values):
            q = self.delta[q, letter]
        return bool(self.finals[q])

    def __repr__(self) -> str:
        return f"TrackAutomaton(tracks={self.tracks}, states={self.state_count}, finals={int(self.finals.sum())})"


def encode(values: Sequence[int]) -> list[int]:
    """msd-first letters for a tuple, padded to the longest representation."""
    width = max((int(v).bit_length() for v in values), default=0)
    letters = []
    for b in range(width - 1, -1, -1):
        letter = 0
        for t, v in enumerate(values):
            letter |= ((int(v) >> b) & 1) << t
        letters.append(letter)
    return letters


def from_table(tracks: Sequence[str], delta, finals, initial: int = 0) -> TrackAutomaton:
    return TrackAutomaton(tuple(tracks), np.asarray(delta, dtype=np.int64).reshape(len(finals), -1),
                          np.asarray(finals, dtype=bool), initial)


def constant(tracks: Sequence[str], value: bool) -> TrackAutomaton:
    return from_table(tracks, np.zeros((1, 1 << len(tracks))), [value])


# ---------------------------------------------------------------- minimization

def reachable(a: TrackAutomaton) -> np.ndarray:
    seen = np.zeros(a.state_count, dtype=bool)
    seen[a.initial] = True
    frontier = np.array([a.initial])
    while frontier.size:
        nxt = np.unique(a.delta[frontier])
        nxt = nxt[~seen[nxt]]
        seen[nxt] = True
        frontier = nxt
    return seen


def coreachable(a: TrackAutomaton) -> np.ndarray:
    alive = a.finals.copy()
    while True:
        grown = alive | alive[a.delta].any(axis=1)
        if (grown == alive).all():
            return alive
        alive = grown


def minimize(a: TrackAutomaton) -> TrackAutomaton:
    """Minimal complete DFA, states numbered breadth-first from the initial state."""
    keep = np.flatnonzero(reachable(a))
    remap = np.full(a.state_count, -1, dtype=np.int64)
    remap[keep] = np.arange(keep.size)
    delta = remap[a.delta[keep]]
    finals = a.finals[keep]
    initial = int(remap[a.initial])

    block = finals.astype(np.int64)
    count = len(np.unique(block))
    while True:
        sig = np.concatenate([block[:, None], block[delta]], axis=1)
        _, new_block = np.unique(sig, axis=0, return_inverse=True)
        new_block = new_block.ravel()
        new_count = int(new_block.max()) + 1
        block = new_block
        if new_count == count:
            break
        count = new_count

    # canonical numbering by BFS over blocks
    order = np.full(count, -1, dtype=np.int64)
    rep = np.zeros(count, dtype=np.int64)
    _, first_member = np.unique(block, return_index=True)
    order[block[initial]] = 0
    rep[0] = initial
    n = 1
    head = 0
    while head < n:
        q = rep[head]
        head += 1
        for b in block[delta[q]]:
            if order[b] < 0:
                order[b] = n
                rep[n] = first_member[b]
                n += 1
    new_delta = order[block[delta[rep[:n]]]]
    return TrackAutomaton(a.tracks, new_delta, finals[rep[:n]], 0)


# ---------------------------------------------------------------- products

def _letter_projection(src: Sequence[str], dst: Sequence[str]) -> np.ndarray:
    """For each letter over ``dst`` tracks, the letter over ``src`` tracks it restricts to."""
    letters = np.arange(1 << len(dst), dtype=np.int64)
    out = np.zeros_like(letters)
    for t, name in enumerate(src):
        out |= ((letters >> dst.index(name)) & 1) << t
    return out


def product(a: TrackAutomaton, b: TrackAutomaton, op: Callable[[np.ndarray, np.ndarray], np.ndarray],
            state_limit: int = DEFAULT_STATE_LIMIT) -> TrackAutomaton:
    """Reachable product automaton over the union of tracks with finals ``op(fa, fb)``."""
    tracks = list(a.tracks) + [t for t in b.tracks if t not in a.tracks]
    pa = _letter_projection(a.tracks, tracks)
    pb = _letter_projection(b.tracks, tracks)
    da = a.delta[:, pa]
    db = b.delta[:, pb]
    nb = b.state_count
    total = a.state_count * nb
    dense = total <= 50_000_000
    ids = np.full(total, -1, dtype=np.int64) if dense else {}

    start = a.initial * nb + b.initial
    codes = [start]
    if dense:
        ids[start] = 0
    else:
        ids[start] = 0
    rows = []
    frontier = np.array([start], dtype=np.int64)
    while frontier.size:
        qa, qb = np.divmod(frontier, nb)
        nxt = da[qa] * nb + db[qb]  # (F, L)
        if dense:
            uniq = np.unique(nxt)
            fresh = uniq[ids[uniq] < 0]
            ids[fresh] = np.arange(len(codes), len(codes) + fresh.size)
            codes.extend(fresh.tolist())
            rows.append(ids[nxt])
        else:
            fresh_list = []
            for c in np.unique(nxt).tolist():
                if c not in ids:
                    ids[c] = len(codes)
                    codes.append(c)
                    fresh_list.append(c)
            fresh = np.array(fresh_list, dtype=np.int64)
            rows.append(np.vectorize(ids.__getitem__, otypes=[np.int64])(nxt))
        if len(codes) > state_limit:
            raise StateLimitExceeded(f"product exceeded {state_limit} states")
        frontier = fresh
    delta = np.concatenate(rows, axis=0)
    codes_arr = np.array(codes, dtype=np.int64)
    qa, qb = np.divmod(codes_arr, nb)
    finals = op(a.finals[qa], b.finals[qb])
    return minimize(TrackAutomaton(tuple(tracks), delta, np.asarray(finals, dtype=bool), 0))


def conjoin(a, b, **kw):
    return product(a, b, np.logical_and, **kw)


def disjoin(a, b, **kw):
    return product(a, b, np.logical_or, **kw)


def implies(a, b, **kw):
    return product(a, b, lambda x, y: ~x | y, **kw)


def iff(a, b, **kw):
    return product(a, b, lambda x, y: x == y, **kw)


def complement(a: TrackAutomaton) -> TrackAutomaton:
    return TrackAutomaton(a.tracks, a.delta, ~a.finals, a.initial)


# ---------------------------------------------------------------- projection

def project(a: TrackAutomaton, track: str, state_limit: int = DEFAULT_STATE_LIMIT) -> TrackAutomaton:
    """Existentially quantify ``track``: subset construction, then minimization.

    The start set is closed under the all-zero letter of the remaining tracks,
    so witnesses longer than the other components are still found.
    """
    t = a.tracks.index(track)
    rest = tuple(x for x in a.tracks if x != track)
    k = len(rest)
    low = (1 << t) - 1
    letters = np.arange(1 << k, dtype=np.int64)
    base = (letters & low) | ((letters & ~low) << 1)
    with0 = base
    with1 = base | (1 << t)
    # successor bitmasks per (state, reduced letter)
    d0 = a.delta[:, with0]
    d1 = a.delta[:, with1]
    succ = [[(1 << int(x)) | (1 << int(y)) for x, y in zip(r0, r1)] for r0, r1 in zip(d0.tolist(), d1.tolist())]
    finals = a.finals

    start = 1 << a.initial
    frontier = [a.initial]
    while frontier:
        grown = start
        for q in frontier:
            grown |= succ[q][0]
        new = grown & ~start
        start = grown
        frontier = _members(new)

    index = {start: 0}
    subsets = [start]
    members_of = [_members(start)]
    delta_rows = []
    nletters = 1 << k
    head = 0
    while head < len(subsets):
        mem = members_of[head]
        head += 1
        row = []
        rows = [succ[q] for q in mem]
        for letter in range(nletters):
            acc = 0
            for r in rows:
                acc |= r[letter]
            j = index.get(acc)
            if j is None:
                j = len(subsets)
                index[acc] = j
                subsets.append(acc)
                members_of.append(_members(acc))
                if j >= state_limit:
                    raise StateLimitExceeded(f"determinization exceeded {state_limit} states")
            row.append(j)
        delta_rows.append(row)
    fin_mask = 0
    for q in np.flatnonzero(finals).tolist():
        fin_mask |= 1 << q
    new_finals = np.array([bool(s & fin_mask) for s in subsets])
    out = TrackAutomaton(rest, np.array(delta_rows, dtype=np.int64).reshape(len(subsets), nletters), new_finals, 0)
    return minimize(out)


def _members(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def rename(a: TrackAutomaton, mapping: dict[str, str]) -> TrackAutomaton:
    """Rename tracks; names mapped to the same target are identified (digits forced equal)."""
    targets = [mapping.get(t, t) for t in a.tracks]
    new_tracks = tuple(dict.fromkeys(targets))
    letters = np.arange(1 << len(new_tracks), dtype=np.int64)
    old = np.zeros_like(letters)
    for t, name in enumerate(targets):
        old |= ((letters >> new_tracks.index(name)) & 1) << t
    out = TrackAutomaton(new_tracks, a.delta[:, old], a.finals, a.initial)
    return minimize(out) if len(new_tracks) < len(targets) else out


def reorder(a: TrackAutomaton, tracks: Sequence[str]) -> TrackAutomaton:
    tracks = tuple(tracks)
    if sorted(tracks) != sorted(a.tracks):
        raise ValueError(f"{tracks} is not a permutation of {a.tracks}")
    return TrackAutomaton(tracks, a.delta[:, _letter_projection(a.tracks, tracks)], a.finals, a.initial)


def extend_tracks(a: TrackAutomaton, tracks: Sequence[str]) -> TrackAutomaton:
    """Same relation viewed over a superset of tracks (new tracks unconstrained)."""
    tracks = tuple(tracks)
    return TrackAutomaton(tracks, a.delta[:, _letter_projection(a.tracks, tracks)], a.finals, a.initial)


# ---------------------------------------------------------------- base relations

def equal(x: str, y: str) -> TrackAutomaton:
    # letters: bit0 = x, bit1 = y; state 1 is dead
    return from_table((x, y), [[0, 1, 1, 0], [1, 1, 1, 1]], [True, False])


def less(x: str, y: str, or_equal: bool = False) -> TrackAutomaton:
    # states: 0 undecided (equal so far), 1 x<y, 2 x>y
    delta = [[0, 2, 1, 0], [1, 1, 1, 1], [2, 2, 2, 2]]
    return from_table((x, y), delta, [or_equal, True, False])


def addition(x: str, y: str, z: str) -> TrackAutomaton:
    """``x + y = z`` read msd-first.

    State ``c`` is the carry the unread low-order digits must deliver into the
    digits read so far; it is determined by each letter, so the automaton is
    deterministic.  State 2 is dead.
    """
    delta = np.full((3, 8), 2, dtype=np.int64)
    for c in (0, 1):
        for letter in range(8):
            a, b, s = letter & 1, (letter >> 1) & 1, (letter >> 2) & 1
            cin = s + 2 * c - a - b
            if cin in (0, 1):
                delta[c, letter] = cin
    return from_table((x, y, z), delta, [True, False, False])


def equals_constant(x: str, value: int) -> TrackAutomaton:
    digits = [int(ch) for ch in format(value, "b")] if value else []
    m = len(digits)
    dead = m + 1
    delta = np.full((m + 2, 2), dead, dtype=np.int64)
    delta[0, 0] = 0  # leading zeros
    if m:
        delta[0, 1] = 1  # first digit of a positive constant is 1
    for i in range(1, m):
        delta[i, digits[i]] = i + 1
    finals = np.zeros(m + 2, dtype=bool)
    finals[m] = True
    return from_table((x,), delta, finals)


_OPS = {
    "=": np.equal, "!=": np.not_equal, "<": np.less, "<=": np.less_equal,
    ">": np.greater, ">=": np.greater_equal,
}


def sequence_compare(dfao_delta: np.ndarray, outputs: Sequence[int], initial: int,
                     x: str, y: str, op: str) -> TrackAutomaton:
    """Relation ``S[x] op S[y]`` for a padding-invariant msd DFAO generating ``S``."""
    k = dfao_delta.shape[0]
    pairs = np.arange(k * k)
    p, q = np.divmod(pairs, k)
    delta = np.empty((k * k, 4), dtype=np.int64)
    for letter in range(4):
        dx, dy = letter & 1, (letter >> 1) & 1
        delta[:, letter] = dfao_delta[p, dx] * k + dfao_delta[q, dy]
    out = np.asarray(outputs)
    finals = _OPS[op](out[p], out[q])
    return minimize(TrackAutomaton((x, y), delta, finals, initial * k + initial))


def sequence_compare_constant(dfao_delta: np.ndarray, outputs: Sequence[int], initial: int,
                              x: str, op: str, value: int) -> TrackAutomaton:
    finals = _OPS[op](np.asarray(outputs), value)
    return minimize(TrackAutomaton((x,), np.asarray(dfao_delta, dtype=np.int64), finals, initial))


# ---------------------------------------------------------------- enumeration

def accepted_values(a: TrackAutomaton, bound: int) -> list[tuple[int, ...]]:
    """Every accepted tuple with all components <= ``bound``, sorted."""
    if a.arity == 0:
        return [()] if a.finals[a.initial] else []
    width = max(int(bound).bit_length(), 1)
    if a.arity == 1:
        ns = np.arange(bound + 1, dtype=np.int64)
        state = np.full(ns.shape, a.initial, dtype=np.int64)
        for b in range(width - 1, -1, -1):
            state = a.delta[state, (ns >> b) & 1]
        return [(int(n),) for n in ns[a.finals[state]]]

    # states that can reach a final state in exactly r more steps
    can = [a.finals.copy()]
    for _ in range(width):
        can.append(can[-1][a.delta].any(axis=1))
    bound_bits = [(bound >> b) & 1 for b in range(width - 1, -1, -1)]
    k = a.arity
    out: list[tuple[int, ...]] = []

    def walk(q, depth, values, tight):
        if not can[width - depth][q]:
            return
        if depth == width:
            out.append(tuple(values))
            return
        bb = bound_bits[depth]
        for letter in range(1 << k):
            new_tight = list(tight)
            ok = True
            for t in range(k):
                d = (letter >> t) & 1
                if tight[t]:
                    if d > bb:
                        ok = False
                        break
                    new_tight[t] = d == bb
            if not ok:
                continue
            walk(a.delta[q, letter], depth + 1,
                 [2 * v + ((letter >> t) & 1) for t, v in enumerate(values)], new_tight)

    walk(a.initial, 0, [0] * k, [True] * k)
    return sorted(out)


def accepted_set_if_finite(a: TrackAutomaton) -> set[int] | None:
    """The full accepted set of a one-track automaton, or ``None`` when it is infinite.

    Only canonical representations (leading digit 1) are followed, so
    leading-zero loops at the start do not count as infinitude.
    """
    if a.arity != 1:
        raise ValueError("single-track automaton required")
    alive = coreachable(a)
    result = {0} if a.finals[a.initial] else set()
    first = int(a.delta[a.initial, 1])
    if not alive[first]:
        return result
    # depth-first search for cycles among live states reachable from `first`
    color = {}

    def visit(q, value):
        color[q] = 1
        if a.finals[q]:
            result.add(value)
        for d in (0, 1):
            r = int(a.delta[q, d])
            if not alive[r]:
                continue
            if color.get(r) == 1:
                raise _Cycle
            visit(r, 2 * value + d)
        color[q] = 0

    try:
        visit(first, 1)
    except _Cycle:
        return None
    return result


class _Cycle(Exception):
    pass
