"""An infinite squarefree word with interior disposable factors of every length >= 3312.

Pipeline: a binary word ``x`` whose only squares are 00, 11 and 0101; a word
``v`` interleaving ``x`` with a ternary squarefree ``y`` in phases of growing
block length; ``v' = h5(v)``; and ``w = g(v')`` with image lengths scheduled so
that selected blocks become deletable factors of prescribed lengths.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .disposability import DisposabilityVerdict, factor_verdict, vtm_stream
from .morphisms import G, H5, apply, apply_multivalued
from .words import LETTER_DTYPE, Word, WordStream

OCCURRENCES_PER_PHASE = 414
EXCESS_PER_LETTER = 3  # g-images are 23..26 letters long
BASE_IMAGE = 23
H5_LENGTH = 18
ALLOWED_SQUARES = ("00", "11", "0101")


class BacktrackExhausted(RuntimeError):
    pass


def fs_stream(allowed=ALLOWED_SQUARES, margin: int = 512) -> WordStream:
    """Lexicographically least binary word whose squares all lie in ``allowed``.

    Depth-first search with a fixed tie-break.  Letters are handed out only
    once the search is ``margin`` letters deeper, and the search may never
    backtrack into handed-out letters, so every request sees the same word.
    """
    flat = np.array([int(ch) for sq in allowed for ch in sq], dtype=LETTER_DTYPE)
    lens = np.array([len(sq) for sq in allowed], dtype=np.int64)
    starts = np.concatenate([[0], np.cumsum(lens)[:-1]]).astype(np.int64)
    state = {"w": np.zeros(1024, dtype=LETTER_DTYPE), "choice": np.zeros(1024, dtype=np.int64), "length": 0}

    def extend(prefix: np.ndarray, target: int) -> np.ndarray:
        goal = target + margin
        if state["w"].shape[0] < goal:
            cap = max(goal, 2 * state["w"].shape[0])
            for key, dtype in (("w", LETTER_DTYPE), ("choice", np.int64)):
                grown = np.zeros(cap, dtype=dtype)
                grown[:state["length"]] = state[key][:state["length"]]
                state[key] = grown
        length = _kernels.backtrack_extend(state["w"], state["choice"], state["length"], goal,
                                           prefix.shape[0], 2, flat, starts, lens)
        if length < 0:
            raise BacktrackExhausted(f"search backtracked below {prefix.shape[0]} letters")
        state["length"] = length
        return state["w"][:target].copy()

    return WordStream(extend, 2, name="fs", params={"allowed": list(allowed), "margin": margin})


def relabeled_vtm(offset: int = 2) -> WordStream:
    """vtm over ``{offset, offset + 1, offset + 2}``."""
    base = vtm_stream()

    def extend(prefix: np.ndarray, target: int) -> np.ndarray:
        return (base.letters(target) + offset).astype(LETTER_DTYPE)

    return WordStream(extend, offset + 3, name="vtm_relabeled", params={"offset": offset})


@dataclass(frozen=True)
class QOccurrence:
    """A factor ``a Y1 b Y2 c Y3 d`` of ``v`` with four consecutive letters of ``x``."""

    phase: int
    x_index: int
    letters: tuple[int, int, int, int]
    y_ranges: tuple[tuple[int, int], tuple[int, int], tuple[int, int]]  # [start, stop) in v

    @property
    def y2(self) -> tuple[int, int]:
        return self.y_ranges[1]

    @property
    def start(self) -> int:
        return self.y_ranges[0][0] - 1

    @property
    def stop(self) -> int:
        return self.y_ranges[2][1] + 1


def is_q_pattern(a: int, b: int, c: int, d: int) -> bool:
    return b != c and (a, b, c, d) != (0, 1, 0, 1)


@dataclass
class PhasePlan:
    """Per phase: the occurrences counted and those chosen for length scheduling."""

    counted: dict[int, list[QOccurrence]] = field(default_factory=dict)
    selected: dict[int, list[QOccurrence]] = field(default_factory=dict)

    @staticmethod
    def scheduled_count(n: int) -> int:
        return min(OCCURRENCES_PER_PHASE - 1, EXCESS_PER_LETTER * H5_LENGTH * n) + 1


@dataclass
class VConstruction:
    v: Word
    plan: PhasePlan
    occurrences: list[QOccurrence]
    x_used: int
    y_used: int
    phases: int
    # phase of the y-block following each x letter, in emission order
    block_phase: list[int]


def build_v(x: WordStream, y: WordStream, phases: int, tail: int = 8,
            per_phase: int = OCCURRENCES_PER_PHASE) -> VConstruction:
    """Interleave ``x`` and ``y``: in phase ``n`` each letter of ``x`` is followed by ``n`` letters of ``y``.

    Phase ``n`` ends as soon as ``per_phase`` windows of four consecutive
    ``x`` letters with phase-``n`` blocks form a Q(n); overlapping windows
    count.  After the last phase ``tail`` more ``x`` letters are emitted in
    the next phase's rhythm so that every counted factor has right context.
    """
    if phases < 1:
        raise ValueError("need at least one phase")
    out: list[np.ndarray] = []
    pos = 0
    xi = 0
    yi = 0
    n = 1
    count = 0
    plan = PhasePlan()
    occs: list[QOccurrence] = []
    x_letters: list[int] = []
    x_pos: list[int] = []
    block: list[int] = []
    tail_left = None
    chunk = 4096
    xbuf = x.letters(chunk)
    ybuf = y.letters(chunk)
    while tail_left is None or tail_left > 0:
        if xi >= xbuf.shape[0]:
            xbuf = x.letters(2 * xbuf.shape[0])
        a = int(xbuf[xi])
        out.append(np.array([a], dtype=LETTER_DTYPE))
        x_letters.append(a)
        x_pos.append(pos)
        pos += 1
        t = xi
        xi += 1
        if tail_left is None and t >= 3 and block[t - 3] == block[t - 2] == block[t - 1] == n:
            quad = tuple(x_letters[t - 3:t + 1])
            if is_q_pattern(*quad):
                ranges = tuple((x_pos[s] + 1, x_pos[s] + 1 + n) for s in (t - 3, t - 2, t - 1))
                occ = QOccurrence(n, t - 3, quad, ranges)
                occs.append(occ)
                plan.counted.setdefault(n, []).append(occ)
                count += 1
                if count == per_phase:
                    chosen = plan.counted[n][:PhasePlan.scheduled_count(n)]
                    if len({o.y2 for o in chosen}) != len(chosen):
                        raise AssertionError("selected occurrences share a Y2 block")
                    plan.selected[n] = chosen
                    count = 0
                    if n == phases:
                        tail_left = tail
                    n += 1
        elif tail_left is not None:
            tail_left -= 1
        if yi + n > ybuf.shape[0]:
            ybuf = y.letters(2 * ybuf.shape[0] + n)
        out.append(ybuf[yi:yi + n])
        block.append(n)
        yi += n
        pos += n
    v = Word(np.concatenate(out), 5)
    return VConstruction(v, plan, occs, xi, yi, phases, block)


@dataclass(frozen=True)
class LedgerRecord:
    phase: int
    index: int
    start: int
    length: int
    schedule_digest: str

    def to_json(self) -> dict:
        return {"n": self.phase, "i": self.index, "start": self.start, "length": self.length,
                "schedule_digest": self.schedule_digest}


@dataclass
class ConstructionLedger:
    records: list[LedgerRecord]
    # positions of v' with a non-default choice, and the excess chosen there
    schedule: dict[int, int]

    def to_json(self) -> dict:
        return {"records": [r.to_json() for r in self.records],
                "schedule": [[p, e] for p, e in sorted(self.schedule.items())]}

    @classmethod
    def from_json(cls, data: dict) -> "ConstructionLedger":
        recs = [LedgerRecord(r["n"], r["i"], r["start"], r["length"], r.get("schedule_digest", ""))
                for r in data["records"]]
        return cls(recs, {int(p): int(e) for p, e in data.get("schedule", [])})


@dataclass
class WConstruction:
    w: Word
    v_prime: Word
    ledger: ConstructionLedger


def front_loaded_excess(total: int, letters: int) -> list[int]:
    """Excesses in ``0..3`` summing to ``total``, maxed out from the left."""
    if total > EXCESS_PER_LETTER * letters:
        raise ValueError(f"cannot add {total} letters over {letters} images")
    out = []
    for _ in range(letters):
        e = min(EXCESS_PER_LETTER, total)
        out.append(e)
        total -= e
    return out


def build_w(vc: VConstruction, phases: int | None = None) -> WConstruction:
    """Apply ``h5`` then ``g`` (shortest images), lengthening scheduled ``h5(Y2)`` blocks.

    The ``i``-th selected Q(n) gets its ``h5(Y2)`` replaced by a ``g``-image
    of length ``414 n + i``.
    """
    phases = vc.phases if phases is None else phases
    v_prime = apply(H5, vc.v)
    excess = np.zeros(len(v_prime), dtype=np.int64)
    plan_records = []
    for n in range(1, phases + 1):
        for i, occ in enumerate(vc.plan.selected.get(n, [])):
            if i > EXCESS_PER_LETTER * H5_LENGTH * n:
                raise ValueError(f"index {i} cannot be scheduled in phase {n}")
            s, e = occ.y2
            lo, hi = H5_LENGTH * s, H5_LENGTH * e
            excess[lo:hi] = front_loaded_excess(i, hi - lo)
            plan_records.append((n, i, lo, hi))
    w = apply_multivalued(G, v_prime, excess)
    image_len = BASE_IMAGE + excess
    offsets = np.concatenate([[0], np.cumsum(image_len)])
    records = []
    for n, i, lo, hi in plan_records:
        start = int(offsets[lo])
        length = int(offsets[hi] - offsets[lo])
        assert length == OCCURRENCES_PER_PHASE * n + i
        digest = hashlib.sha256(excess[lo:hi].astype(np.int8).tobytes()).hexdigest()[:16]
        records.append(LedgerRecord(n, i, start, length, digest))
    schedule = {int(p): int(excess[p]) for p in np.flatnonzero(excess)}
    return WConstruction(w, v_prime, ConstructionLedger(records, schedule))


def construct(phases: int, tail: int = 8) -> tuple[VConstruction, WConstruction]:
    vc = build_v(fs_stream(), relabeled_vtm(), phases, tail)
    return vc, build_w(vc)


# ---------------------------------------------------------------- lengths

@dataclass(frozen=True)
class LengthSet:
    intervals: tuple[tuple[int, int], ...]  # inclusive

    def __contains__(self, k: int) -> bool:
        return any(lo <= k <= hi for lo, hi in self.intervals)

    def missing_below(self, limit: int) -> int:
        """How many of ``1 .. limit - 1`` are not covered."""
        covered = np.zeros(limit, dtype=bool)
        for lo, hi in self.intervals:
            if lo < limit:
                covered[lo:min(hi, limit - 1) + 1] = True
        return int((~covered[1:]).sum())

    def covers(self, lo: int, hi: int) -> bool:
        covered = np.zeros(hi + 1, dtype=bool)
        for a, b in self.intervals:
            if a <= hi:
                covered[a:min(b, hi) + 1] = True
        return bool(covered[lo:hi + 1].all())


def lengths_set(n_max: int) -> LengthSet:
    """Union over ``n <= n_max`` of ``{414 n + i : 0 <= i <= min(413, 54 n)}``."""
    if n_max < 1:
        raise ValueError("n_max must be positive")
    return LengthSet(tuple((OCCURRENCES_PER_PHASE * n, OCCURRENCES_PER_PHASE * n + PhasePlan.scheduled_count(n) - 1)
                           for n in range(1, n_max + 1)))


THRESHOLD = 3312


def missing_count(limit: int = THRESHOLD) -> int:
    return lengths_set(limit // OCCURRENCES_PER_PHASE + 1).missing_below(limit)


# ---------------------------------------------------------------- verification

def verify_ledger(w: Word | np.ndarray, ledger: ConstructionLedger | list[LedgerRecord], scan: int) -> list[DisposabilityVerdict]:
    """Delete each recorded factor and scan the seam for squares of half-length ``<= scan``."""
    letters = w.letters if isinstance(w, Word) else np.asarray(w, dtype=LETTER_DTYPE)
    records = ledger.records if isinstance(ledger, ConstructionLedger) else ledger
    out = []
    for r in records:
        if r.start <= 0 or r.start + r.length > letters.shape[0]:
            raise ValueError(f"record {r} lies outside the materialized prefix")
        out.append(factor_verdict(letters, r.start, r.length, scan))
    return out
