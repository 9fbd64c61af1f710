"""Brute-force disposability of positions and factors in infinite words."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .morphisms import TAU, apply, fixed_point_stream
from .words import SquareWitness, Word, WordLike, WordStream, as_array, crossing_square_at, occurrences

DISPOSABLE = "disposable_certified_to_bound"
NOT_DISPOSABLE = "not_disposable"


@dataclass(frozen=True)
class DisposabilityVerdict:
    """Outcome of deleting ``length`` letters at ``position``.

    A disposable verdict only certifies that no seam-crossing square with
    half-length up to ``bound`` appears.
    """

    position: int
    status: str
    witness: SquareWitness | None
    bound: int
    length: int = 1

    def __post_init__(self):
        if (self.status == NOT_DISPOSABLE) != (self.witness is not None):
            raise ValueError("a witness is present exactly when the position is not disposable")

    @property
    def disposable(self) -> bool:
        return self.status == DISPOSABLE

    def to_json(self) -> dict:
        return {
            "position": self.position,
            "length": self.length,
            "status": self.status,
            "witness_start": None if self.witness is None else self.witness.start,
            "witness_half": None if self.witness is None else self.witness.half,
            "bound": self.bound,
        }


@dataclass
class DisposabilityLedger:
    source: str
    records: list[DisposabilityVerdict] = field(default_factory=list)

    def certified(self) -> bool:
        return all(r.disposable for r in self.records)

    def to_json(self) -> dict:
        return {"source": self.source, "records": [r.to_json() for r in self.records]}


def vtm_stream() -> WordStream:
    return fixed_point_stream(TAU, 0)


def factor_verdict(letters: np.ndarray, start: int, length: int, bound: int) -> DisposabilityVerdict:
    """Delete ``letters[start:start+length]`` and look for seam squares up to ``bound``.

    Only a window of ``2 * bound`` letters on each side of the seam is
    copied.  A returned witness is in coordinates of the whole deleted word.
    """
    lo = max(0, start - 2 * bound)
    hi = min(letters.shape[0], start + length + 2 * bound)
    window = np.concatenate([letters[lo:start], letters[start + length:hi]])
    found = crossing_square_at(window, start - lo, bound)
    if found is None:
        return DisposabilityVerdict(start, DISPOSABLE, None, bound, length)
    witness = SquareWitness(found.start + lo, found.half)
    straddles = witness.start < start < witness.end
    if not straddles or not witness.holds_in(_deleted_view(letters, start, length, witness)):
        raise AssertionError("seam witness failed re-verification")
    return DisposabilityVerdict(start, NOT_DISPOSABLE, witness, bound, length)


def _deleted_view(letters: np.ndarray, start: int, length: int, witness: SquareWitness) -> np.ndarray:
    """Letters of the deleted word up to the end of ``witness``."""
    deleted_end = witness.end
    head = letters[:min(start, deleted_end)]
    tail = letters[start + length:start + length + max(0, deleted_end - start)]
    return np.concatenate([head, tail])


def is_disposable_position(w: WordStream | WordLike, j: int, bound: int = 64) -> DisposabilityVerdict:
    letters = _letters(w, j + 2 * bound + 1)
    return factor_verdict(letters, j, 1, bound)


def _letters(w: WordStream | WordLike, n: int) -> np.ndarray:
    if isinstance(w, WordStream):
        return w.letters(n)
    return as_array(w)


def position_verdicts(w: WordStream | WordLike, limit: int, bound: int = 64,
                      threads: int | None = None) -> list[DisposabilityVerdict]:
    """Verdicts for every position ``0..limit``."""
    letters = _letters(w, limit + 2 * bound + 1)
    if isinstance(w, WordStream) or letters.shape[0] > limit:
        positions = range(limit + 1)
    else:
        positions = range(letters.shape[0])
    if threads and threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            return list(pool.map(lambda j: factor_verdict(letters, j, 1, bound), positions))
    return [factor_verdict(letters, j, 1, bound) for j in positions]


def disposable_positions(w: WordStream | WordLike, limit: int, bound: int = 64,
                         threads: int | None = None) -> list[int]:
    """Positions ``<= limit`` whose deletion creates no seam square of half-length ``<= bound``.

    For a finite word, the last position is also checked (deleting it leaves
    a prefix); positions beyond the word are ignored.
    """
    return [v.position for v in position_verdicts(w, limit, bound, threads) if v.disposable]


@dataclass(frozen=True)
class CheckedScan:
    positions: list[int]
    bound: int
    rounds: int


def disposable_positions_against(w: WordStream, limit: int, exact: Iterable[int], bound: int = 64,
                                 max_bound: int = 4096, threads: int | None = None) -> CheckedScan:
    """Brute-force scan whose half-length bound doubles until it matches ``exact``.

    A too-small bound can only miss squares, so disagreement always means
    brute force over-reports; raising the bound is the remedy.
    """
    truth = sorted(p for p in exact if p <= limit)
    rounds = 0
    while True:
        rounds += 1
        found = disposable_positions(w, limit, bound, threads)
        if found == truth or bound >= max_bound:
            return CheckedScan(found, bound, rounds)
        bound *= 2


def first_differences(positions: Sequence[int], drop_initial: bool = False) -> list[int]:
    seq = list(positions)
    if any(b <= a for a, b in zip(seq, seq[1:])):
        raise ValueError("positions must be strictly increasing")
    if drop_initial:
        seq = seq[1:]
    return [b - a for a, b in zip(seq, seq[1:])]


# the two factor shapes whose marked letters are disposable, with their enclosing context
STRUCTURAL_PATTERNS = (
    # (factor, preimage, context, offset of factor in context, marked offsets)
    ("0201202102", "10121", "012102012021020121", 4, (2, 8)),
    ("0210201202", "12101", "101202102012021012", 4, (1, 7)),
)


class EnclosureError(AssertionError):
    pass


def theorem_positions(w: WordStream, limit: int) -> list[int]:
    """Positions ``<= limit`` covered by the structural disposability results.

    ``{0, 2}`` plus the marked letters of every occurrence of the two factors;
    each occurrence is checked to sit in its stated context, and an
    :class:`EnclosureError` is raised otherwise.
    """
    margin = 32
    letters = w.letters(limit + margin)
    out = {p for p in (0, 2) if p <= limit}
    for factor, preimage, context, offset, marks in STRUCTURAL_PATTERNS:
        assert str(apply(TAU, preimage)) == factor
        ctx = as_array(context)
        for p in occurrences(letters, factor).tolist():
            if p > limit:
                continue
            lo = p - offset
            if lo < 0 or lo + len(ctx) > letters.shape[0]:
                raise EnclosureError(f"occurrence of {factor} at {p} has no room for its context")
            if not np.array_equal(letters[lo:lo + len(ctx)], ctx):
                raise EnclosureError(f"occurrence of {factor} at {p} is not enclosed by {context}")
            out.update(p + m for m in marks if p + m <= limit)
    return sorted(out)


def prefix_disposable_lengths(w: WordStream | WordLike, bound: int) -> set[int]:
    """Lengths ``l <= bound`` with ``w[l] == w[0]``.

    Writing ``w = a p a w'`` with ``|p a| = l``, deleting ``p a`` leaves a
    suffix of ``w``, so the interior factor ``w[1:l+1]`` is disposable.
    """
    letters = _letters(w, bound + 1)
    if letters.shape[0] < 2:
        return set()
    top = min(bound, letters.shape[0] - 1)
    hits = np.flatnonzero(letters[1:top + 1] == letters[0]) + 1
    return set(hits.tolist())
