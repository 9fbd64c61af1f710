"""Finite words, memoized infinite word streams and square detection."""

from __future__ import annotations

import threading
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence, Union

import numpy as np

from . import _kernels

LETTER_DTYPE = np.int8


class Word:
    """An immutable finite word over ``{0, ..., alphabet_size - 1}``.

    Letters live in a read-only numpy array, so slicing and length queries are
    cheap and the value can be shared between threads.
    """

    __slots__ = ("_letters", "alphabet_size")

    def __init__(self, letters: Union[str, Sequence[int], np.ndarray], alphabet_size: int | None = None):
        if isinstance(letters, Word):
            arr = letters._letters
            alphabet_size = alphabet_size or letters.alphabet_size
        elif isinstance(letters, str):
            arr = np.frombuffer(letters.encode("ascii"), dtype=np.uint8).astype(LETTER_DTYPE) - ord("0")
            if arr.size and (arr.min() < 0 or arr.max() > 9):
                raise ValueError(f"not a digit string: {letters!r}")
        else:
            arr = np.asarray(letters, dtype=LETTER_DTYPE)
        if arr.ndim != 1:
            raise ValueError("a word is one-dimensional")
        if arr.flags.writeable:
            arr = arr.copy()
            arr.flags.writeable = False
        top = int(arr.max()) + 1 if arr.size else 1
        if alphabet_size is None:
            alphabet_size = max(top, 1)
        if arr.size and (int(arr.min()) < 0 or top > alphabet_size):
            raise ValueError(f"letters outside alphabet of size {alphabet_size}")
        self._letters = arr
        self.alphabet_size = alphabet_size

    @property
    def letters(self) -> np.ndarray:
        return self._letters

    def __len__(self) -> int:
        return self._letters.shape[0]

    def __getitem__(self, key):
        if isinstance(key, slice):
            return Word(self._letters[key], self.alphabet_size)
        return int(self._letters[key])

    def __iter__(self):
        return iter(self._letters.tolist())

    def __add__(self, other: "Word") -> "Word":
        other = as_word(other)
        return Word(np.concatenate([self._letters, other._letters]),
                    max(self.alphabet_size, other.alphabet_size))

    def __eq__(self, other) -> bool:
        if isinstance(other, str):
            other = Word(other)
        if not isinstance(other, Word):
            return NotImplemented
        return np.array_equal(self._letters, other._letters)

    def __hash__(self) -> int:
        return hash(self._letters.tobytes())

    def __str__(self) -> str:
        if self._letters.size and self._letters.max() > 9:
            raise ValueError("letters above 9 have no digit-string form")
        return (self._letters + ord("0")).astype(np.uint8).tobytes().decode("ascii")

    def __repr__(self) -> str:
        text = str(self)
        if len(text) > 40:
            text = text[:37] + "..."
        return f"Word({text!r}, alphabet_size={self.alphabet_size})"


WordLike = Union[Word, str, Sequence[int], np.ndarray]


def as_word(w: WordLike) -> Word:
    return w if isinstance(w, Word) else Word(w)


def as_array(w: WordLike) -> np.ndarray:
    if isinstance(w, Word):
        return w.letters
    if isinstance(w, np.ndarray):
        return w.astype(LETTER_DTYPE, copy=False)
    return Word(w).letters


@dataclass(frozen=True)
class SquareWitness:
    """An occurrence of a square: ``w[start:start+half] == w[start+half:start+2*half]``."""

    start: int
    half: int

    @property
    def end(self) -> int:
        return self.start + 2 * self.half

    def holds_in(self, w: WordLike) -> bool:
        a = as_array(w)
        if self.half < 1 or self.start < 0 or self.end > len(a):
            return False
        h = self.half
        return bool(np.array_equal(a[self.start:self.start + h], a[self.start + h:self.end]))


def _witness(pair) -> SquareWitness | None:
    start, half = int(pair[0]), int(pair[1])
    return None if start < 0 else SquareWitness(start, half)


class WordStream:
    """A lazily materialized infinite word.

    ``extend(prefix, target)`` must return an array of length at least
    ``target`` that begins with ``prefix``.  Extension is serialized by a lock;
    the materialized prefix only ever grows, so repeated reads agree.
    """

    def __init__(self, extend: Callable[[np.ndarray, int], np.ndarray], alphabet_size: int,
                 name: str = "stream", params: dict | None = None,
                 known_length_bound: int | None = None):
        self._extend = extend
        self._buf = np.zeros(0, dtype=LETTER_DTYPE)
        self._lock = threading.Lock()
        self.alphabet_size = alphabet_size
        self.name = name
        self.params = dict(params or {})
        self.known_length_bound = known_length_bound

    @property
    def materialized(self) -> int:
        return self._buf.shape[0]

    def _ensure(self, n: int) -> None:
        if n <= self._buf.shape[0]:
            return
        if self.known_length_bound is not None and n > self.known_length_bound:
            raise IndexError(f"{self.name} has only {self.known_length_bound} letters")
        with self._lock:
            if n <= self._buf.shape[0]:
                return
            # grow geometrically so repeated small requests stay cheap
            target = max(n, 2 * self._buf.shape[0], 64)
            if self.known_length_bound is not None:
                target = min(target, self.known_length_bound)
            old = self._buf
            new = np.asarray(self._extend(old, target), dtype=LETTER_DTYPE)
            if new.shape[0] < n or not np.array_equal(new[:old.shape[0]], old):
                raise RuntimeError(f"{self.name}: extension is not consistent with the memoized prefix")
            new.flags.writeable = False
            self._buf = new

    def letters(self, n: int) -> np.ndarray:
        """The first ``n`` letters as a read-only array."""
        self._ensure(n)
        return self._buf[:n]

    def prefix(self, n: int) -> Word:
        return Word(self.letters(n), self.alphabet_size)

    def __getitem__(self, key):
        if isinstance(key, slice):
            if key.stop is None:
                raise ValueError("slices of an infinite word need a stop")
            self._ensure(key.stop)
            return Word(self._buf[key], self.alphabet_size)
        self._ensure(key + 1)
        return int(self._buf[key])

    def config(self) -> dict:
        return {"generator": self.name, **self.params}

    def __repr__(self) -> str:
        return f"WordStream({self.name!r}, materialized={self.materialized})"


def stream_from_function(f: Callable[[np.ndarray], np.ndarray], alphabet_size: int,
                         name: str = "function", params: dict | None = None) -> WordStream:
    """Stream whose letter at index ``i`` is ``f(indices)[i]`` (vectorized)."""

    def extend(prefix: np.ndarray, target: int) -> np.ndarray:
        idx = np.arange(prefix.shape[0], target, dtype=np.int64)
        return np.concatenate([prefix, np.asarray(f(idx), dtype=LETTER_DTYPE)])

    return WordStream(extend, alphabet_size, name, params)


# ---------------------------------------------------------------- squares

def find_square_naive(w: WordLike, max_half: int) -> SquareWitness | None:
    """Reference scan: for each half-length, look for a run of ``half`` matches."""
    a = as_array(w)
    n = a.shape[0]
    best = None
    for h in range(1, min(max_half, n // 2) + 1):
        eq = (a[:-h] == a[h:]).astype(np.int64)
        # window sums of length h over eq
        c = np.concatenate([[0], np.cumsum(eq)])
        hits = np.flatnonzero(c[h:] - c[:-h] == h)
        if hits.size:
            s = int(hits[0])
            if best is None or s < best.start:
                best = SquareWitness(s, h)
                if s == 0:
                    break
    return best


def find_square(w: WordLike, max_half: int | None = None, accelerated: bool = True) -> SquareWitness | None:
    """Leftmost, then shortest, square with half-length at most ``max_half``.

    The accelerated path is a divide-and-conquer Main-Lorentz scan; the naive
    path checks every half-length separately.  Both return the same witness.
    """
    a = as_array(w)
    n = a.shape[0]
    if max_half is None:
        max_half = n // 2
    if max_half > n // 2 and n > 1:
        max_half = n // 2
    if n < 2 or max_half < 1:
        return None
    if not accelerated:
        return find_square_naive(a, max_half)
    return _witness(_kernels.main_lorentz_min(np.ascontiguousarray(a), max_half))


def is_squarefree(w: WordLike, max_half: int | None = None) -> bool:
    return find_square(w, max_half) is None


def crossing_square_at(w: WordLike, boundary: int, max_half: int) -> SquareWitness | None:
    """Least square whose occurrence covers both ``boundary - 1`` and ``boundary``.

    Squares entirely on one side of the seam are ignored; callers use this
    after deleting a factor from a squarefree word, where only seam-straddling
    squares can appear.
    """
    a = as_array(w)
    n = a.shape[0]
    if not 0 <= boundary <= n:
        raise ValueError(f"boundary {boundary} outside word of length {n}")
    if boundary == 0 or boundary == n or max_half < 1:
        return None
    lo = max(0, boundary - 2 * max_half)
    hi = min(n, boundary + 2 * max_half)
    return _witness(_kernels.crossing_min(np.ascontiguousarray(a), lo, boundary, hi, max_half))


def square_census(w: WordLike, max_half: int | None = None) -> set[str]:
    """All distinct square factors (as digit strings) with half-length <= ``max_half``."""
    a = as_array(w)
    n = a.shape[0]
    if max_half is None:
        max_half = n // 2
    found: set[str] = set()
    for h in range(1, min(max_half, n // 2) + 1):
        eq = (a[:-h] == a[h:]).astype(np.int64)
        c = np.concatenate([[0], np.cumsum(eq)])
        hits = np.flatnonzero(c[h:] - c[:-h] == h)
        if not hits.size:
            continue
        blocks = np.unique(a[hits[:, None] + np.arange(h)], axis=0)
        for b in blocks:
            s = str(Word(b))
            found.add(s + s)
    return found


def avoids(w: WordLike, patterns: Iterable[WordLike]) -> bool:
    """True iff no pattern occurs as a factor of ``w``."""
    a = as_array(w)
    for p in patterns:
        pa = as_array(p)
        m = pa.shape[0]
        if m == 0:
            return False
        if m > a.shape[0]:
            continue
        hit = np.ones(a.shape[0] - m + 1, dtype=bool)
        for t in range(m):
            hit &= a[t:a.shape[0] - m + 1 + t] == pa[t]
        if hit.any():
            return False
    return True


def occurrences(w: WordLike, pattern: WordLike) -> np.ndarray:
    """Start indices of every occurrence of ``pattern`` in ``w``."""
    a = as_array(w)
    pa = as_array(pattern)
    m = pa.shape[0]
    if m == 0 or m > a.shape[0]:
        return np.zeros(0, dtype=np.int64)
    hit = np.ones(a.shape[0] - m + 1, dtype=bool)
    for t in range(m):
        hit &= a[t:a.shape[0] - m + 1 + t] == pa[t]
    return np.flatnonzero(hit)


def delete_range(w: WordLike, start: int, length: int) -> Word:
    """``u v`` where ``w = u x v`` with ``|u| = start`` and ``|x| = length``."""
    word = as_word(w)
    n = len(word)
    if start < 0 or length < 0 or start + length > n:
        raise ValueError(f"cannot delete [{start}, {start + length}) from a word of length {n}")
    a = word.letters
    return Word(np.concatenate([a[:start], a[start + length:]]), word.alphabet_size)
