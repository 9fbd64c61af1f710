"""Morphisms on words, fixed points, and the concrete maps used in the constructions."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .words import LETTER_DTYPE, Word, WordLike, WordStream, as_array, as_word, find_square


def _table(images: Sequence[np.ndarray]):
    lens = np.array([len(im) for im in images], dtype=np.int64)
    starts = np.concatenate([[0], np.cumsum(lens)[:-1]]).astype(np.int64)
    flat = np.concatenate(list(images)).astype(LETTER_DTYPE) if len(images) else np.zeros(0, LETTER_DTYPE)
    return flat, starts, lens


def _apply_table(flat, starts, lens, keys: np.ndarray) -> np.ndarray:
    sizes = lens[keys]
    total = int(sizes.sum())
    if total == 0:
        return np.zeros(0, dtype=LETTER_DTYPE)
    out_starts = np.cumsum(sizes) - sizes
    idx = np.repeat(starts[keys] - out_starts, sizes) + np.arange(total, dtype=np.int64)
    return flat[idx]


@dataclass(frozen=True)
class Morphism:
    """A substitution ``letter -> word`` from ``source_size`` letters into ``target_size`` letters."""

    images: tuple[Word, ...]
    target_size: int
    name: str = ""
    _flat: np.ndarray = field(init=False, repr=False, compare=False)
    _starts: np.ndarray = field(init=False, repr=False, compare=False)
    _lens: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        for a, im in enumerate(self.images):
            if len(im) and max(im) >= self.target_size:
                raise ValueError(f"image of {a} leaves the target alphabet")
        flat, starts, lens = _table([im.letters for im in self.images])
        object.__setattr__(self, "_flat", flat)
        object.__setattr__(self, "_starts", starts)
        object.__setattr__(self, "_lens", lens)

    @classmethod
    def from_dict(cls, images: Mapping[int, WordLike], target_size: int | None = None, name: str = "") -> "Morphism":
        size = max(images) + 1
        words = tuple(Word(as_array(images[a]).copy()) if a in images else Word("") for a in range(size))
        if target_size is None:
            target_size = max([max(w) + 1 for w in words if len(w)] + [size])
        return cls(tuple(Word(w.letters, target_size) for w in words), target_size, name)

    @property
    def source_size(self) -> int:
        return len(self.images)

    @property
    def uniform_length(self) -> int | None:
        lengths = {len(im) for im in self.images}
        return lengths.pop() if len(lengths) == 1 else None

    def __call__(self, w: WordLike) -> Word:
        return apply(self, w)


@dataclass(frozen=True)
class MultiValuedMorphism:
    """A substitution ``letter -> set of words``; choices are kept in a fixed order."""

    images: tuple[tuple[Word, ...], ...]
    target_size: int
    name: str = ""

    def __post_init__(self):
        for a, choices in enumerate(self.images):
            if not choices:
                raise ValueError(f"letter {a} has no image")

    @property
    def source_size(self) -> int:
        return len(self.images)

    def choice_lengths(self, letter: int) -> list[int]:
        return [len(c) for c in self.images[letter]]


def apply(h: Morphism, w: WordLike) -> Word:
    """Concatenate the images of the letters of ``w``."""
    a = as_array(w)
    if a.size and (int(a.min()) < 0 or int(a.max()) >= h.source_size):
        raise ValueError(f"letter outside the source alphabet of {h.name or 'morphism'}")
    return Word(_apply_table(h._flat, h._starts, h._lens, a.astype(np.int64)), h.target_size)


def apply_multivalued(g: MultiValuedMorphism, w: WordLike, schedule: Sequence[int] | np.ndarray | None = None) -> Word:
    """Image of ``w`` using ``g.images[letter][schedule[i]]`` at each position ``i``.

    A missing schedule means choice 0 everywhere.
    """
    a = as_array(w).astype(np.int64)
    if schedule is None:
        sched = np.zeros(a.shape[0], dtype=np.int64)
    else:
        sched = np.asarray(schedule, dtype=np.int64)
    if sched.shape != a.shape:
        raise ValueError("schedule length must equal the word length")
    width = max(len(c) for c in g.images)
    counts = np.array([len(c) for c in g.images], dtype=np.int64)
    if a.size:
        if int(a.min()) < 0 or int(a.max()) >= g.source_size:
            raise ValueError("letter outside the source alphabet")
        if int(sched.min()) < 0 or np.any(sched >= counts[a]):
            raise ValueError("invalid choice index in schedule")
    padded = []
    for choices in g.images:
        padded.extend(c.letters for c in choices)
        padded.extend(np.zeros(0, LETTER_DTYPE) for _ in range(width - len(choices)))
    flat, starts, lens = _table(padded)
    return Word(_apply_table(flat, starts, lens, a * width + sched), g.target_size)


def fixed_point_stream(h: Morphism, seed: int) -> WordStream:
    """The infinite word ``h^omega(seed)``, materialized by iterating ``h`` on the prefix."""
    image = h.images[seed].letters if 0 <= seed < h.source_size else None
    if image is None or len(image) < 2 or int(image[0]) != seed:
        raise ValueError(f"{h.name or 'morphism'} is not prolongable on {seed}")

    def extend(prefix: np.ndarray, target: int) -> np.ndarray:
        cur = prefix if prefix.shape[0] else np.array([seed], dtype=LETTER_DTYPE)
        while cur.shape[0] < target:
            # h(prefix) extends prefix, so only the tail's image is new
            cur = apply(h, cur).letters
        return cur

    return WordStream(extend, h.target_size, name=f"fixed_point:{h.name}", params={"seed": seed})


# ---------------------------------------------------------------- builtins

TAU = Morphism.from_dict({0: "012", 1: "02", 2: "1"}, 3, name="tau")

H5 = Morphism.from_dict({
    0: "010201202101210212",
    1: "010201202102010212",
    2: "010201202120121012",
    3: "010201210201021012",
    4: "010201210212021012",
}, 3, name="h5")

_G0 = tuple(Word("012102120210" + middle + "021201210")
            for middle in ("12", "201", "2012", "20121"))


def rotate(w: WordLike, shift: int = 1, modulus: int = 3) -> Word:
    """Apply the cyclic letter permutation ``a -> a + shift (mod modulus)``."""
    return Word((as_array(w).astype(np.int64) + shift) % modulus, modulus)


G = MultiValuedMorphism(
    (_G0, tuple(rotate(c, 1) for c in _G0), tuple(rotate(c, 2) for c in _G0)),
    3,
    name="g",
)

_BUILTINS = {"tau": TAU, "h5": H5, "g": G}


def builtin(name: str) -> Morphism | MultiValuedMorphism:
    try:
        return _BUILTINS[name]
    except KeyError:
        raise ValueError(f"unknown morphism {name!r}; known: {sorted(_BUILTINS)}") from None


# ---------------------------------------------------------------- evidence

def squarefree_words(alphabet_size: int, max_length: int):
    """Yield every squarefree word of length 1..max_length, shortest first within a branch."""

    def grow(prefix):
        for a in range(alphabet_size):
            cand = prefix + (a,)
            n = len(cand)
            if any(cand[n - 2 * h:n - h] == cand[n - h:] for h in range(1, n // 2 + 1)):
                continue
            yield cand
            if n < max_length:
                yield from grow(cand)

    yield from grow(())


def bounded_squarefree_check(h: Morphism | MultiValuedMorphism, max_length: int = 5) -> bool:
    """Every image of every squarefree word of length <= ``max_length`` is squarefree.

    For multi-valued maps every combination of choices is tried.
    """
    multi = isinstance(h, MultiValuedMorphism)
    for w in squarefree_words(h.source_size, max_length):
        if multi:
            for combo in itertools.product(*(range(len(h.images[a])) for a in w)):
                if find_square(apply_multivalued(h, w, combo)) is not None:
                    return False
        elif find_square(apply(h, w)) is not None:
            return False
    return True


# ---------------------------------------------------------------- text format

def dumps(h: Morphism | MultiValuedMorphism) -> str:
    lines = []
    if isinstance(h, MultiValuedMorphism):
        for a, choices in enumerate(h.images):
            lines.append(f"{a} -> " + ",".join(str(c) for c in choices))
    else:
        for a, im in enumerate(h.images):
            lines.append(f"{a} -> {im}")
    return "\n".join(lines) + "\n"


def loads(text: str, name: str = "") -> Morphism | MultiValuedMorphism:
    images: dict[int, list[str]] = {}
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        lhs, sep, rhs = line.partition("->")
        if not sep:
            raise ValueError(f"bad morphism line: {raw!r}")
        images[int(lhs)] = [part.strip() for part in rhs.split(",")]
    if sorted(images) != list(range(len(images))):
        raise ValueError("morphism letters must be 0..k-1")
    target = max(max((int(ch) for im in ims for ch in im), default=0) for ims in images.values()) + 1
    target = max(target, len(images))
    if all(len(ims) == 1 for ims in images.values()):
        return Morphism(tuple(Word(images[a][0], target) for a in range(len(images))), target, name)
    return MultiValuedMorphism(
        tuple(tuple(Word(im, target) for im in images[a]) for a in range(len(images))), target, name)
