import random

import numpy as np
import pytest
from hypothesis import given, strategies as st

from disposable.disposability import vtm_stream
from disposable.words import (SquareWitness, Word, WordStream, avoids, crossing_square_at, delete_range,
                              find_square, find_square_naive, occurrences, square_census)

from . import oracles

ternary = st.text(alphabet="012", max_size=64)


def pair(w):
    return None if w is None else (w.start, w.half)


def test_word_roundtrip_and_alphabet():
    w = Word("012021")
    assert str(w) == "012021"
    assert len(w) == 6
    assert w.alphabet_size == 3
    assert w[1:3] == "12"
    with pytest.raises(ValueError):
        Word([0, 3], alphabet_size=3)


def test_smallest_square():
    assert find_square("00", 1) == SquareWitness(0, 1)


def test_vtm_prefix_has_no_square():
    assert find_square(vtm_stream().prefix(10 ** 4), 5000) is None


def test_short_squarefree_word():
    # all 21 factor pairs checked by the reference scan
    assert oracles.first_square("0121021", 3) is None
    assert find_square("0121021", 3) is None
    assert find_square("0121021", 3, accelerated=False) is None


def test_empty_word_has_no_square():
    assert find_square("", 1) is None


@given(ternary, st.integers(1, 32))
def test_find_square_matches_reference(s, max_half):
    want = oracles.first_square(s, max_half)
    assert pair(find_square(s, max_half)) == want
    assert pair(find_square_naive(s, max_half) if s else None) == want


def test_accelerated_and_naive_agree_on_bulk_random_words():
    rng = random.Random(20260101)
    for _ in range(100_000):
        s = "".join(rng.choice("012") for _ in range(rng.randint(0, 64)))
        fast = find_square(s) is not None
        slow = any(s[i:i + h] == s[i + h:i + 2 * h]
                   for h in range(1, len(s) // 2 + 1) for i in range(len(s) - 2 * h + 1))
        assert fast == slow, s


@given(ternary)
def test_squarefree_words_have_squarefree_factors(s):
    if find_square(s) is None:
        for i in range(len(s)):
            for j in range(i + 1, len(s) + 1):
                assert find_square(s[i:j]) is None


@given(ternary)
def test_witness_is_a_genuine_square(s):
    w = find_square(s)
    if w is not None:
        assert w.holds_in(s)


def test_avoids():
    assert avoids("0120", ["010", "212"])
    assert not avoids("012", ["012"])
    assert avoids("", ["0"])


@pytest.mark.parametrize("k", range(1, 21))
def test_vtm_power_of_two_prefixes_avoid_all_four(k):
    w = vtm_stream().letters(1 << k)
    assert avoids(w, ["010", "212", "1021", "1201"])


def test_delete_range_examples():
    assert delete_range("012", 1, 1) == "02"
    assert delete_range("012021012102", 2, 1) == "01021012102"
    assert delete_range("012021", 0, 0) == "012021"
    with pytest.raises(ValueError):
        delete_range("012", 2, 2)


@given(ternary, st.data())
def test_delete_range_lengths(s, data):
    i = data.draw(st.integers(0, len(s)))
    n = data.draw(st.integers(0, len(s) - i))
    assert str(delete_range(s, i, 0)) == s
    out = delete_range(s, i, n)
    assert len(out) == len(s) - n
    assert str(out) == s[:i] + s[i + n:]


def test_crossing_examples():
    assert crossing_square_at("01021012102", 2, 5) is None
    assert crossing_square_at("0110", 2, 2) == SquareWitness(1, 1)


@given(ternary, st.data())
def test_crossing_matches_reference(s, data):
    b = data.draw(st.integers(0, len(s)))
    h = data.draw(st.integers(1, 33))
    assert pair(crossing_square_at(s, b, h)) == oracles.crossing(s, b, h)


def test_non_disposable_positions_below_100_have_seam_witnesses():
    w = oracles.vtm_prefix(400)
    for j in range(100):
        deleted = w[:j] + w[j + 1:]
        # reference: the deleted window either is squarefree or not
        bad = not oracles.disposable_by_deletion(w, j, 150)
        found = crossing_square_at(deleted, j, 64)
        assert (found is not None) == bad, j
        if found is not None:
            assert found.holds_in(deleted)
            assert found.start < j < found.end


def test_stream_is_deterministic_and_memoized():
    s = vtm_stream()
    a = str(s.prefix(1000))
    b = str(s.prefix(10))
    s.letters(50_000)
    assert str(s.prefix(1000)) == a
    assert a.startswith(b)
    assert s[5] == 1


def test_stream_rejects_inconsistent_extension():
    calls = []

    def extend(prefix, target):
        calls.append(target)
        return np.full(target, len(calls) % 2, dtype=np.int8)

    s = WordStream(extend, 2)
    s.letters(10)
    with pytest.raises(RuntimeError):
        s.letters(1000)


def test_square_census_and_occurrences():
    assert square_census("0010") == {"00"}
    assert square_census("010101") == {"0101", "1010"}
    assert occurrences("0120120", "012").tolist() == [0, 3]
