import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from disposable.construction import (OCCURRENCES_PER_PHASE, THRESHOLD, ConstructionLedger, LengthSet, PhasePlan,
                                     build_v, front_loaded_excess, fs_stream, is_q_pattern, lengths_set,
                                     missing_count, relabeled_vtm, verify_ledger)
from disposable.disposability import factor_verdict
from disposable.morphisms import G, H5, apply
from disposable.words import find_square, is_squarefree, square_census

from . import oracles


def _text(letters) -> str:
    return "".join(map(str, np.asarray(letters).tolist()))


def test_fs_census_and_squares():
    prefix = _text(fs_stream().letters(3000))
    found = {prefix[s:s + 2 * h] for s, h in oracles.squares(prefix, 2)}
    assert found == {"00", "11", "0101"}
    assert all(h <= 2 for _, h in oracles.squares(prefix))


def test_fs_census_library():
    census = square_census(fs_stream().letters(20000))
    assert set(census) == {"00", "11", "0101"}


def test_fs_is_deterministic():
    assert np.array_equal(fs_stream().letters(5000), fs_stream().letters(5000))
    s = fs_stream()
    assert np.array_equal(s.letters(100), s.letters(5000)[:100])


def test_relabeled_vtm():
    y = relabeled_vtm().letters(50)
    assert _text(y) == "".join(str(int(c) + 2) for c in oracles.vtm_prefix(50))


def test_q_pattern():
    assert is_q_pattern(0, 0, 1, 1)
    assert not is_q_pattern(0, 1, 1, 0)
    assert not is_q_pattern(0, 1, 0, 1)
    assert is_q_pattern(1, 0, 1, 0)


def test_phase_one_counts(phase1):
    vc, wc = phase1
    assert len(vc.plan.counted[1]) == OCCURRENCES_PER_PHASE
    assert len(vc.plan.selected[1]) == PhasePlan.scheduled_count(1) == 55
    assert len(wc.ledger.records) == 55


def test_q_occurrences_sit_in_v(phase1):
    vc, _ = phase1
    v = vc.v.letters
    for occ in vc.occurrences:
        (s1, e1), (s2, e2), (s3, e3) = occ.y_ranges
        assert e1 - s1 == e2 - s2 == e3 - s3 == occ.phase
        assert (int(v[s1 - 1]), int(v[e1]), int(v[e2]), int(v[e3])) == occ.letters
        assert s2 == e1 + 1 and s3 == e2 + 1
        assert is_q_pattern(*occ.letters)
        assert all(v[s:e].min() >= 2 for s, e in occ.y_ranges)
        assert max(occ.letters) <= 1


def test_selected_blocks_are_disjoint(phase1):
    vc, _ = phase1
    blocks = [o.y2 for o in vc.plan.selected[1]]
    assert len(set(blocks)) == len(blocks)


def test_v_is_squarefree(phase1):
    vc, _ = phase1
    assert is_squarefree(vc.v)
    assert oracles.squarefree(_text(vc.v.letters[:800]))


def test_removing_y2_from_v_is_safe(phase1):
    vc, _ = phase1
    v = vc.v.letters
    for occ in vc.plan.selected[1]:
        s, e = occ.y2
        assert factor_verdict(v, s, e - s, len(v)).disposable


def test_w_is_squarefree_on_windows(phase1):
    _, wc = phase1
    assert find_square(wc.w, max_half=2000) is None


def test_w_is_image_of_v_prime(phase1):
    vc, wc = phase1
    assert wc.v_prime == apply(H5, vc.v)
    assert len(wc.w) >= 23 * len(wc.v_prime)


def test_ledger_lengths(phase1):
    _, wc = phase1
    lengths = [r.length for r in wc.ledger.records]
    assert lengths == list(range(414, 469))
    assert [r.index for r in wc.ledger.records] == list(range(55))


def test_ledger_certified(phase1):
    _, wc = phase1
    verdicts = verify_ledger(wc.w, wc.ledger, 2000)
    assert len(verdicts) == 55
    assert all(v.disposable for v in verdicts)


def test_ledger_json_roundtrip(phase1):
    _, wc = phase1
    data = json.loads(json.dumps(wc.ledger.to_json()))
    back = ConstructionLedger.from_json(data)
    assert back.records == wc.ledger.records
    assert back.schedule == wc.ledger.schedule


def test_shift_by_one_control_deletes_the_same_word(phase1):
    # w[s] == w[s + L], so deleting one step later removes an equal word
    _, wc = phase1
    w = wc.w.letters
    for r in wc.ledger.records:
        assert w[r.start] == w[r.start + r.length]


@pytest.mark.parametrize("shift,delta", [(0, 1), (0, -1)])
def test_wrong_length_controls_fail(phase1, shift, delta):
    _, wc = phase1
    w = wc.w.letters
    verdicts = [factor_verdict(w, r.start + shift, r.length + delta, 2000) for r in wc.ledger.records]
    assert not any(v.disposable for v in verdicts)


def test_shifted_control_mostly_fails(phase1):
    _, wc = phase1
    w = wc.w.letters
    verdicts = [factor_verdict(w, r.start + 13, r.length, 2000) for r in wc.ledger.records]
    assert sum(v.disposable for v in verdicts) < len(verdicts) // 2


def test_empty_ledger(phase1):
    _, wc = phase1
    assert verify_ledger(wc.w, [], 2000) == []
    with pytest.raises(ValueError):
        verify_ledger(wc.w, ConstructionLedger([type(wc.ledger.records[0])(1, 0, len(wc.w), 414, "")], {}), 10)


@given(st.integers(0, 500), st.integers(1, 200))
def test_front_loaded_excess(total, letters):
    if total > 3 * letters:
        with pytest.raises(ValueError):
            front_loaded_excess(total, letters)
        return
    e = front_loaded_excess(total, letters)
    assert len(e) == letters and sum(e) == total
    assert all(0 <= x <= 3 for x in e)
    assert e == sorted(e, reverse=True)


def test_g_choice_lengths():
    assert [len(img) for img in G.images[0]] == [23, 24, 25, 26]


def test_lengths_set_first_phase():
    s = lengths_set(1)
    assert s.intervals == ((414, 468),)
    assert 414 in s and 468 in s and 469 not in s


def test_missing_lengths():
    assert missing_count() == 1792
    assert missing_count(THRESHOLD) == lengths_set(9).missing_below(THRESHOLD)
    brute = set()
    for n in range(1, 10):
        brute.update(414 * n + i for i in range(min(413, 54 * n) + 1))
    assert sum(1 for k in range(1, THRESHOLD) if k not in brute) == 1792


def test_lengths_cover_beyond_threshold():
    s = lengths_set(10 ** 5 // 414 + 1)
    assert s.covers(THRESHOLD, 10 ** 5)
    assert 3311 not in s


def test_length_set_helpers():
    s = LengthSet(((2, 3), (5, 5)))
    assert s.missing_below(7) == 3
    assert s.covers(2, 3) and not s.covers(2, 5)


def test_build_v_requires_a_phase():
    with pytest.raises(ValueError):
        build_v(fs_stream(), relabeled_vtm(), 0)
