import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from disposable.disposability import (DISPOSABLE, NOT_DISPOSABLE, STRUCTURAL_PATTERNS, DisposabilityLedger,
                                      DisposabilityVerdict, disposable_positions, disposable_positions_against,
                                      factor_verdict, first_differences, is_disposable_position,
                                      position_verdicts, prefix_disposable_lengths, theorem_positions)
from disposable.predicate import accepted_values
from disposable.words import SquareWitness, as_array

from . import oracles

VTM = oracles.vtm_prefix(5000)


def test_first_positions_match_deletion_oracle(vtm):
    got = disposable_positions(vtm, 300, bound=300)
    want = [j for j in range(301) if oracles.disposable_by_deletion(VTM, j, 300)]
    assert got == want
    assert len([j for j in got if j <= 204]) == 19


def test_brute_force_matches_engine(vtm, dispo_pos):
    exact = [j for (j,) in accepted_values(dispo_pos, 1 << 12)]
    scan = disposable_positions_against(vtm, 1 << 12, exact)
    assert scan.positions == exact


def test_small_bound_only_overreports(vtm, dispo_pos):
    exact = set(j for (j,) in accepted_values(dispo_pos, 2000))
    loose = set(disposable_positions(vtm, 2000, bound=4))
    assert exact <= loose


def test_witness_is_a_seam_square(vtm):
    letters = vtm.letters(600)
    for v in position_verdicts(vtm, 200, bound=128):
        if v.disposable:
            continue
        w = v.witness
        deleted = np.delete(letters, v.position)
        assert w.start < v.position < w.end
        assert w.holds_in(deleted)
        s = "".join(map(str, deleted[w.start:w.end].tolist()))
        assert s[:w.half] == s[w.half:]


def test_verdict_fields():
    v = is_disposable_position(VTM, 0)
    assert v.status == DISPOSABLE and v.witness is None and v.disposable
    v = is_disposable_position(VTM, 1)
    assert v.status == NOT_DISPOSABLE and v.witness is not None
    record = v.to_json()
    assert set(record) == {"position", "length", "status", "witness_start", "witness_half", "bound"}
    json.dumps(record)
    with pytest.raises(ValueError):
        DisposabilityVerdict(3, DISPOSABLE, SquareWitness(0, 1), 8)
    with pytest.raises(ValueError):
        DisposabilityVerdict(3, NOT_DISPOSABLE, None, 8)


def test_ledger_json(vtm):
    ledger = DisposabilityLedger("vtm", position_verdicts(vtm, 20, bound=32))
    data = json.loads(json.dumps(ledger.to_json()))
    assert data["source"] == "vtm" and len(data["records"]) == 21
    assert not ledger.certified()


@given(st.integers(0, 3000), st.integers(1, 6))
def test_factor_verdict_against_oracle(start, length):
    letters = as_array(VTM)
    v = factor_verdict(letters, start, length, 200)
    deleted = VTM[max(0, start - 400):start] + VTM[start + length:start + length + 400]
    assert v.disposable == oracles.squarefree(deleted)


def test_first_differences():
    assert first_differences([0, 2, 12, 18]) == [2, 10, 6]
    assert first_differences([0, 2, 12, 18], drop_initial=True) == [10, 6]
    assert first_differences([]) == []
    with pytest.raises(ValueError):
        first_differences([3, 3])
    with pytest.raises(ValueError):
        first_differences([5, 1])


def test_gaps_after_first_position(dispo_pos):
    positions = [j for (j,) in accepted_values(dispo_pos, 1 << 16)]
    assert set(first_differences(positions, drop_initial=True)) == {6, 10, 26}


def test_structural_patterns_are_images():
    from disposable.morphisms import TAU, apply
    for factor, preimage, context, offset, marks in STRUCTURAL_PATTERNS:
        assert str(apply(TAU, preimage)) == factor
        assert context[offset:offset + len(factor)] == factor
        assert oracles.squarefree(context)


def test_structural_positions_inside_engine_set(vtm, dispo_pos):
    structural = theorem_positions(vtm, 20000)
    exact = {j for (j,) in accepted_values(dispo_pos, 20000)}
    assert structural[:2] == [0, 2]
    assert set(structural) <= exact
    assert len(structural) > 1500


def test_prefix_lengths(vtm):
    lengths = prefix_disposable_lengths(vtm, 200)
    assert lengths == {l for l in range(1, 201) if VTM[l] == VTM[0]}
    for l in sorted(lengths)[:20]:
        # removing w[1:l+1] leaves the suffix starting at l
        assert oracles.squarefree(VTM[0] + VTM[l + 1:l + 300])
    assert prefix_disposable_lengths("0", 10) == set()
