import numpy as np
import pytest
from hypothesis import given, strategies as st

from disposable.dfao import (VTM_PAIR_MAP, Dfao, dumps, eval_dfao, eval_many, loads, minimize_dfao, msd2,
                             reverse_to_lsd, thue_morse_dfao, vtm_dfao, vtm_product_dfao)
from disposable.morphisms import TAU, fixed_point_stream

from . import oracles


def test_msd2():
    assert msd2(0) == ""
    assert msd2(6) == "110"
    assert msd2(26) == "11010"


def test_thue_morse_is_parity_of_ones():
    tm = thue_morse_dfao()
    ns = np.arange(1 << 16)
    want = np.array([oracles.thue_morse(n) for n in range(1 << 16)])
    assert np.array_equal(eval_many(tm, ns), want)
    assert [eval_dfao(tm, n) for n in range(8)] == want[:8].tolist()


def test_vtm_first_letters():
    d = vtm_dfao()
    assert [eval_dfao(d, n) for n in range(12)] == [0, 1, 2, 0, 2, 1, 0, 1, 2, 1, 0, 2]


def test_vtm_dfao_matches_morphic_stream():
    d = vtm_dfao()
    stream = fixed_point_stream(TAU, 0).letters(1 << 20)
    assert np.array_equal(eval_many(d, np.arange(1 << 20)), stream)


def test_vtm_output_alphabet():
    assert set(vtm_dfao().outputs) == {0, 1, 2}


def test_pair_map_at_five():
    t = [oracles.thue_morse(n) for n in range(8)]
    v = oracles.vtm_prefix(8)
    assert (t[5], t[6]) == (0, 0)
    assert int(v[5]) == 1 == VTM_PAIR_MAP[(t[5], t[6])]
    for n in range(7):
        assert int(v[n]) == VTM_PAIR_MAP[(t[n], t[n + 1])]


def test_minimize_removes_duplicate_state():
    # state 2 duplicates state 1
    d = Dfao(((1, 2), (0, 1), (0, 2)), (0, 1, 1))
    m = minimize_dfao(d)
    assert m.state_count == 2
    for n in range(256):
        assert eval_dfao(m, n) == eval_dfao(d, n)


def test_minimize_preserves_vtm_and_is_idempotent():
    raw = vtm_product_dfao()
    m = minimize_dfao(raw)
    ns = np.arange(1 << 16)
    assert np.array_equal(eval_many(m, ns), eval_many(raw, ns))
    assert minimize_dfao(m).state_count == m.state_count
    assert minimize_dfao(m) == m


@pytest.mark.parametrize("d", [thue_morse_dfao(), vtm_dfao(), vtm_product_dfao()])
def test_minimize_preserves_outputs_on_corpus(d):
    ns = np.arange(1 << 16)
    assert np.array_equal(eval_many(minimize_dfao(d), ns), eval_many(d, ns))


@given(st.integers(0, 10 ** 9), st.integers(0, 8))
def test_leading_zeros_do_not_matter(n, pad):
    for d in (vtm_dfao(), thue_morse_dfao()):
        assert d.outputs[d.run("0" * pad + msd2(n))] == eval_dfao(d, n)


@given(st.integers(0, 10 ** 9), st.integers(0, 8))
def test_lsd_version_ignores_trailing_zeros(n, pad):
    lsd = reverse_to_lsd(vtm_dfao())
    assert lsd.order == "lsd"
    assert lsd.outputs[lsd.run(msd2(n)[::-1] + "0" * pad)] == eval_dfao(vtm_dfao(), n)


def test_lsd_version_agrees():
    lsd = reverse_to_lsd(vtm_dfao())
    ns = np.arange(1 << 14)
    assert np.array_equal(eval_many(lsd, ns), eval_many(vtm_dfao(), ns))
    assert [eval_dfao(lsd, n) for n in range(12)] == [0, 1, 2, 0, 2, 1, 0, 1, 2, 1, 0, 2]


def test_text_format_roundtrip():
    d = vtm_dfao()
    text = dumps(d)
    assert text.startswith("states 4, initial 0, order msd\n")
    assert "0 1 -> " in text and "output 0 = 0" in text
    assert loads(text) == d


def test_invalid_tables_rejected():
    with pytest.raises(ValueError):
        Dfao(((0, 1),), (0,))
    with pytest.raises(ValueError):
        loads("states 1, initial 0, order msd\n0 0 -> 0\noutput 0 = 0\n")
