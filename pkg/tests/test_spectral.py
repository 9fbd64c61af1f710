from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from disposable.dfao import thue_morse_dfao, vtm_dfao
from disposable.predicate import compile_formula
from disposable.spectral import (PRINTED_EIGENVECTOR, PRINTED_FINALS, PRINTED_M, DensityError, RationalMatrix,
                                 accepted_density, adjacency_matrix, density_from_matrix,
                                 empirical_density_series, left_perron_eigenvector, nullspace,
                                 primitivity_index, recurrent_parts)


def _oracle_eigenvector(m: RationalMatrix) -> np.ndarray:
    vals, vecs = np.linalg.eig(np.array(m.rows, dtype=float).T)
    v = np.real(vecs[:, np.argmax(np.real(vals))])
    return v / v.sum()


def test_printed_vector_is_left_eigenvector():
    assert PRINTED_M.left_multiply(PRINTED_EIGENVECTOR) == tuple(2 * x for x in PRINTED_EIGENVECTOR)
    assert sum(PRINTED_EIGENVECTOR) == 1


def test_exact_eigenvector_matches_printed_and_float_oracle():
    v = left_perron_eigenvector(PRINTED_M, 2)
    assert v == PRINTED_EIGENVECTOR
    assert np.allclose(np.array(v, dtype=float), _oracle_eigenvector(PRINTED_M), atol=1e-12)


def test_printed_matrix_density():
    finals = [i - 1 for i in PRINTED_FINALS]
    assert density_from_matrix(PRINTED_M, finals) == Fraction(1, 12)
    assert primitivity_index(PRINTED_M) is not None


def test_derived_recurrent_part_equals_printed_matrix(dispo_pos):
    parts = recurrent_parts(dispo_pos)
    assert len(parts) == 1
    part = parts[0]
    assert part.absorption == 1
    assert part.matrix == PRINTED_M
    assert part.eigenvector == PRINTED_EIGENVECTOR
    finals = [k + 1 for k, q in enumerate(part.states) if dispo_pos.finals[q]]
    assert tuple(finals) == PRINTED_FINALS


def test_derived_density_is_one_twelfth(dispo_pos):
    assert accepted_density(dispo_pos) == Fraction(1, 12)


@given(st.permutations(range(8)))
def test_density_invariant_under_relabeling(perm):
    m = PRINTED_M.permuted(perm)
    inverse = {old: new for new, old in enumerate(perm)}
    finals = [inverse[i - 1] for i in PRINTED_FINALS]
    assert density_from_matrix(m, finals) == Fraction(1, 12)


def test_primitivity():
    assert primitivity_index(RationalMatrix.of([[1]])) == 1
    assert primitivity_index(RationalMatrix.of([[0, 1], [1, 0]])) is None
    assert primitivity_index(RationalMatrix.of([[1, 1], [1, 0]])) == 2
    with pytest.raises(DensityError):
        density_from_matrix(RationalMatrix.of([[0, 1], [1, 0]]), [0], eigenvalue=1)


def test_nullspace_exact():
    basis = nullspace([[Fraction(1), Fraction(2)], [Fraction(2), Fraction(4)]])
    assert basis == [[Fraction(-2), Fraction(1)]]


def test_missing_eigenvalue_raises():
    with pytest.raises(DensityError):
        left_perron_eigenvector(PRINTED_M, 3)


def test_dfao_densities():
    # letter frequencies of Thue-Morse and vtm
    assert accepted_density(thue_morse_dfao(), finals=[q for q, o in enumerate(thue_morse_dfao().outputs) if o])\
        == Fraction(1, 2)
    d = vtm_dfao()
    for letter, want in [(0, Fraction(1, 3)), (1, Fraction(1, 3)), (2, Fraction(1, 3))]:
        finals = [q for q, o in enumerate(d.outputs) if o == letter]
        assert accepted_density(d, finals) == want
    with pytest.raises(ValueError):
        accepted_density(d)


def test_absorption_weighting():
    # finitely many accepted values carry no mass
    assert accepted_density(compile_formula("x < 8")) == 0
    assert accepted_density(compile_formula("x >= 8")) == 1
    assert accepted_density(compile_formula("Ey x = 2*y")) == Fraction(1, 2)


def test_adjacency_shape(dispo_pos):
    m = adjacency_matrix(dispo_pos)
    assert m.size == dispo_pos.state_count
    assert all(sum(row) == 2 for row in m.rows)


def test_empirical_series_counts():
    mask = np.zeros(30, dtype=bool)
    mask[[0, 6, 12]] = True
    assert empirical_density_series(mask, [5, 11, 20]) == [(5, 2, 0.4), (11, 3, 3 / 11), (20, 3, 3 / 20)]
    assert empirical_density_series(lambda n: n % 3 == 0, [9])[0][:2] == (9, 4)
    with pytest.raises(ValueError):
        empirical_density_series(mask, [100])
