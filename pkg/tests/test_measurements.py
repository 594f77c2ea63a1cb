"""
Tests for the Fourier measurement bases and joint probability tables.
"""

import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from core.errors import DimensionError, InvalidParameterError, NumericalConsistencyError
from core.measurements import (
    ALICE,
    BOB,
    DEFAULT_OFFSETS,
    JointProbabilityTable,
    PhaseOffsets,
    alice_eigenvector,
    bob_eigenvector,
    joint_probability_table,
    measurement_basis,
    pure_state_probability_table,
    relabel_outcomes,
    signaling_deviation,
)
from core.states import SchmidtCoefficients, max_entangled, mixture, schmidt_state

dims = st.integers(min_value=2, max_value=6)
mixing = st.floats(min_value=1e-3, max_value=1.0, allow_nan=False)


@pytest.mark.parametrize("d", [2, 3, 5])
@pytest.mark.parametrize("party", [ALICE, BOB])
@pytest.mark.parametrize("setting", [1, 2])
def test_bases_are_unitary_and_complete(d, party, setting):
    u = measurement_basis(d, party, setting)
    assert np.allclose(u.conj().T @ u, np.eye(d), atol=1e-12)
    projectors = sum(np.outer(u[:, k], u[:, k].conj()) for k in range(d))
    assert np.allclose(projectors, np.eye(d), atol=1e-12)


def test_basis_columns_match_eigenvectors():
    d = 4
    a_basis = measurement_basis(d, ALICE, 2)
    b_basis = measurement_basis(d, BOB, 1)
    for k in range(d):
        assert np.allclose(a_basis[:, k], alice_eigenvector(d, 2, k))
        assert np.allclose(b_basis[:, k], bob_eigenvector(d, 1, k))


def test_bob_eigenvector_uses_his_own_offset():
    d = 3
    j = np.arange(d)
    expected = np.exp(2j * np.pi * j * (-1 + DEFAULT_OFFSETS.beta2) / d) / np.sqrt(d)
    assert np.allclose(bob_eigenvector(d, 2, 1), expected)


def test_eigenvector_rejects_bad_input():
    with pytest.raises(InvalidParameterError):
        alice_eigenvector(3, 1, 3)
    with pytest.raises(InvalidParameterError):
        bob_eigenvector(3, 3, 0)
    with pytest.raises(InvalidParameterError):
        measurement_basis(3, "eve", 1)


def test_table_validation():
    good = np.full((2, 2, 2, 2), 0.25)
    JointProbabilityTable(d=2, probs=good)
    with pytest.raises(DimensionError):
        JointProbabilityTable(d=3, probs=good)
    bad = good.copy()
    bad[0, 0, 0, 0] = 0.5
    with pytest.raises(NumericalConsistencyError):
        JointProbabilityTable(d=2, probs=bad)
    negative = good.copy()
    negative[0, 0, 0, 0] = -0.1
    negative[0, 0, 0, 1] = 0.6
    with pytest.raises(NumericalConsistencyError):
        JointProbabilityTable(d=2, probs=negative)


def test_table_is_read_only():
    table = joint_probability_table(mixture(2, 0.5))
    with pytest.raises(ValueError):
        table.probs[0, 0, 0, 0] = 1.0


def test_table_wraps_outcomes():
    table = joint_probability_table(mixture(3, 0.7))
    assert table.p(1, 2, -1, 4) == table.p(1, 2, 2, 1)


def test_non_square_state_rejected():
    with pytest.raises(DimensionError):
        joint_probability_table(np.eye(8))


@given(dims, mixing)
@settings(max_examples=25, deadline=None)
def test_tables_sum_to_one_and_do_not_signal(d, q):
    table = joint_probability_table(mixture(d, q))
    assert np.allclose(table.probs.sum(axis=(2, 3)), 1.0, atol=1e-10)
    assert signaling_deviation(table) < 1e-10


def test_max_entangled_probability_formula():
    d = 3
    table = joint_probability_table(mixture(d, 1.0))
    for a in (1, 2):
        for b in (1, 2):
            for k in range(d):
                for l in range(d):
                    x = k - l + DEFAULT_OFFSETS.alpha(a) + DEFAULT_OFFSETS.beta(b)
                    expected = np.sin(np.pi * x) ** 2 / (d**3 * np.sin(np.pi * x / d) ** 2)
                    assert abs(table.p(a, b, k, l) - expected) < 1e-12


@pytest.mark.parametrize("d", [2, 3, 4])
def test_pure_state_table_matches_density_matrix(d):
    psi = schmidt_state(SchmidtCoefficients.normalized(np.arange(1, d + 1)))
    fast = pure_state_probability_table(psi)
    slow = joint_probability_table(np.outer(psi, psi.conj()))
    assert np.allclose(fast.probs, slow.probs, atol=1e-12)


def test_relabel_outcomes_shifts_one_observable():
    table = joint_probability_table(mixture(3, 0.8))
    shifted = relabel_outcomes(table, ALICE, 2, 1)
    for k in range(3):
        for l in range(3):
            assert shifted.p(2, 1, k + 1, l) == pytest.approx(table.p(2, 1, k, l))
            assert shifted.p(1, 1, k, l) == pytest.approx(table.p(1, 1, k, l))
    bob_shifted = relabel_outcomes(table, BOB, 1, 2)
    assert bob_shifted.p(2, 1, 0, 2) == pytest.approx(table.p(2, 1, 0, 0))


def test_chsh_offsets_relabel_alice_second_setting():
    chsh = PhaseOffsets.chsh()
    assert chsh.as_tuple() == (0.0, -0.5, 0.25, -0.25)
    direct = joint_probability_table(mixture(2, 0.9), chsh)
    relabelled = relabel_outcomes(joint_probability_table(mixture(2, 0.9)), ALICE, 2, 1)
    assert np.allclose(direct.probs, relabelled.probs, atol=1e-12)


def test_invalid_setting():
    with pytest.raises(InvalidParameterError):
        DEFAULT_OFFSETS.alpha(3)


def test_max_entangled_helper_shape():
    assert max_entangled(4).shape == (16,)
