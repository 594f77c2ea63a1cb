"""
Tests for the CGLMP and CHSH functionals and the closed-form optimum.
"""

import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from bell.functionals import (
    LOCAL_BOUND,
    Order,
    aggregate,
    asymptotic_threshold,
    cglmp_asymptotic_optimal,
    cglmp_closed_form_optimal,
    cglmp_value,
    cglmp_weights,
    chsh_optimal_value,
    chsh_value,
    unfiltered_threshold,
)
from core.errors import InvalidParameterError
from core.measurements import (
    ALICE,
    JointProbabilityTable,
    PhaseOffsets,
    joint_probability_table,
    relabel_outcomes,
    signaling_deviation,
)
from core.states import mixture

UNFILTERED_THRESHOLDS = {3: 0.696, 4: 0.690, 5: 0.687, 6: 0.684, 7: 0.683, 8: 0.682, 9: 0.681, 10: 0.680, 100: 0.674}


def uniform_table(d: int) -> JointProbabilityTable:
    return JointProbabilityTable(d=d, probs=np.full((2, 2, d, d), 1.0 / d**2))


def test_aggregate_of_max_entangled_qutrits():
    table = joint_probability_table(mixture(3, 1.0))
    expected = 3.0 / (54.0 * np.sin(np.pi / 12) ** 2)
    assert aggregate(table, 1, 1, 0, Order.A_EQ_B_PLUS_K) == pytest.approx(expected, abs=1e-10)
    assert expected == pytest.approx(0.82934, abs=1e-5)


@pytest.mark.parametrize("order", list(Order))
def test_aggregates_partition_outcomes(order):
    table = joint_probability_table(mixture(4, 0.6))
    for a in (1, 2):
        for b in (1, 2):
            total = sum(aggregate(table, a, b, k, order) for k in range(4))
            assert total == pytest.approx(1.0, abs=1e-10)


def test_orders_are_mirror_images():
    table = joint_probability_table(mixture(3, 0.8))
    assert aggregate(table, 2, 1, 1, Order.A_EQ_B_PLUS_K) == pytest.approx(
        aggregate(table, 2, 1, -1, Order.B_EQ_A_PLUS_K)
    )


def test_weights():
    k, w = cglmp_weights(5)
    assert k.tolist() == [0, 1]
    assert np.allclose(w, [1.0, 0.5])


def test_cglmp_max_entangled_qutrits():
    value = cglmp_value(joint_probability_table(mixture(3, 1.0)))
    assert value.value == pytest.approx(2.8729, abs=1e-4)
    assert value.violated


@pytest.mark.parametrize("d", [2, 3, 4, 5, 6])
def test_closed_form_optimum_matches_density_matrix(d):
    oracle = cglmp_value(joint_probability_table(mixture(d, 1.0))).value
    assert cglmp_closed_form_optimal(d) == pytest.approx(oracle, abs=1e-10)


def test_qubit_optimum_is_tsirelson():
    assert cglmp_closed_form_optimal(2) == pytest.approx(2.0 * np.sqrt(2.0), abs=1e-12)


def test_uniform_table_gives_zero():
    for d in (2, 3, 5):
        assert cglmp_value(uniform_table(d)).value == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("d,expected", sorted(UNFILTERED_THRESHOLDS.items()))
def test_unfiltered_thresholds(d, expected):
    assert unfiltered_threshold(d) == pytest.approx(expected, abs=2e-3)


def test_optimum_grows_with_dimension():
    values = [cglmp_closed_form_optimal(d) for d in range(2, 12)]
    assert all(b > a for a, b in zip(values, values[1:]))


def test_asymptotic_limit():
    assert cglmp_asymptotic_optimal() == pytest.approx(2.96981, abs=1e-5)
    assert asymptotic_threshold() == pytest.approx(0.67344, abs=1e-5)
    assert cglmp_closed_form_optimal(2000) == pytest.approx(cglmp_asymptotic_optimal(), abs=1e-3)


@given(st.floats(min_value=1e-3, max_value=1.0))
@settings(max_examples=30, deadline=None)
def test_unfiltered_value_is_linear_in_q(q):
    value = cglmp_value(joint_probability_table(mixture(3, q))).value
    assert value == pytest.approx(q * cglmp_closed_form_optimal(3), abs=1e-10)


@given(st.floats(min_value=1e-3, max_value=1.0))
@settings(max_examples=30, deadline=None)
def test_qubit_cglmp_is_relabelled_chsh(q):
    table = joint_probability_table(mixture(2, q))
    relabelled = relabel_outcomes(table, ALICE, 2, 1)
    assert cglmp_value(table).value == pytest.approx(chsh_value(relabelled).value, abs=1e-10)


def test_qubit_equivalence_on_random_states():
    rng = np.random.default_rng(2024)
    for _ in range(100):
        g = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        rho = g @ g.conj().T
        rho /= np.trace(rho).real
        table = joint_probability_table(rho)
        relabelled = relabel_outcomes(table, ALICE, 2, 1)
        assert cglmp_value(table).value == pytest.approx(chsh_value(relabelled).value, abs=1e-10)
        assert signaling_deviation(table) < 1e-10


def test_chsh_offsets_reach_tsirelson():
    for q in (1.0, 0.8, 0.5):
        table = joint_probability_table(mixture(2, q), PhaseOffsets.chsh())
        assert chsh_value(table).value == pytest.approx(2.0 * np.sqrt(2.0) * q, abs=1e-10)


def test_chsh_needs_qubits():
    with pytest.raises(InvalidParameterError):
        chsh_value(joint_probability_table(mixture(3, 1.0)))
    with pytest.raises(InvalidParameterError):
        chsh_optimal_value(mixture(3, 1.0))


def test_optimal_chsh_of_bell_state():
    assert chsh_optimal_value(mixture(2, 1.0)).value == pytest.approx(2.0 * np.sqrt(2.0), abs=1e-10)
    assert not chsh_optimal_value(mixture(2, 0.5)).violated


def test_local_bound():
    assert LOCAL_BOUND == 2.0
