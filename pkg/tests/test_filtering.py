"""
Tests for local filters, filtered states and the filtered closed forms.
"""

import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from bell.filtering import (
    CouplingDomain,
    CrossTermConvention,
    FilterPair,
    apply_filters,
    cglmp_fourier_sums,
    filter_operator,
    filtered_cglmp_closed_form,
    filtered_prob_closed_form,
    filtered_rational,
    filtered_state,
    success_probability_closed_form,
)
from bell.functionals import cglmp_closed_form_optimal, cglmp_value
from core.errors import DegenerateFilterError, InvalidParameterError
from core.measurements import joint_probability_table
from core.qmath import is_hermitian
from core.states import KNOWN_OPTIMAL_GAMMAS, KNOWN_OPTIMAL_VALUES, SchmidtCoefficients, mixture, schmidt_state

POINTS = [(1.0, 1.0), (0.9, 0.8), (0.7, 0.6), (0.5, 0.3)]


def oracle_value(d, q, xi, domain=CouplingDomain.STRICT, psi=None):
    rho = filtered_state(d, q, xi, psi=psi, domain=domain).rho_f
    return cglmp_value(joint_probability_table(rho)).value


@st.composite
def strict_points(draw):
    q = draw(st.floats(min_value=0.05, max_value=1.0))
    fraction = draw(st.floats(min_value=0.05, max_value=1.0))
    return q, fraction * np.sqrt(q)


def test_filter_operator():
    assert np.allclose(np.diag(filter_operator(3, 0.4)), [0.4, 1.0, 1.0])
    assert np.allclose(np.diag(filter_operator(3, 1.0, 0.5)), [1.0, 0.5, 0.5])
    with pytest.raises(InvalidParameterError):
        filter_operator(3, 1.2)


def test_coupled_filters():
    pair = FilterPair.coupled(3, 0.64, 0.4)
    assert pair.delta == pytest.approx(0.5)
    assert pair.bob_rest == 1.0
    with pytest.raises(InvalidParameterError):
        FilterPair.coupled(3, 0.25, 0.6)
    extended = FilterPair.coupled(3, 0.25, 0.6, CouplingDomain.EXTENDED)
    assert extended.delta == 1.0
    assert extended.bob_rest == pytest.approx(0.5 / 0.6)
    assert extended.delta_ratio == pytest.approx(0.6 / 0.5)


def test_filter_pair_validation():
    with pytest.raises(InvalidParameterError):
        FilterPair(3, 1.5, 1.0)
    with pytest.raises(InvalidParameterError):
        FilterPair(3, 0.5, 1.0, bob_rest=0.0)
    with pytest.raises(InvalidParameterError):
        FilterPair.coupled(3, 0.0, 0.1)


def test_identity_filter_leaves_state_unchanged():
    rho = mixture(3, 0.6)
    result = apply_filters(rho, FilterPair.identity(3))
    assert result.success_prob == pytest.approx(1.0, abs=1e-12)
    assert np.allclose(result.rho_f, rho, atol=1e-12)


def test_annihilating_filter_is_degenerate():
    rho = np.zeros((4, 4), dtype=complex)
    rho[0, 0] = 1.0
    with pytest.raises(DegenerateFilterError):
        apply_filters(rho, FilterPair(2, 0.0, 1.0))


def test_filter_shape_mismatch():
    with pytest.raises(InvalidParameterError):
        apply_filters(mixture(2, 0.5), FilterPair.identity(3))


@given(st.integers(min_value=2, max_value=5), strict_points())
@settings(max_examples=25, deadline=None)
def test_filtered_state_is_a_density_matrix(d, point):
    q, xi = point
    result = filtered_state(d, q, xi)
    assert is_hermitian(result.rho_f, tol=1e-10)
    assert abs(np.trace(result.rho_f).real - 1.0) < 1e-10
    assert np.linalg.eigvalsh(result.rho_f).min() > -1e-10
    assert 0.0 < result.success_prob <= 1.0 + 1e-12


@given(st.integers(min_value=2, max_value=5), strict_points())
@settings(max_examples=25, deadline=None)
def test_success_probability_closed_form(d, point):
    q, xi = point
    expected = filtered_state(d, q, xi).success_prob
    assert success_probability_closed_form(d, q, xi) == pytest.approx(expected, abs=1e-12)
    norm = ((q + (1 - q) * xi**2) * (1 - 1 / d) + xi**4 / (q * d))
    assert success_probability_closed_form(d, q, xi) == pytest.approx(norm, abs=1e-12)


@pytest.mark.parametrize("d,q,xi", [(3, 0.25, 0.9), (4, 0.5, 0.85), (5, 0.36, 0.7)])
def test_success_probability_in_extended_domain(d, q, xi):
    expected = filtered_state(d, q, xi, domain=CouplingDomain.EXTENDED).success_prob
    closed = success_probability_closed_form(d, q, xi, domain=CouplingDomain.EXTENDED)
    assert closed == pytest.approx(expected, abs=1e-12)
    assert 0.0 < closed <= 1.0


def test_rescaled_success_probability_value():
    closed = success_probability_closed_form(3, 0.25, 0.9, domain=CouplingDomain.EXTENDED)
    assert closed == pytest.approx(0.44644, abs=1e-4)


@pytest.mark.parametrize("d", [2, 3, 4])
@pytest.mark.parametrize("q,xi", POINTS)
def test_filtered_probabilities_match_density_matrix(d, q, xi):
    table = joint_probability_table(filtered_state(d, q, xi).rho_f)
    for a in (1, 2):
        for b in (1, 2):
            for k in range(d):
                for l in range(d):
                    closed = filtered_prob_closed_form(d, q, xi, a, b, k, l)
                    assert closed == pytest.approx(table.p(a, b, k, l), abs=1e-10)


@pytest.mark.parametrize("d", [2, 3, 4, 5])
@pytest.mark.parametrize("q,xi", POINTS)
def test_filtered_cglmp_matches_density_matrix(d, q, xi):
    assert filtered_cglmp_closed_form(d, q, xi) == pytest.approx(oracle_value(d, q, xi), abs=1e-9)


@pytest.mark.parametrize("d", range(2, 11))
@given(point=strict_points())
@settings(max_examples=20, deadline=None)
def test_closed_forms_match_density_matrix_at_random_points(d, point):
    q, xi = point
    table = joint_probability_table(filtered_state(d, q, xi).rho_f)
    assert filtered_cglmp_closed_form(d, q, xi) == pytest.approx(cglmp_value(table).value, abs=1e-9)
    for a in (1, 2):
        for b in (1, 2):
            closed = [[filtered_prob_closed_form(d, q, xi, a, b, k, l) for l in range(d)] for k in range(d)]
            assert np.allclose(closed, table.slice(a, b), atol=1e-10, rtol=0.0)


@pytest.mark.parametrize("d", [3, 4])
def test_extended_domain_matches_density_matrix(d):
    q, xi = 0.5, 0.85
    closed = filtered_cglmp_closed_form(d, q, xi, domain=CouplingDomain.EXTENDED)
    assert closed == pytest.approx(oracle_value(d, q, xi, CouplingDomain.EXTENDED), abs=1e-9)
    with pytest.raises(InvalidParameterError):
        filtered_cglmp_closed_form(d, q, xi)


def test_unit_filter_reduces_to_unfiltered_optimum():
    for d in (3, 5, 8):
        assert filtered_cglmp_closed_form(d, 1.0, 1.0) == pytest.approx(cglmp_closed_form_optimal(d), abs=1e-12)


@pytest.mark.parametrize("d", [3, 6, 10])
def test_conventions_agree_where_cross_term_vanishes(d):
    q = 0.6
    xi = q**0.25
    exact = filtered_cglmp_closed_form(d, q, xi, CrossTermConvention.EXACT, domain=CouplingDomain.EXTENDED)
    published = filtered_cglmp_closed_form(d, q, xi, CrossTermConvention.PUBLISHED, domain=CouplingDomain.EXTENDED)
    assert exact == pytest.approx(published, abs=1e-12)


def test_published_cross_term_is_larger():
    for d in (3, 4, 7):
        _, exact = cglmp_fourier_sums(d, CrossTermConvention.EXACT)
        _, published = cglmp_fourier_sums(d, CrossTermConvention.PUBLISHED)
        assert published > exact


@pytest.mark.parametrize("d", [3, 8])
def test_weak_filter_limit_is_independent_of_q(d):
    a_sum, b_sum = cglmp_fourier_sums(d)
    limit = 4.0 * (a_sum - b_sum) / (d * (d - 1))
    for q in (0.3, 0.8):
        assert filtered_cglmp_closed_form(d, q, 1e-6) == pytest.approx(limit, abs=1e-8)


def test_weak_filter_limit_exceeds_local_bound_from_d8():
    a_sum, b_sum = cglmp_fourier_sums(8)
    assert 4.0 * (a_sum - b_sum) / (8 * 7) > 2.0


@pytest.mark.parametrize("d", [3, 4, 5])
def test_rational_forms_at_unit_parameters(d):
    assert filtered_rational(d, 1.0, 1.0) == pytest.approx(KNOWN_OPTIMAL_VALUES[d], abs=5e-3)


@pytest.mark.parametrize("d", [3, 4, 5])
def test_rational_forms_track_density_matrix(d):
    psi = schmidt_state(SchmidtCoefficients.normalized(KNOWN_OPTIMAL_GAMMAS[d]))
    assert filtered_rational(d, 1.0, 1.0) == pytest.approx(oracle_value(d, 1.0, 1.0, psi=psi), abs=5e-3)


def test_rational_form_domain():
    with pytest.raises(InvalidParameterError):
        filtered_rational(3, 0.25, 0.6)
    with pytest.raises(InvalidParameterError):
        filtered_rational(6, 1.0, 1.0)
