"""
Tests for pure states, Schmidt coefficients and the colour-noise mixture.
"""

import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from core.errors import InvalidParameterError
from core.qmath import is_hermitian
from core.states import (
    KNOWN_OPTIMAL_GAMMAS,
    MixedStateParams,
    SchmidtCoefficients,
    max_entangled,
    mixed_state,
    mixture,
    noise_state,
    schmidt_state,
    uniform_gammas,
)

dims = st.integers(min_value=2, max_value=6)
mixing = st.floats(min_value=1e-3, max_value=1.0, allow_nan=False)


def test_max_entangled_qubits():
    psi = max_entangled(2)
    assert np.allclose(psi, np.array([1, 0, 0, 1]) / np.sqrt(2))


def test_max_entangled_rejects_small_dimension():
    with pytest.raises(InvalidParameterError):
        max_entangled(1)


def test_schmidt_state_support():
    gammas = SchmidtCoefficients.normalized([1.0, 2.0, 3.0])
    psi = schmidt_state(gammas)
    support = np.nonzero(np.abs(psi) > 0)[0]
    assert support.tolist() == [0, 4, 8]
    assert abs(np.linalg.norm(psi) - 1.0) < 1e-12


def test_schmidt_coefficients_validation():
    with pytest.raises(InvalidParameterError):
        SchmidtCoefficients((0.5, 0.5))
    with pytest.raises(InvalidParameterError):
        SchmidtCoefficients((1.0,))
    with pytest.raises(InvalidParameterError):
        SchmidtCoefficients((-0.6, 0.8))
    with pytest.raises(InvalidParameterError):
        SchmidtCoefficients.normalized([0.0, 0.0])


def test_rounded_literature_gammas_need_renormalizing():
    for d, raw in KNOWN_OPTIMAL_GAMMAS.items():
        gammas = SchmidtCoefficients.normalized(raw)
        assert gammas.d == d
        assert np.allclose(gammas.gammas, raw, atol=1e-3)
        assert gammas.reversed() == gammas


def test_noise_state_is_colour_noise():
    rho = noise_state(3)
    assert np.allclose(np.diag(rho).real, [1 / 3, 1 / 3, 1 / 3, 0, 0, 0, 0, 0, 0])
    assert abs(np.trace(rho) - 1.0) < 1e-12


def test_mixed_state_rejects_bad_parameters():
    with pytest.raises(InvalidParameterError):
        mixture(3, 0.0)
    with pytest.raises(InvalidParameterError):
        mixture(3, 1.5)
    with pytest.raises(InvalidParameterError):
        MixedStateParams(d=3, q=0.5, psi=np.ones(9))
    with pytest.raises(InvalidParameterError):
        MixedStateParams(d=3, q=0.5, psi=max_entangled(2))


def test_pure_limit():
    psi = max_entangled(3)
    assert np.allclose(mixture(3, 1.0), np.outer(psi, psi.conj()))


@given(dims, mixing)
@settings(max_examples=30, deadline=None)
def test_mixture_is_a_density_matrix(d, q):
    rho = mixture(d, q)
    assert is_hermitian(rho)
    assert abs(np.trace(rho).real - 1.0) < 1e-10
    assert np.linalg.eigvalsh(rho).min() > -1e-12


@given(dims, mixing, mixing)
@settings(max_examples=30, deadline=None)
def test_mixture_is_linear_in_q(d, q1, q2):
    lam = 0.3
    q = lam * q1 + (1 - lam) * q2
    assert np.allclose(mixture(d, q), lam * mixture(d, q1) + (1 - lam) * mixture(d, q2), atol=1e-12)


@given(st.lists(st.floats(min_value=0.05, max_value=1.0), min_size=2, max_size=5), mixing)
@settings(max_examples=30, deadline=None)
def test_schmidt_mixture_is_a_density_matrix(raw, q):
    gammas = SchmidtCoefficients.normalized(raw)
    rho = mixed_state(MixedStateParams(d=gammas.d, q=q, psi=schmidt_state(gammas)))
    assert abs(np.trace(rho).real - 1.0) < 1e-10
    assert np.linalg.eigvalsh(rho).min() > -1e-12


def test_uniform_gammas_give_max_entangled():
    assert np.allclose(schmidt_state(uniform_gammas(4)), max_entangled(4))
