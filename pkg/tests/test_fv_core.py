import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from fvo.errors import DomainError
from fvo.fv_core import (
    PAULI,
    assemble_two_component,
    charge_density,
    fv_hamiltonian_symbol,
    pseudo_hermiticity_residual,
)


def test_pauli_algebra():
    eye = np.eye(2)
    for t in (PAULI.tau1, PAULI.tau2, PAULI.tau3):
        np.testing.assert_array_equal(t @ t, eye)
    np.testing.assert_array_equal(PAULI.tau1 @ PAULI.tau2, 1j * PAULI.tau3)
    np.testing.assert_array_equal(PAULI.tau2 @ PAULI.tau3, 1j * PAULI.tau1)


@pytest.mark.parametrize("p,m,e", [(0.0, 1.0, 1.0), (1.0, 1.0, math.sqrt(2)), (3.0, 4.0, 5.0)])
def test_symbol_eigenvalues(p, m, e):
    eig = np.sort(np.linalg.eigvals(fv_hamiltonian_symbol(p, m)).real)
    np.testing.assert_allclose(eig, [-e, e], rtol=1e-13)


def test_symbol_at_rest_is_tau3():
    np.testing.assert_array_equal(fv_hamiltonian_symbol(0.0, 1.0), np.diag([1.0, -1.0]))


def test_symbol_rejects_nonpositive_mass():
    with pytest.raises(DomainError):
        fv_hamiltonian_symbol(1.0, 0.0)


@settings(max_examples=200)
@given(p=st.floats(0, 10), m=st.sampled_from([0.5, 1.0, 2.0]))
def test_symbol_dispersion_and_pseudo_hermiticity(p, m):
    H = fv_hamiltonian_symbol(p, m)
    e = math.sqrt(p * p + m * m)
    eig = np.sort(np.linalg.eigvals(H).real)
    np.testing.assert_allclose(eig, [-e, e], rtol=1e-12)
    assert pseudo_hermiticity_residual(H) <= 1e-14


def test_pseudo_hermiticity_examples():
    assert pseudo_hermiticity_residual(PAULI.tau3) == 0.0
    assert pseudo_hermiticity_residual(PAULI.tau2) == pytest.approx(2.0)


def test_assembly_examples():
    mode = assemble_two_component(np.ones(3), E=2.0, N_param=1.0)
    np.testing.assert_array_equal(mode.phi1, 1.5)
    np.testing.assert_array_equal(mode.phi2, -0.5)
    np.testing.assert_array_equal(charge_density(mode), 2.0)
    at_rest = assemble_two_component(np.ones(3), E=1.0, N_param=1.0)
    np.testing.assert_array_equal(at_rest.phi2, 0.0)
    zero = assemble_two_component(np.ones(3), E=0.0, N_param=1.0)
    np.testing.assert_array_equal(zero.phi1, zero.phi2)
    np.testing.assert_array_equal(charge_density(zero), 0.0)


def test_assembly_rejects_zero_splitting():
    with pytest.raises(DomainError):
        assemble_two_component(np.ones(2), 1.0, 0.0)


@given(
    psi=arrays(np.float64, st.integers(1, 30), elements=st.floats(-10, 10)),
    E=st.floats(-5, 5),
    N=st.floats(0.1, 5) | st.floats(-5, -0.1),
)
def test_assembly_inverts_and_charge_identity(psi, E, N):
    mode = assemble_two_component(psi, E, N)
    np.testing.assert_allclose(mode.phi1 + mode.phi2, psi, atol=1e-12)
    np.testing.assert_allclose(mode.phi1 - mode.phi2, (E / N) * psi, atol=1e-12 * max(1, abs(E / N)) * 10)
    scale = max(1.0, float(np.max(psi**2))) * max(1.0, abs(E / N))
    np.testing.assert_allclose(charge_density(mode), (E / N) * psi**2, atol=1e-12 * scale)
