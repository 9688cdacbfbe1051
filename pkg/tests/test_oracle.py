import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fvo.errors import ConvergenceError, DomainError, OvercriticalCouplingError
from fvo.oracle import (
    OracleConfig,
    RadialOperator,
    _matrix,
    default_r_max,
    effective_potential,
    nonlinear_eigensolve,
    oscillator_levels,
    radial_eigensolve,
    radial_residual,
    sturm_count,
)
from fvo.spacetime import QuantumNumbers, SpacetimeParams
from fvo.spectra import ScenarioSpec, coulomb_energy, fvo_coulomb_quantization, kgo_energy


def osc(alpha=1.0, chi=0.0, **qn):
    qn.setdefault("omega", 1.0)
    return ScenarioSpec("oscillator", SpacetimeParams(alpha, chi), QuantumNumbers(**qn))


def coul(alpha=2**-0.5, **qn):
    qn.setdefault("j", 1)
    qn.setdefault("lam", 1.0)
    return ScenarioSpec("coulomb", SpacetimeParams(alpha), QuantumNumbers(**qn))


# -- configuration ------------------------------------------------------------


@pytest.mark.parametrize(
    "kwargs",
    [dict(grid_points=100), dict(r_max=0.0), dict(damping=0.0), dict(damping=1.5), dict(states_requested=0)],
)
def test_config_validation(kwargs):
    with pytest.raises(DomainError):
        OracleConfig(**kwargs)


# -- effective potential -------------------------------------------------------


def test_effective_potential_examples():
    free = effective_potential(ScenarioSpec("free", qn=QuantumNumbers(j=1)))
    assert free(2.0) == pytest.approx(0.75 / 4)
    o0 = effective_potential(osc(j=0))
    o1 = effective_potential(osc(j=1))
    assert o1(2.0) - o0(2.0) == pytest.approx(1.0 / 4)
    assert o0(2.0) == pytest.approx(-0.25 / 4 + 4.0)
    c = effective_potential(coul(), E_guess=0.8)
    c0 = effective_potential(coul(lam=0.0))
    r = np.array([0.5, 1.0, 3.0])
    # zeta_eff^2 shifts by lambda^2 too, so isolate the 1/r piece
    np.testing.assert_allclose(c(r) - c0(r) + 1.0 / r**2, 1.6 / r, rtol=1e-14)


def test_energy_map_round_trip():
    op = effective_potential(osc(K=0.5, m=2.0, omega=0.3))
    for E in (2.5, 3.0):
        assert op.energy_of_w(op.w_of_energy(E)) == pytest.approx(E, rel=1e-15)
        assert op.energy_of_w(op.w_of_energy(E), branch=-1) == pytest.approx(-E, rel=1e-15)
    with pytest.raises(DomainError):
        op.energy_of_w(-10.0)


def test_effective_potential_rejects_overcritical():
    with pytest.raises(OvercriticalCouplingError):
        effective_potential(coul(alpha=1.0, j=0, lam=0.5))


# -- Sturm counting ------------------------------------------------------------


@settings(max_examples=100, deadline=None)
@given(
    seed=st.integers(0, 2**32 - 1),
    size=st.integers(1, 40),
    x=st.floats(-3, 3),
)
def test_sturm_count_matches_dense(seed, size, x):
    rng = np.random.default_rng(seed)
    d = rng.normal(size=size)
    e = rng.normal(size=size - 1)
    eig = np.linalg.eigvalsh(np.diag(d) + np.diag(e, 1) + np.diag(e, -1))
    if np.min(np.abs(eig - x)) < 1e-9:
        return
    assert sturm_count(d, e, x) == int(np.sum(eig < x))


def test_matrix_is_symmetric_tridiagonal_with_sorted_spectrum():
    op = effective_potential(osc(j=1))
    d, e, h = _matrix(op, 8.0, 300)
    assert d.size == 300 and e.size == 299
    assert h == pytest.approx(8.0 / 300)
    eig = np.linalg.eigvalsh(np.diag(d) + np.diag(e, 1) + np.diag(e, -1))
    assert sturm_count(d, e, eig[3] + 1e-9) == 4


# -- linear eigensolve ---------------------------------------------------------


def test_flat_oscillator_example():
    res = oscillator_levels(osc(), 3, OracleConfig(r_max=10.0))
    np.testing.assert_allclose(res.eigenvalues, [1.0, math.sqrt(5), 3.0], atol=1e-6)
    assert np.all(np.diff(res.eigenvalues) > 0)
    assert res.grid_convergence.shape == res.eigenvalues.shape
    assert not res.partial


@pytest.mark.parametrize("j", [1, 2, 3])
def test_eigenvalues_invariant_under_j_flip(j):
    a = oscillator_levels(osc(j=j), 2).eigenvalues
    b = oscillator_levels(osc(j=-j), 2).eigenvalues
    np.testing.assert_array_equal(a, b)


@pytest.mark.parametrize(
    "spec", [osc(j=1), osc(j=2), osc(alpha=0.5, chi=0.25, K=0.5, j=1), osc(alpha=0.8, j=0, K=0.5, chi=0.25)]
)
def test_second_order_convergence(spec):
    exact = np.array([kgo_energy(spec, n)[0] for n in range(3)])
    res = oscillator_levels(spec, 3, OracleConfig(grid_points=400))
    ratio = (res.coarse - exact) / (res.fine - exact)
    assert np.all((ratio > 3.5) & (ratio < 4.5))


def test_gaussian_ground_state_superconverges():
    # zeta = 0 ground state: the h^2 term cancels and the error falls by ~16
    spec = osc(j=0)
    exact = np.array([kgo_energy(spec, n)[0] for n in range(3)])
    res = oscillator_levels(spec, 3, OracleConfig(grid_points=400))
    ratio = (res.coarse - exact) / (res.fine - exact)
    assert 14 < ratio[0] < 18
    assert np.all((ratio[1:] > 3.5) & (ratio[1:] < 4.5))


@pytest.mark.parametrize("spec", [osc(j=1), osc(alpha=0.5, chi=0.25, K=0.5, j=2, omega=0.4)])
def test_larger_box_changes_nothing(spec):
    n = 3
    base = default_r_max(spec, n - 1)
    a = oscillator_levels(spec, n, OracleConfig(r_max=base)).eigenvalues
    b = oscillator_levels(spec, n, OracleConfig(r_max=1.5 * base, grid_points=6000)).eigenvalues
    np.testing.assert_allclose(a, b, atol=1e-10)


def test_partial_result_when_box_holds_too_few_states():
    op = effective_potential(osc(j=0))
    res = radial_eigensolve(op, op.energy_of_w, OracleConfig(r_max=2.5, states_requested=6))
    assert res.partial
    assert 0 < res.eigenvalues.size < 6
    assert any("requested 6" in note for note in res.notes)


def test_radial_eigensolve_preconditions():
    op = effective_potential(osc())
    with pytest.raises(DomainError):
        radial_eigensolve(op, op.energy_of_w, OracleConfig())
    free = effective_potential(ScenarioSpec("free"))
    with pytest.raises(DomainError):
        radial_eigensolve(free, None, OracleConfig(r_max=10.0))
    with pytest.raises(DomainError):
        oscillator_levels(coul(), 2)


def test_unrefined_solve_reports_single_grid():
    op = RadialOperator(centrifugal=1.0, confinement=1.0, coulomb=0.0, threshold=1.0, shift=2.0)
    res = radial_eigensolve(op, None, OracleConfig(r_max=10.0, states_requested=2), refine=False)
    np.testing.assert_array_equal(res.grid_convergence, 0.0)
    # W = 2m w (2n + |zeta| + 1)
    np.testing.assert_allclose(res.eigenvalues, [4.0, 8.0], rtol=1e-4)


# -- nonlinear eigensolve -------------------------------------------------------


def test_coulomb_example():
    res = nonlinear_eigensolve(coul(), 0, branch=-1)
    assert res.eigenvalues[0] == pytest.approx(coulomb_energy(coul(), 0).bound, abs=1e-4)
    assert res.eigenvalues[0] == pytest.approx(-0.8320503, abs=1e-6)
    assert res.iterations <= 30


def test_coulomb_repulsive_branch_is_empty():
    res = nonlinear_eigensolve(coul(), 0, branch=1)
    assert res.partial and res.eigenvalues.size == 0


@pytest.mark.parametrize("lam", [0.3, 1.0])
@pytest.mark.parametrize("K", [0.0, 0.5])
def test_coulomb_grid_iteration_bound_and_self_consistency(lam, K):
    spec = coul(lam=lam, K=K)
    for n in range(3):
        res = nonlinear_eigensolve(spec, n, branch=-1)
        assert res.iterations <= 30
        gap = float(res.notes[-1].split("=")[-1])
        assert gap <= 1e-9
        ratio = (res.coarse - coulomb_energy(spec, n).bound) / (res.fine - coulomb_energy(spec, n).bound)
        assert 3.5 < ratio[0] < 4.5


def test_oscillator_coulomb_lambda_zero_is_linear_solve():
    spec = ScenarioSpec("oscillator_coulomb", qn=QuantumNumbers(j=1, omega=1.0, lam=0.0))
    res = nonlinear_eigensolve(spec, 1)
    assert res.iterations == 1
    lin = oscillator_levels(ScenarioSpec("oscillator", qn=spec.qn), 2, OracleConfig(r_max=res.r_max))
    assert res.eigenvalues[0] == lin.eigenvalues[1]


def test_oscillator_coulomb_at_allowed_omega():
    spec = ScenarioSpec("oscillator_coulomb", qn=QuantumNumbers(j=1, omega=1.0, lam=0.2))
    level = fvo_coulomb_quantization(spec, 1)[0]
    at = replace(spec, qn=replace(spec.qn, omega=level.omega_used))
    res = nonlinear_eigensolve(at, 0)
    assert res.eigenvalues[0] == pytest.approx(level.E_plus, abs=1e-4)


def test_nonlinear_preconditions():
    with pytest.raises(DomainError):
        nonlinear_eigensolve(osc(), 0)
    with pytest.raises(DomainError):
        nonlinear_eigensolve(coul(), 0, branch=0)


def test_nonconvergence_carries_trace():
    cfg = OracleConfig(max_fixed_point_iters=2, fixed_point_tol=1e-15, r_max=60.0, grid_points=400)
    with pytest.raises(ConvergenceError) as info:
        nonlinear_eigensolve(coul(), 0, cfg, branch=-1)
    assert len(info.value.trace) >= 2


# -- residual helper -----------------------------------------------------------


def test_radial_residual_of_exact_ground_state():
    spec = osc()
    r = np.linspace(0.1, 4, 40)
    assert radial_residual(spec, 1.0, lambda x: np.exp(-x * x / 2), r) <= 1e-8
    assert radial_residual(spec, 1.1, lambda x: np.exp(-x * x / 2), r) > 1e-2
    with pytest.raises(DomainError):
        radial_residual(spec, 1.0, np.exp, [1e-3])
