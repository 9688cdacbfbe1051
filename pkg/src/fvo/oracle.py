"""Finite-difference ground truth for the radial eigenvalue problems.

The oracle only sees the coefficients of the radial equation

    psi'' + psi'/r + [W(E) - zeta_eff^2/r^2 - m^2 w^2 r^2 - 2 lambda E / r] psi = 0,

never a closed-form spectrum. The operator is discretised as a
finite-volume scheme on uniform cells over [0, r_max] (see ``_matrix``);
after symmetrisation by the cell masses it is symmetric tridiagonal.
Eigenvalues come from Sturm-sequence bisection, and every solve is
repeated on a doubled grid for a Richardson estimate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import ConvergenceError, DomainError
from .spectra import ScenarioSpec


@dataclass
class OracleConfig:
    r_max: Optional[float] = None
    grid_points: int = 4000
    fixed_point_tol: float = 1e-10
    max_fixed_point_iters: int = 100
    damping: float = 0.5
    states_requested: int = 1

    def __post_init__(self):
        if self.grid_points < 200:
            raise DomainError("grid_points must be at least 200")
        if self.r_max is not None and not self.r_max > 0:
            raise DomainError("r_max must be positive")
        if not 0 < self.damping <= 1:
            raise DomainError("damping must lie in (0, 1]")
        if self.states_requested < 1:
            raise DomainError("states_requested must be at least 1")


@dataclass
class OracleResult:
    eigenvalues: np.ndarray
    grid_convergence: np.ndarray
    iterations: int = 0
    coarse: Optional[np.ndarray] = None
    fine: Optional[np.ndarray] = None
    partial: bool = False
    r_max: float = 0.0
    notes: List[str] = field(default_factory=list)


@dataclass(frozen=True)
class RadialOperator:
    """Liouville-form potential V_eff(r) plus the map between W and E.

    u'' + [W(E) - V_eff(r)] u = 0, u = sqrt(r) psi, with
    V_eff = (zeta_eff^2 - 1/4)/r^2 + m^2 w^2 r^2 + 2 lambda E / r and
    W(E) = E^2 - m^2 - K^2 + 2 m w.
    """

    centrifugal: float
    confinement: float
    coulomb: float
    threshold: float
    shift: float

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        return (self.centrifugal - 0.25) / r**2 + self.confinement * r**2 + self.coulomb / r

    def w_of_energy(self, E: float) -> float:
        return E * E - self.threshold + self.shift

    def energy_of_w(self, W: float, branch: int = 1) -> float:
        radicand = W + self.threshold - self.shift
        if radicand < 0:
            raise DomainError("eigenvalue maps to an imaginary energy")
        return branch * math.sqrt(radicand)

    @property
    def supports_bound_states(self) -> bool:
        return self.confinement > 0 or self.coulomb < 0


def effective_potential(spec: ScenarioSpec, E_guess: float = 0.0) -> RadialOperator:
    """Coefficients of the radial equation of ``spec`` with E frozen at E_guess."""
    qn = spec.qn
    with_coulomb = spec.kind in ("coulomb", "oscillator_coulomb")
    with_osc = spec.kind in ("oscillator", "oscillator_coulomb")
    lam = qn.lam if with_coulomb else 0.0
    zeta_eff_sq = spec.gamma_abs**2  # zeta^2 - lambda^2, checks criticality
    return RadialOperator(
        centrifugal=zeta_eff_sq if with_coulomb else spec.zeta**2,
        confinement=(qn.m * qn.omega) ** 2 if with_osc else 0.0,
        coulomb=2.0 * lam * E_guess,
        threshold=qn.m**2 + qn.K**2,
        shift=2.0 * qn.m * qn.omega if with_osc else 0.0,
    )


def sturm_count(diag: np.ndarray, off: np.ndarray, x: float) -> int:
    """Number of eigenvalues below x of the symmetric tridiagonal (diag, off)."""
    count = 0
    q = 1.0
    tiny = np.finfo(float).tiny
    for i in range(diag.size):
        b2 = off[i - 1] ** 2 if i > 0 else 0.0
        q = diag[i] - x - (b2 / q if i > 0 else 0.0)
        if q == 0.0:
            q = -tiny
        if q < 0:
            count += 1
    return count


def _grid(r_max: float, points: int):
    h = r_max / points
    r = (np.arange(points) + 0.5) * h
    return r, h


def _cell_moment(r_hi, r_lo, q):
    """Integral of r^q over [r_lo, r_hi], q > -1."""
    return (r_hi ** (q + 1) - r_lo ** (q + 1)) / (q + 1)


def _matrix(op: RadialOperator, r_max: float, points: int):
    """Finite-volume matrix for psi = r^nu phi, nu = min(|zeta_eff|, 1).

    phi obeys -(r^p phi')' / r^p + [(zeta_eff^2 - nu^2)/r^2 + m^2 w^2 r^2
    + c/r] phi = W phi with p = 2 nu + 1. The weight vanishes on the axis,
    so the flux through r = 0 drops out, and phi is smooth there. Cell
    integrals of the weight and of each power-law term are exact, which
    keeps the 1/r and 1/r^2 terms accurate in the first cells. Symmetrised
    with the cell masses; Dirichlet wall at r_max via a ghost cell.
    """
    zeta_eff = math.sqrt(op.centrifugal)
    nu = min(zeta_eff, 1.0)
    p = 2.0 * nu + 1.0
    rest = op.centrifugal - nu * nu
    h = r_max / points
    edges = np.arange(points + 1) * h
    lo, hi = edges[:-1], edges[1:]
    mass = _cell_moment(hi, lo, p)
    pot = op.confinement * _cell_moment(hi, lo, p + 2.0) + op.coulomb * _cell_moment(hi, lo, p - 1.0)
    if rest > 0:
        pot = pot + rest * _cell_moment(hi, lo, p - 2.0)
    w = hi**p / h
    flux_right = w.copy()
    flux_right[-1] *= 2.0
    flux_left = np.concatenate(([0.0], w[:-1]))
    diag = (flux_right + flux_left + pot) / mass
    off = -w[:-1] / np.sqrt(mass[:-1] * mass[1:])
    return diag, off, h


def _lowest(diag, off, k):
    return eigh_tridiagonal(
        diag, off, eigvals_only=True, select="i", select_range=(0, k - 1), lapack_driver="stebz"
    )


def _richardson(coarse, fine, h1, h2):
    return (h1 * h1 * fine - h2 * h2 * coarse) / (h1 * h1 - h2 * h2)


def radial_eigensolve(
    potential: RadialOperator,
    energy_of_w: Optional[Callable[[float], float]] = None,
    config: Optional[OracleConfig] = None,
    refine: bool = True,
) -> OracleResult:
    """Lowest ``config.states_requested`` eigenvalues W of -u'' + V_eff u.

    ``energy_of_w`` maps W to the reported quantity (E, usually); it must be
    increasing. States whose W exceeds V_eff(r_max) feel the wall rather
    than the potential; they are dropped and the result flagged partial.
    """
    if config is None or config.r_max is None:
        raise DomainError("radial_eigensolve needs config.r_max")
    if not potential.supports_bound_states:
        raise DomainError("potential is neither confining nor attractive: no bound states")
    k = config.states_requested
    r_max = config.r_max
    n1 = config.grid_points
    d1, e1, h1 = _matrix(potential, r_max, n1)
    wall = float(potential(np.array([r_max]))[0])
    n_bound = sturm_count(d1, e1, wall)
    k_used = min(k, n_bound)
    result = OracleResult(
        eigenvalues=np.empty(0), grid_convergence=np.empty(0), r_max=r_max
    )
    if k_used < k:
        result.partial = True
        result.notes.append(f"only {n_bound} states below V_eff(r_max); requested {k}")
    if k_used == 0:
        return result
    w1 = _lowest(d1, e1, k_used)
    if refine:
        d2, e2, h2 = _matrix(potential, r_max, 2 * n1)
        w2 = _lowest(d2, e2, k_used)
        w_ext = _richardson(w1, w2, h1, h2)
    else:
        w2 = w1
        w_ext = w1
    conv = energy_of_w if energy_of_w is not None else (lambda w: w)
    values = np.array([conv(w) for w in w_ext])
    fine = np.array([conv(w) for w in w2])
    result.eigenvalues = values
    result.grid_convergence = np.abs(values - fine)
    result.coarse = np.array([conv(w) for w in w1])
    result.fine = fine
    return result


def default_r_max(spec: ScenarioSpec, n: int) -> float:
    """Box size covering the classically allowed region plus the decay tail."""
    qn = spec.qn
    if qn.omega > 0:
        return 6.0 * math.sqrt((2.0 * (n + spec.gamma_abs) + 3.0) / (qn.m * qn.omega))
    raise DomainError("pure Coulomb boxes are sized from the running energy")


def oscillator_levels(spec: ScenarioSpec, n_states: int, config: Optional[OracleConfig] = None):
    """Linear problem (no Coulomb term): the lowest n_states energies."""
    if spec.kind != "oscillator":
        raise DomainError("oscillator_levels needs an oscillator scenario")
    config = config or OracleConfig()
    op = effective_potential(spec)
    cfg = OracleConfig(
        r_max=config.r_max or default_r_max(spec, n_states - 1),
        grid_points=config.grid_points,
        states_requested=n_states,
    )
    return radial_eigensolve(op, op.energy_of_w, cfg)


def _fixed_point(spec, level_index, branch, E0, r_max, points, config, tol, damping):
    """Damped iteration E <- (1-d) E + d E_new(E) on a fixed grid."""
    trace = [E0]
    E = E0
    k = level_index + 1
    for it in range(1, config.max_fixed_point_iters + 1):
        op = effective_potential(spec, E)
        d, e, _ = _matrix(op, r_max, points)
        w = _lowest(d, e, k)[level_index]
        E_new = op.energy_of_w(w, branch)
        E_next = (1.0 - damping) * E + damping * E_new
        trace.append(E_next)
        if abs(E_next - E) <= tol:
            return E_next, it, trace
        E = E_next
    raise ConvergenceError(
        f"fixed point did not converge in {config.max_fixed_point_iters} iterations",
        trace=trace,
    )


def _oscillating(trace) -> bool:
    steps = np.diff(trace[-8:])
    if steps.size < 4:
        return False
    alternating = np.all(steps[1:] * steps[:-1] < 0)
    return bool(alternating and abs(steps[-1]) >= 0.9 * abs(steps[-3]))


def _robust_fixed_point(spec, level_index, branch, E0, r_max, points, config, tol):
    try:
        return _fixed_point(
            spec, level_index, branch, E0, r_max, points, config, tol, config.damping
        )
    except ConvergenceError as err:
        if not _oscillating(err.trace):
            raise
    return _fixed_point(
        spec, level_index, branch, E0, r_max, points, config, tol, 0.5 * config.damping
    )


def nonlinear_eigensolve(
    spec: ScenarioSpec,
    level_index: int,
    config: Optional[OracleConfig] = None,
    branch: int = 1,
) -> OracleResult:
    """Energy of radial state ``level_index`` when the potential depends on E.

    ``branch`` selects the sign of E. With the (E - lambda/r)^2 coupling a
    pure Coulomb problem binds only on the branch with lambda E < 0; the
    other branch comes back empty and flagged partial.
    """
    if spec.kind not in ("coulomb", "oscillator_coulomb"):
        raise DomainError("nonlinear_eigensolve needs a Coulomb scenario")
    if branch not in (1, -1):
        raise DomainError("branch must be +1 or -1")
    config = config or OracleConfig()
    qn = spec.qn
    threshold = qn.rest_energy
    points = config.grid_points
    tol = config.fixed_point_tol
    notes: List[str] = []

    if spec.kind == "oscillator_coulomb":
        r_max = config.r_max or default_r_max(spec, level_index)
        # start from the same problem with the Coulomb term switched off
        op0 = effective_potential(spec, 0.0)
        d, e, _ = _matrix(op0, r_max, points)
        w0 = _lowest(d, e, level_index + 1)[level_index]
        E0 = op0.energy_of_w(w0, branch)
        if qn.lam == 0:
            cfg = OracleConfig(r_max=r_max, grid_points=points, states_requested=level_index + 1)
            res = radial_eigensolve(op0, lambda w: op0.energy_of_w(w, branch), cfg)
            res.eigenvalues = res.eigenvalues[level_index:]
            res.grid_convergence = res.grid_convergence[level_index:]
            res.iterations = 1
            return res
    else:
        if qn.lam == 0 or qn.lam * branch > 0:
            res = OracleResult(eigenvalues=np.empty(0), grid_convergence=np.empty(0), partial=True)
            res.notes.append("no bound state: Coulomb term is repulsive on this branch")
            return res
        # size the box from the running energy until it settles
        E = branch * threshold * (1.0 - 1e-3)
        r_max = config.r_max
        if r_max is None:
            for _ in range(config.max_fixed_point_iters):
                kt = math.sqrt(max(threshold**2 - E * E, 1e-300))
                r_try = 40.0 / kt
                op = effective_potential(spec, E)
                d, e, _ = _matrix(op, r_try, points)
                w = _lowest(d, e, level_index + 1)[level_index]
                if w >= 0:
                    raise ConvergenceError("level rose above threshold while sizing the box")
                E_new = (1.0 - config.damping) * E + config.damping * op.energy_of_w(w, branch)
                if abs(E_new - E) <= 1e-7 * threshold:
                    E = E_new
                    break
                E = E_new
            r_max = 40.0 / math.sqrt(threshold**2 - E * E)
            notes.append(f"box sized to 40 decay lengths: r_max={r_max:.6g}")
        E0 = E

    E1, it1, _ = _robust_fixed_point(spec, level_index, branch, E0, r_max, points, config, tol)
    E2, _, _ = _robust_fixed_point(spec, level_index, branch, E1, r_max, 2 * points, config, tol)
    _, h1 = _grid(r_max, points)
    _, h2 = _grid(r_max, 2 * points)
    E_ext = _richardson(E1, E2, h1, h2)

    # self-consistency: one more solve at the converged energy
    op = effective_potential(spec, E1)
    d, e, _ = _matrix(op, r_max, points)
    E_check = op.energy_of_w(_lowest(d, e, level_index + 1)[level_index], branch)
    notes.append(f"self-consistency |E(E*) - E*| = {abs(E_check - E1):.3e}")

    return OracleResult(
        eigenvalues=np.array([E_ext]),
        grid_convergence=np.array([abs(E_ext - E2)]),
        iterations=it1,
        coarse=np.array([E1]),
        fine=np.array([E2]),
        r_max=r_max,
        notes=notes,
    )


def radial_residual(spec: ScenarioSpec, E: float, psi: Callable, r, h: float = 1e-3) -> float:
    """max |L psi| / max |psi| over r for the radial equation of ``spec``.

    Derivatives are five-point central differences with step h.
    """
    op = effective_potential(spec, E)
    r = np.asarray(r, dtype=float)
    if np.any(r - 2 * h <= 0):
        raise DomainError("residual points must satisfy r > 2h")
    f0 = psi(r)
    fp1, fm1, fp2, fm2 = psi(r + h), psi(r - h), psi(r + 2 * h), psi(r - 2 * h)
    d1 = (-fp2 + 8 * fp1 - 8 * fm1 + fm2) / (12 * h)
    d2 = (-fp2 + 16 * fp1 - 30 * f0 + 16 * fm1 - fm2) / (12 * h * h)
    v_psi = op(r) + 0.25 / r**2
    res = d2 + d1 / r + (op.w_of_energy(E) - v_psi) * f0
    return float(np.max(np.abs(res)) / np.max(np.abs(f0)))
