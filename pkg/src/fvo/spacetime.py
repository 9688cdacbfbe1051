"""Cosmic-dislocation geometry and the quantities derived from it.

Coordinates are ordered (t, r, phi, z) with signature (+, -, -, -). The line
element is

    ds^2 = dt^2 - dr^2 - (alpha^2 r^2 + chi^2) dphi^2 + 2 chi dphi dz - dz^2

with angular parameter ``alpha`` (deficit 2*pi*(1 - alpha)) and screw
distortion ``chi`` (Burgers vector length 2*pi*chi).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import DomainError, OvercriticalCouplingError

MODES = ("rederived", "as_printed")


@dataclass(frozen=True)
class SpacetimeParams:
    alpha: float = 1.0
    chi: float = 0.0
    burgers: float = field(init=False)
    mass_density: float = field(init=False)

    def __post_init__(self):
        if not (0.0 < self.alpha <= 1.0) or not math.isfinite(self.alpha):
            raise DomainError(f"alpha must lie in (0, 1], got {self.alpha!r}")
        if not math.isfinite(self.chi):
            raise DomainError(f"chi must be finite, got {self.chi!r}")
        object.__setattr__(self, "burgers", 2.0 * math.pi * self.chi)
        object.__setattr__(self, "mass_density", (1.0 - self.alpha) / 4.0)


@dataclass(frozen=True)
class QuantumNumbers:
    """Mode labels (j, K, n) together with the particle data.

    ``N_param`` is the splitting parameter of the generalized FV
    transformation; ``None`` selects the original choice N = m.
    """

    j: int = 0
    K: float = 0.0
    n: int = 0
    m: float = 1.0
    omega: float = 0.0
    lam: float = 0.0
    N_param: Optional[float] = None

    def __post_init__(self):
        if isinstance(self.j, bool) or int(self.j) != self.j:
            raise DomainError(f"j must be an integer, got {self.j!r}")
        object.__setattr__(self, "j", int(self.j))
        if isinstance(self.n, bool) or int(self.n) != self.n or self.n < 0:
            raise DomainError(f"n must be a nonnegative integer, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))
        if not self.m > 0:
            raise DomainError(f"mass m must be positive, got {self.m!r}")
        if not self.omega >= 0:
            raise DomainError(f"omega must be nonnegative, got {self.omega!r}")
        if not math.isfinite(self.lam) or not math.isfinite(self.K):
            raise DomainError("K and lambda must be finite")
        if self.N_param is None:
            object.__setattr__(self, "N_param", float(self.m))
        elif self.N_param == 0 or not math.isfinite(self.N_param):
            raise DomainError("N_param must be a nonzero real number")

    @property
    def rest_energy(self) -> float:
        """sqrt(m^2 + K^2), the continuum threshold."""
        return math.hypot(self.m, self.K)


@dataclass(frozen=True)
class QuantumInvariants:
    zeta: float
    sigma_sq: float
    kappa: Optional[float]
    gamma_abs: float
    theta: Optional[float]
    beta_sq: float
    delta_osc: float
    delta_coul: Optional[float]


@dataclass(frozen=True)
class GfvtCoefficients:
    """Coefficient functions of the reduced operator T.

    T = second_deriv d_rr + first_deriv(r) d_r + phi_phi(r) d_phiphi
        + z_z(r) d_zz + cross_phi_z(r) d_phi d_z + constant
    """

    second_deriv: Callable[[float], float]
    first_deriv: Callable[[float], float]
    phi_phi: Callable[[float], float]
    z_z: Callable[[float], float]
    cross_phi_z: Callable[[float], float]
    constant: float
    Y_term: float
    F_factor: Callable[[float], float]
    U_vector: Callable[[float], np.ndarray]

    def separated_potential(self, j: int, K: float, r: float) -> float:
        """Multiplicative term left after d_phi -> i j, d_z -> i K."""
        return float(
            -self.phi_phi(r) * j * j
            - self.z_z(r) * K * K
            - self.cross_phi_z(r) * j * K
            + self.constant
        )


def _check_radius(r):
    if not np.all(np.real(r) > 0):
        raise DomainError(f"radius must be positive, got {r!r}")


def _metric_matrix(alpha, chi, r):
    # accepts complex r so that complex-step derivatives can be taken
    dtype = complex if np.iscomplexobj(r) else float
    g = np.zeros((4, 4), dtype=dtype)
    g[0, 0] = 1.0
    g[1, 1] = -1.0
    g[2, 2] = -(alpha * alpha * r * r + chi * chi)
    g[2, 3] = g[3, 2] = chi
    g[3, 3] = -1.0
    return g


def metric(params: SpacetimeParams, r: float) -> np.ndarray:
    """Covariant metric g_{mu nu} at radius ``r``."""
    _check_radius(r)
    return _metric_matrix(params.alpha, params.chi, float(r))


def inverse_metric(params: SpacetimeParams, r: float) -> np.ndarray:
    """Contravariant metric g^{mu nu}, written out in closed form."""
    _check_radius(r)
    a2r2 = params.alpha**2 * r * r
    gi = np.zeros((4, 4))
    gi[0, 0] = 1.0
    gi[1, 1] = -1.0
    gi[2, 2] = -1.0 / a2r2
    gi[2, 3] = gi[3, 2] = -params.chi / a2r2
    gi[3, 3] = -(1.0 + params.chi**2 / a2r2)
    return gi


def metric_determinant(params: SpacetimeParams, r: float) -> float:
    """det g = -alpha^2 r^2 (the phi-z block has determinant alpha^2 r^2)."""
    _check_radius(r)
    return -((params.alpha * r) ** 2)


def gfvt_coefficients(params: SpacetimeParams, m: float) -> GfvtCoefficients:
    """Reduce the GFVT operator T to its coefficient functions.

    Everything is built from the metric itself: G^{ij} = g^{ij} -
    g^{0i} g^{0j} / g^{00}, F = sqrt(g^{00} sqrt(-g)), U^i = sqrt(-g) g^{0i}.
    The radial first-derivative coefficient (1/sqrt(-g)) d_r(sqrt(-g) G^{rr}
    / g^{00}) is evaluated with a complex-step derivative, which is exact to
    rounding for the analytic metric entries.
    """
    if not m > 0:
        raise DomainError("mass must be positive")
    alpha, chi = params.alpha, params.chi

    def parts(r):
        g = _metric_matrix(alpha, chi, r)
        gi = np.linalg.inv(g)
        sqrt_mg = np.sqrt(-np.linalg.det(g))
        G = gi[1:, 1:] - np.outer(gi[0, 1:], gi[0, 1:]) / gi[0, 0]
        return gi, sqrt_mg, G

    def entry(i, k, scale=1.0):
        def f(r):
            _check_radius(r)
            gi, _, G = parts(float(r))
            return float(np.real(scale * G[i, k] / gi[0, 0]))

        return f

    step = 1e-30

    def first_deriv(r):
        _check_radius(r)
        r = float(r)
        # the metric depends on r only, so d_i(...) reduces to d_r of the radial flux
        gi_c, sq_c, G_c = parts(complex(r, step))
        d_flux = np.imag(sq_c * G_c[0, 0] / gi_c[0, 0]) / step
        _, sq, _ = parts(r)
        return float(d_flux / np.real(sq))

    def F_factor(r):
        _check_radius(r)
        gi, sq, _ = parts(float(r))
        return float(np.sqrt(np.real(gi[0, 0] * sq)))

    def U_vector(r):
        _check_radius(r)
        gi, sq, _ = parts(float(r))
        return np.real(sq * gi[0, 1:])

    # Y = 1/2 {d_i, sqrt(-g) g^{0i}/g^{00}}: both the multiplier and its
    # divergence must vanish; sample them at a few radii.
    y_max = 0.0
    for r in (0.5, 1.0, 2.0):
        gi, sq, _ = parts(r)
        mult = np.abs(np.real(sq * gi[0, 1:] / gi[0, 0]))
        gi_c, sq_c, _ = parts(complex(r, step))
        div = abs(np.imag(sq_c * gi_c[0, 1] / gi_c[0, 0]) / step)
        y_max = max(y_max, float(mult.max()), float(div))

    gi0, _, _ = parts(1.0)
    return GfvtCoefficients(
        second_deriv=entry(0, 0),
        first_deriv=first_deriv,
        phi_phi=entry(1, 1),
        z_z=entry(2, 2),
        cross_phi_z=entry(1, 2, scale=2.0),
        constant=float(m * m / gi0[0, 0]),
        Y_term=y_max,
        F_factor=F_factor,
        U_vector=U_vector,
    )


def _central_derivative(f, x, h, order):
    if order == 2:
        return (f(x + h) - f(x - h)) / (2.0 * h)
    if order == 4:
        return (-f(x + 2 * h) + 8 * f(x + h) - 8 * f(x - h) + f(x - 2 * h)) / (12.0 * h)
    raise ValueError("order must be 2 or 4")


def ricci_scalar_numeric(
    params: SpacetimeParams, r: float, h: Optional[float] = None, order: int = 4
) -> float:
    """Ricci scalar from finite-difference Christoffel symbols.

    Both the metric derivative and the Christoffel derivative are central
    differences in r with step ``h`` (default 1e-4 * max(1, r)). ``order=2``
    uses the three-point stencil, ``order=4`` the five-point one; the
    three-point error behaves like h^2 / r^4 and is too large near the axis
    for a 1e-6 check at h = 1e-3.
    """
    if h is None:
        h = 1e-4 * max(1.0, r)
    reach = 2 * h if order == 2 else 4 * h
    if not (h > 0 and r > reach):
        raise DomainError(f"need r > {reach} for step h={h} (order {order})")

    def christoffel(rr):
        gi = np.linalg.inv(_metric_matrix(params.alpha, params.chi, rr))
        dg = np.zeros((4, 4, 4))  # dg[k, i, j] = d_k g_ij
        dg[1] = _central_derivative(
            lambda x: _metric_matrix(params.alpha, params.chi, x), rr, h, order
        )
        # Gamma^l_{mn} = 1/2 g^{lk} (d_m g_kn + d_n g_km - d_k g_mn)
        t = dg.transpose(1, 0, 2) + dg.transpose(1, 2, 0) - dg
        return 0.5 * np.einsum("lk,kmn->lmn", gi, t)

    gam = christoffel(r)
    dgam = np.zeros((4, 4, 4, 4))  # dgam[k] = d_k Gamma
    dgam[1] = _central_derivative(christoffel, r, h, order)
    ricci = (
        np.einsum("llmn->mn", dgam)
        - np.einsum("nlml->mn", dgam)
        + np.einsum("llk,kmn->mn", gam, gam)
        - np.einsum("lnk,kml->mn", gam, gam)
    )
    return float(np.sum(inverse_metric(params, r) * ricci))


def zeta(params: SpacetimeParams, j: int, K: float) -> float:
    return (j + params.chi * K) / params.alpha


def gamma_abs(zeta_value: float, lam: float) -> float:
    """Indicial exponent sqrt(zeta^2 - lambda^2); rejects overcritical coupling."""
    radicand = zeta_value * zeta_value - lam * lam
    if radicand < 0:
        raise OvercriticalCouplingError(
            f"overcritical coupling: zeta^2={zeta_value**2:.6g} < lambda^2={lam**2:.6g}"
        )
    return math.sqrt(radicand)


def coulomb_delta(lam: float, E: float, m: float, omega: float, mode: str = "rederived") -> float:
    """Scaled Coulomb strength in the K = sqrt(m omega) r variable.

    ``rederived`` rescales the -2 lambda E / r term: 2 lambda E / sqrt(m omega).
    ``as_printed`` uses 2 lambda sqrt(m / omega), which drops E.
    """
    if mode not in MODES:
        raise DomainError(f"unknown mode {mode!r}")
    if not omega > 0:
        raise DomainError("omega must be positive")
    if mode == "rederived":
        return 2.0 * lam * E / math.sqrt(m * omega)
    return 2.0 * lam * math.sqrt(m / omega)


def quantum_invariants(
    params: SpacetimeParams, qn: QuantumNumbers, E: float, mode: str = "rederived"
) -> QuantumInvariants:
    z = zeta(params, qn.j, qn.K)
    g = gamma_abs(z, qn.lam)
    free_sq = E * E - qn.m**2 - qn.K**2
    beta_sq = free_sq + 2.0 * qn.m * qn.omega
    if qn.omega > 0:
        theta = beta_sq / (qn.m * qn.omega) - 2.0 * (g + 1.0)
        delta_coul = coulomb_delta(qn.lam, E, qn.m, qn.omega, mode)
    else:
        theta = None
        delta_coul = None
    return QuantumInvariants(
        zeta=z,
        sigma_sq=z * z,
        kappa=math.sqrt(free_sq) if free_sq > 0 else None,
        gamma_abs=g,
        theta=theta,
        beta_sq=beta_sq,
        delta_osc=beta_sq,
        delta_coul=delta_coul,
    )
