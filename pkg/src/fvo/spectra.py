"""Closed-form spectra and radial wavefunctions for the four scenarios.

Scenarios
---------
free                 continuum Bessel modes
oscillator           Klein-Gordon oscillator, 1F1 polynomials
coulomb              (E - lambda/r)^2 coupling, Whittaker/1F1 solutions
oscillator_coulomb   both; biconfluent Heun polynomials with a
                     quantized oscillator frequency

``mode="rederived"`` uses the consistent algebra; ``mode="as_printed"``
evaluates the printed Coulomb and Heun-case formulas verbatim so the two
can be compared.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np
from scipy.integrate import trapezoid
from scipy.optimize import brentq

from . import fv_core
from .errors import DomainError
from .spacetime import (
    MODES,
    QuantumNumbers,
    SpacetimeParams,
    coulomb_delta,
    gamma_abs,
    zeta,
)
from .specfun import (
    bessel_j_array,
    frobenius_coefficients,
    hyp1f1_array,
)

KINDS = ("free", "oscillator", "coulomb", "oscillator_coulomb")


@dataclass(frozen=True)
class ScenarioSpec:
    kind: str
    params: SpacetimeParams = field(default_factory=SpacetimeParams)
    qn: QuantumNumbers = field(default_factory=QuantumNumbers)
    mode: str = "rederived"

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"unknown scenario {self.kind!r}; expected one of {KINDS}")
        if self.mode not in MODES:
            raise DomainError(f"unknown mode {self.mode!r}; expected one of {MODES}")
        if self.kind in ("oscillator", "oscillator_coulomb") and not self.qn.omega > 0:
            raise DomainError(f"scenario {self.kind} needs omega > 0")

    @property
    def zeta(self) -> float:
        return zeta(self.params, self.qn.j, self.qn.K)

    @property
    def gamma_abs(self) -> float:
        lam = self.qn.lam if self.kind in ("coulomb", "oscillator_coulomb") else 0.0
        return gamma_abs(self.zeta, lam)


@dataclass
class Level:
    n: int
    E_plus: float
    E_minus: float
    omega_used: float
    constraint_residuals: Dict[str, float] = field(default_factory=dict)
    # signed energy of the branch whose potential actually binds (Coulomb cases)
    bound: Optional[float] = None
    alternatives: Dict[str, float] = field(default_factory=dict)
    delta: Optional[float] = None
    coefficients: Optional[np.ndarray] = None


@dataclass
class SpectrumResult:
    kind: str
    mode: str
    levels: List[Level]
    diagnostics: List[str] = field(default_factory=list)


@dataclass
class RadialSolution:
    grid: np.ndarray
    profile: np.ndarray
    building_blocks: Dict[str, np.ndarray]
    energy: float
    normalization: float
    notes: List[str] = field(default_factory=list)

    def two_component(self, N_param: float) -> fv_core.TwoComponentMode:
        return fv_core.assemble_two_component(self.profile, self.energy, N_param, self.grid)


def _solution(grid, blocks, energy, notes=()):
    profile = np.ones_like(grid)
    for value in blocks.values():
        profile = profile * value
    norm = float(trapezoid(np.abs(profile) ** 2 * grid, grid)) if grid.size > 1 else 0.0
    return RadialSolution(
        grid=grid,
        profile=profile,
        building_blocks=dict(blocks),
        energy=float(energy),
        normalization=norm,
        notes=list(notes),
    )


def _require(spec: ScenarioSpec, kind: str):
    if spec.kind != kind:
        raise DomainError(f"expected a {kind} scenario, got {spec.kind}")


def _grid(grid) -> np.ndarray:
    g = np.asarray(grid, dtype=float)
    if np.any(g < 0):
        raise DomainError("radial grid must be nonnegative")
    return g


# --------------------------------------------------------------------------
# free particle
# --------------------------------------------------------------------------


def free_mode(spec: ScenarioSpec, E: float, grid) -> RadialSolution:
    """psi(r) = J_|zeta|(kappa r) with kappa = sqrt(E^2 - m^2 - K^2)."""
    _require(spec, "free")
    qn = spec.qn
    radicand = E * E - qn.m**2 - qn.K**2
    if not radicand > 0:
        raise DomainError(f"below continuum threshold: E^2 - m^2 - K^2 = {radicand:.6g}")
    kappa = math.sqrt(radicand)
    grid = _grid(grid)
    blocks = {"bessel_j": bessel_j_array(abs(spec.zeta), kappa * grid)}
    return _solution(grid, blocks, E)


# --------------------------------------------------------------------------
# Klein-Gordon oscillator
# --------------------------------------------------------------------------


def kgo_energy(spec: ScenarioSpec, n: int):
    """E = +/- sqrt(4 m w n + 2 m w |j + chi K|/alpha + m^2 + K^2)."""
    _require(spec, "oscillator")
    if n < 0:
        raise DomainError("n must be nonnegative")
    qn = spec.qn
    mw = qn.m * qn.omega
    e = math.sqrt(4.0 * mw * n + 2.0 * mw * abs(spec.zeta) + qn.m**2 + qn.K**2)
    return e, -e


def _kgo_level(spec: ScenarioSpec, n: int) -> Level:
    e_plus, e_minus = kgo_energy(spec, n)
    qn = spec.qn
    mw = qn.m * qn.omega
    delta_osc = e_plus**2 - qn.m**2 - qn.K**2 + 2.0 * mw
    # polynomial condition: |sigma|/2 - delta/(4 m w) + 1/2 = -n
    residual = abs(spec.zeta) / 2.0 - delta_osc / (4.0 * mw) + 0.5 + n
    return Level(
        n=n,
        E_plus=e_plus,
        E_minus=e_minus,
        omega_used=qn.omega,
        constraint_residuals={"polynomial_condition": residual},
    )


def kgo_wavefunction(spec: ScenarioSpec, n: int, grid) -> RadialSolution:
    """(m w r^2)^{|zeta|/2} exp(-m w r^2 / 2) 1F1(-n, |zeta| + 1, m w r^2)."""
    _require(spec, "oscillator")
    grid = _grid(grid)
    qn = spec.qn
    q = qn.m * qn.omega * grid**2
    z = abs(spec.zeta)
    blocks = {
        "power": q ** (z / 2.0),
        "gaussian": np.exp(-q / 2.0),
        "hyp1f1": hyp1f1_array(-n, z + 1.0, q),
    }
    return _solution(grid, blocks, kgo_energy(spec, n)[0])


# --------------------------------------------------------------------------
# Coulomb-type coupling
# --------------------------------------------------------------------------


def coulomb_printed_energy(params: SpacetimeParams, qn: QuantumNumbers, n: int) -> float:
    """Positive branch of the printed Coulomb spectrum, evaluated verbatim."""
    a2 = params.alpha**2
    a4 = a2 * a2
    c = qn.K * params.chi + qn.j
    c2 = c * c
    lam2 = qn.lam**2
    numerator = 2.0 * ((2 * lam2 + 2 * n + 1) * a2 + 2 * c2) * math.sqrt(
        (
            (lam2 * lam2 + 2 * (n + 1) * lam2 + (n + 0.5) ** 2) * a4
            + 2 * c2 * (lam2 + n + 0.5) * a2
            + c2 * c2
        )
        * (qn.K**2 + qn.m**2)
    )
    denominator = (
        4 * lam2 * lam2
        + 8 * (n + 1) * lam2
        + (2 * n + 1) ** 2 * a4
        + 8 * c2 * (lam2 + n + 0.5) * a2
        + 4 * c
    ) ** 4
    return numerator / denominator


def coulomb_condition(spec: ScenarioSpec, E: float, n: int, orientation: str = "paper") -> float:
    """Residual of the Coulomb polynomial condition at energy ``E``.

    ``paper``: E lambda / kt = -(n + 1/2 + s), the orientation that makes the
    1F1 first parameter s + 1/2 + E lambda / kt equal to -n.
    ``positive``: E lambda / kt = +(n + 1/2 + s).
    Here kt = sqrt(m^2 + K^2 - E^2) and s = sqrt(zeta^2 - lambda^2).
    """
    qn = spec.qn
    kt = math.sqrt(qn.m**2 + qn.K**2 - E * E)
    s = spec.gamma_abs
    lhs = E * qn.lam / kt
    if orientation == "paper":
        return lhs + (n + 0.5 + s)
    if orientation == "positive":
        return lhs - (n + 0.5 + s)
    raise DomainError(f"unknown orientation {orientation!r}")


def coulomb_energy(spec: ScenarioSpec, n: int) -> Optional[Level]:
    """Bound level n of the Coulomb-type problem.

    |E| = sqrt(m^2 + K^2) (n + 1/2 + s) / sqrt(lambda^2 + (n + 1/2 + s)^2).
    The (E - lambda/r)^2 coupling binds only when lambda E < 0, so the
    physical level is ``bound = -sign(lambda) |E|``; E_plus/E_minus carry
    the +/- pair. In ``as_printed`` mode the pair holds the printed values
    and the rederived one is kept in ``alternatives``.
    Returns None at lambda = 0 (no bound states).
    """
    _require(spec, "coulomb")
    if n < 0:
        raise DomainError("n must be nonnegative")
    qn = spec.qn
    if qn.lam == 0:
        return None
    s = spec.gamma_abs  # raises on overcritical coupling
    big_n = n + 0.5 + s
    threshold = qn.rest_energy
    e_abs = threshold * big_n / math.sqrt(qn.lam**2 + big_n**2)
    bound = -math.copysign(e_abs, qn.lam)
    printed = coulomb_printed_energy(spec.params, qn, n)
    residuals = {
        "paper_orientation": coulomb_condition(spec, bound, n, "paper"),
        "positive_orientation": coulomb_condition(spec, -bound, n, "positive"),
    }
    if spec.mode == "rederived":
        return Level(
            n=n,
            E_plus=e_abs,
            E_minus=-e_abs,
            omega_used=0.0,
            constraint_residuals=residuals,
            bound=bound,
            alternatives={"as_printed": printed},
        )
    return Level(
        n=n,
        E_plus=printed,
        E_minus=-printed,
        omega_used=0.0,
        constraint_residuals=residuals,
        alternatives={"rederived": bound},
    )


def _snap_integer(a: float, notes: List[str]) -> float:
    k = round(a)
    if k <= 0 and a != k and abs(a - k) <= 1e-9 * max(1.0, abs(a)):
        notes.append(f"1F1 first parameter {a!r} snapped to {k}")
        return float(k)
    return a


def coulomb_wavefunction(spec: ScenarioSpec, E: float, grid) -> RadialSolution:
    """Radial Coulomb solution at energy E (|E| < sqrt(m^2 + K^2)).

    rederived: r^s exp(-kt r) 1F1(s + 1/2 + E lambda / kt, 2 s + 1, 2 kt r).
    as_printed: r^(-1/2) exp(-kt r) (2 kt r)^p 1F1(p + E lambda / kt, 2 p, 2 kt r)
    with the printed exponent p = zeta^2 - lambda^2 + 1/2.
    A first parameter within 1e-9 of a nonpositive integer is snapped so
    quantized levels evaluate as polynomials.
    """
    _require(spec, "coulomb")
    qn = spec.qn
    radicand = qn.m**2 + qn.K**2 - E * E
    if not radicand > 0:
        raise DomainError("energy is not below the continuum threshold")
    kt = math.sqrt(radicand)
    grid = _grid(grid)
    notes: List[str] = []
    if spec.mode == "rederived":
        s = spec.gamma_abs
        a = _snap_integer(s + 0.5 + E * qn.lam / kt, notes)
        blocks = {
            "power": grid**s,
            "exponential": np.exp(-kt * grid),
            "hyp1f1": hyp1f1_array(a, 2 * s + 1.0, 2 * kt * grid),
        }
    else:
        p = spec.zeta**2 - qn.lam**2 + 0.5
        a = _snap_integer(p + E * qn.lam / kt, notes)
        with np.errstate(divide="ignore"):
            inv_sqrt = np.where(grid > 0, grid ** -0.5, np.inf)
        blocks = {
            "inverse_sqrt": inv_sqrt,
            "exponential": np.exp(-kt * grid),
            "power": (2 * kt * grid) ** p,
            "hyp1f1": hyp1f1_array(a, 2 * p, 2 * kt * grid),
        }
        notes.append("as-printed exponent; not a solution of the radial equation")
    return _solution(grid, blocks, E, notes)


# --------------------------------------------------------------------------
# oscillator plus Coulomb: biconfluent Heun polynomials
# --------------------------------------------------------------------------


def _fvo_energy(spec: ScenarioSpec, n: int, omega: float) -> float:
    qn = spec.qn
    g = spec.gamma_abs
    if spec.mode == "rederived":
        # theta = 2n with beta^2 = E^2 - m^2 - K^2 + 2 m w
        return math.sqrt(qn.m**2 + qn.K**2 + 2.0 * qn.m * omega * (n + g))
    return math.sqrt(2.0 * qn.m * (n + g) + qn.m**2 + qn.K**2)


def _fvo_delta(spec: ScenarioSpec, E: float, omega: float) -> float:
    return coulomb_delta(spec.qn.lam, E, spec.qn.m, omega, spec.mode)


def _truncation_residual(g: float, n: int, delta: float):
    series = frobenius_coefficients(g, 2.0 * n, delta, max(n + 1, 2))
    head = float(np.max(np.abs(series.coeffs[: n + 1])))
    return series.coeffs[n + 1] / head, series


def fvo_coulomb_quantization(
    spec: ScenarioSpec,
    n: int,
    bracket=None,
    scan_points: int = 200,
) -> List[Level]:
    """Allowed oscillator frequencies for Heun level n.

    theta = 2n fixes E(omega); the frequencies are the roots of
    a_{n+1}(omega) = 0 found by a log-spaced sign scan over ``bracket``
    (default (1e-9 m, 10 m]) refined with Brent's method. Each root yields
    the pair +/- E; the negative branch has the opposite delta and, by the
    parity of a_{n+1} in delta, the same frequency.

    At lambda = 0 the odd coefficients vanish: even n keep the input omega,
    odd n admit no level.
    """
    _require(spec, "oscillator_coulomb")
    if n < 0:
        raise DomainError("n must be nonnegative")
    qn = spec.qn
    g = spec.gamma_abs
    if bracket is None:
        bracket = (1e-9 * qn.m, 10.0 * qn.m)
    lo, hi = bracket
    if not (0 < lo < hi):
        raise DomainError("omega bracket must satisfy 0 < lo < hi")

    if qn.lam == 0:
        if n % 2:
            return []
        e = _fvo_energy(spec, n, qn.omega)
        res, series = _truncation_residual(g, n, 0.0)
        return [
            Level(
                n=n,
                E_plus=e,
                E_minus=-e,
                omega_used=qn.omega,
                constraint_residuals={"a_next": abs(res)},
                delta=0.0,
                coefficients=series.coeffs[: n + 1].copy(),
            )
        ]

    def f(omega):
        e = _fvo_energy(spec, n, omega)
        return _truncation_residual(g, n, _fvo_delta(spec, e, omega))[0]

    omegas = np.geomspace(lo, hi, scan_points)
    values = [f(w) for w in omegas]
    levels = []
    for k in range(scan_points - 1):
        v0, v1 = values[k], values[k + 1]
        if v0 == 0.0:
            root = omegas[k]
        elif v0 * v1 < 0:
            root = brentq(f, omegas[k], omegas[k + 1], xtol=1e-300, rtol=1e-15, maxiter=500)
        else:
            continue
        e = _fvo_energy(spec, n, root)
        delta = _fvo_delta(spec, e, root)
        res, series = _truncation_residual(g, n, delta)
        levels.append(
            Level(
                n=n,
                E_plus=e,
                E_minus=-e,
                omega_used=float(root),
                constraint_residuals={"a_next": abs(res)},
                delta=delta,
                coefficients=series.coeffs[: n + 1].copy(),
            )
        )
    return levels


def heun_node_count(level: Level, branch: int = 1) -> int:
    """Radial nodes of the Heun polynomial state on the given energy branch.

    delta flips sign with E, which maps a_j to (-1)^j a_j; the node count is
    the radial index of the state among all states at that frequency.
    """
    if level.coefficients is None:
        raise DomainError("level carries no polynomial coefficients")
    coeffs = np.asarray(level.coefficients, dtype=float)
    if branch == -1:
        coeffs = coeffs * (-1.0) ** np.arange(coeffs.size)
    coeffs = np.trim_zeros(coeffs, "b")
    if coeffs.size < 2:
        return 0
    roots = np.roots(coeffs[::-1])
    real = roots[np.abs(roots.imag) <= 1e-9 * max(1.0, float(np.max(np.abs(roots))))].real
    return int(np.sum(real > 0))


def fvo_coulomb_wavefunction(
    spec: ScenarioSpec, level: Level, grid, branch: int = 1
) -> RadialSolution:
    """K^|gamma| exp(-K^2/2) sum_{j<=n} a_j K^j with K = sqrt(m omega) r.

    ``branch=-1`` builds the E_minus state, whose delta has the opposite sign.
    """
    _require(spec, "oscillator_coulomb")
    if branch not in (1, -1):
        raise DomainError("branch must be +1 or -1")
    qn = spec.qn
    g = spec.gamma_abs
    omega = level.omega_used
    E = level.E_plus if branch == 1 else level.E_minus
    delta = _fvo_delta(spec, E, omega)
    n = level.n
    coeffs = frobenius_coefficients(g, 2.0 * n, delta, max(n + 1, 2)).coeffs[: n + 1]
    grid = _grid(grid)
    kk = math.sqrt(qn.m * omega) * grid
    blocks = {
        "power": kk**g,
        "gaussian": np.exp(-(kk**2) / 2.0),
        "heun_polynomial": np.polynomial.polynomial.polyval(kk, coeffs),
    }
    return _solution(grid, blocks, E)


# --------------------------------------------------------------------------
# dispatch
# --------------------------------------------------------------------------


def spectrum(spec: ScenarioSpec, n_max: int, **quantization_kwargs) -> SpectrumResult:
    """Levels n = 0..n_max ordered by (n, omega)."""
    if n_max < 0:
        raise DomainError("n_max must be nonnegative")
    result = SpectrumResult(kind=spec.kind, mode=spec.mode, levels=[])
    if spec.kind == "free":
        raise DomainError("the free scenario has a continuous spectrum")
    if spec.kind == "oscillator":
        result.levels = [_kgo_level(spec, n) for n in range(n_max + 1)]
    elif spec.kind == "coulomb":
        if spec.qn.lam == 0:
            result.diagnostics.append("lambda = 0: no Coulomb bound states")
        for n in range(n_max + 1):
            level = coulomb_energy(spec, n)
            if level is not None:
                result.levels.append(level)
        if spec.mode == "rederived" and spec.qn.lam != 0:
            result.diagnostics.append(
                "bound branch has sign(E) = -sign(lambda); E_plus/E_minus list the pair"
            )
        if spec.mode == "as_printed":
            result.diagnostics.append("as-printed Coulomb energies are unverified")
    else:
        for n in range(n_max + 1):
            found = fvo_coulomb_quantization(spec, n, **quantization_kwargs)
            if not found:
                result.diagnostics.append(f"n={n}: no allowed omega in bracket")
            result.levels.extend(found)
    return result


def radial_solution(spec: ScenarioSpec, grid, n: int = 0, E: Optional[float] = None, branch: int = 1):
    """Wavefunction for level n (or energy E for the free scenario)."""
    if spec.kind == "free":
        if E is None:
            raise DomainError("the free scenario needs an energy E")
        return free_mode(spec, E, grid)
    if spec.kind == "oscillator":
        sol = kgo_wavefunction(spec, n, grid)
        if branch == -1:
            sol.energy = -sol.energy
        return sol
    if spec.kind == "coulomb":
        level = coulomb_energy(spec, n)
        if level is None:
            raise DomainError("lambda = 0: no Coulomb bound states")
        energy = level.bound if level.bound is not None else level.alternatives["rederived"]
        if spec.mode == "as_printed":
            energy = level.E_plus if branch == 1 else level.E_minus
            if abs(energy) >= spec.qn.rest_energy:
                raise DomainError("as-printed energy lies outside the bound window")
        return coulomb_wavefunction(spec, energy, grid)
    levels = fvo_coulomb_quantization(spec, n)
    if not levels:
        raise DomainError(f"no allowed omega for Heun level n={n}")
    return fvo_coulomb_wavefunction(spec, levels[0], grid, branch)
