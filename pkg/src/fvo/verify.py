"""Deterministic verification suites.

Each check records a measured residual next to its tolerance. Suites:

    metric   geometry and FV algebra
    specfun  special functions and the Heun truncation
    spectra  reductions, charge density and ODE residuals of closed forms
    oracle   closed forms against the finite-difference eigen-solver

Reports carry no timings so that repeated runs are bytewise identical.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field, replace
from typing import Callable, Dict, List, Optional

import numpy as np
from scipy.optimize import brentq

from . import fv_core, oracle, spacetime, specfun, spectra
from .spacetime import QuantumNumbers, SpacetimeParams
from .spectra import ScenarioSpec

SUITES = ("all", "metric", "specfun", "spectra", "oracle")
SEED = 20240611


@dataclass
class Check:
    criterion: int
    name: str
    measured: float
    tolerance: Optional[float]
    passed: Optional[bool]
    detail: Dict[str, object] = field(default_factory=dict)


@dataclass
class Report:
    suite: str
    checks: List[Check] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed is not False for c in self.checks)

    def add(self, criterion, name, measured, tolerance, detail=None):
        measured = float(measured)
        ok = None if tolerance is None else bool(measured <= tolerance)
        self.checks.append(Check(criterion, name, measured, tolerance, ok, detail or {}))

    def by_criterion(self, criterion: int) -> List[Check]:
        return [c for c in self.checks if c.criterion == criterion]

    def to_json(self) -> str:
        payload = {
            "suite": self.suite,
            "passed": self.passed,
            "checks": [asdict(c) for c in self.checks],
        }
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def _rel(a, b):
    return abs(a - b) / max(abs(b), 1e-300)


# --------------------------------------------------------------------------
# metric suite
# --------------------------------------------------------------------------


def check_geometry(report: Report, rng: np.random.Generator, samples: int = 100):
    eye = np.eye(4)
    worst_inv = worst_det = 0.0
    for _ in range(samples):
        p = SpacetimeParams(alpha=rng.uniform(0.05, 1.0), chi=rng.uniform(-2.0, 2.0))
        r = rng.uniform(0.05, 20.0)
        g = spacetime.metric(p, r)
        worst_inv = max(worst_inv, float(np.max(np.abs(g @ spacetime.inverse_metric(p, r) - eye))))
        det = spacetime.metric_determinant(p, r)
        worst_det = max(worst_det, _rel(det, -(p.alpha**2) * r * r))
    report.add(8, "metric times inverse equals identity", worst_inv, 1e-12, {"samples": samples})
    report.add(8, "determinant equals -alpha^2 r^2 (relative)", worst_det, 1e-12, {"samples": samples})

    worst_r = 0.0
    for alpha, chi in [(1.0, 0.0), (0.5, 0.3), (0.8, -1.2), (0.3, 2.0)]:
        p = SpacetimeParams(alpha=alpha, chi=chi)
        for r in (0.5, 1.0, 2.0, 5.0, 10.0):
            worst_r = max(worst_r, abs(spacetime.ricci_scalar_numeric(p, r, h=1e-3)))
    report.add(8, "numeric Ricci scalar vanishes for r >= 0.5, h = 1e-3", worst_r, 1e-6)


def check_fv_algebra(report: Report):
    worst_eig = worst_ph = 0.0
    for m in (0.1, 1.0, 3.0):
        for p in np.linspace(-10.0, 10.0, 41):
            H = fv_core.fv_hamiltonian_symbol(p, m)
            eig = np.sort(np.linalg.eigvals(H).real)
            e = math.sqrt(p * p + m * m)
            worst_eig = max(worst_eig, float(np.max(np.abs(eig - [-e, e]))) / e)
            worst_ph = max(worst_ph, fv_core.pseudo_hermiticity_residual(H))
    report.add(9, "Hamiltonian symbol eigenvalues are +/- sqrt(p^2 + m^2)", worst_eig, 1e-12)
    report.add(9, "tau3 pseudo-hermiticity residual", worst_ph, 1e-14)


# --------------------------------------------------------------------------
# specfun suite
# --------------------------------------------------------------------------


def check_special_functions(report: Report, rng: np.random.Generator):
    xs = np.linspace(0.0, 10.0, 101)
    worst = max(_rel(specfun.hyp1f1(1.0, 1.0, x), math.exp(x)) for x in xs)
    report.add(7, "1F1(1, 1, x) = exp(x) on [0, 10]", worst, 1e-12)

    worst = 0.0
    for _ in range(200):
        a = rng.uniform(-5.0, 5.0)
        b = rng.uniform(0.5, 6.0)
        x = rng.uniform(0.0, 10.0)
        lhs = specfun.hyp1f1(a, b, x)
        rhs = math.exp(x) * specfun.hyp1f1(b - a, b, -x)
        worst = max(worst, abs(lhs - rhs) / max(abs(lhs), abs(rhs), 1.0))
    report.add(7, "Kummer transformation 1F1(a,b,x) = e^x 1F1(b-a,b,-x)", worst, 1e-10)

    root = brentq(lambda x: specfun.bessel_j(0.0, x), 2.0, 3.0, xtol=1e-15, rtol=1e-15)
    report.add(
        7,
        "first zero of J0",
        abs(root - 2.404825557695773),
        1e-9,
        {"root": root},
    )


def check_heun_truncation(report: Report, rng: np.random.Generator, samples: int = 200):
    """Theta = 2n plus delta at a root of a_{n+1} gives a polynomial."""
    worst = 0.0
    for _ in range(samples):
        zeta_value = rng.uniform(0.2, 4.0)
        lam = rng.uniform(-0.95, 0.95) * zeta_value
        n = int(rng.integers(1, 7))
        g = spacetime.gamma_abs(zeta_value, lam)
        roots = specfun.truncation_deltas(g, n)
        delta = float(roots[rng.integers(0, roots.size)])
        series = specfun.frobenius_coefficients(g, 2.0 * n, delta, n + 50)
        head = np.max(np.abs(series.coeffs[: n + 1]))
        tail = np.max(np.abs(series.coeffs[n + 1 :]))
        worst = max(worst, tail / head)
    report.add(4, "Heun tail max|a_j|, n < j <= n+50, relative to head", worst, 1e-12, {"samples": samples})


# --------------------------------------------------------------------------
# spectra suite
# --------------------------------------------------------------------------


def _lambda_zero_reduction(report: Report):
    worst = 0.0
    for alpha, chi, K, j, m, omega in [
        (1.0, 0.0, 0.0, 0, 1.0, 1.0),
        (0.5, 0.25, 0.5, 1, 1.0, 0.7),
        (0.8, 0.0, 0.3, 2, 2.0, 0.3),
        (0.3, 1.0, 1.0, -1, 0.5, 2.0),
    ]:
        params = SpacetimeParams(alpha=alpha, chi=chi)
        qn = QuantumNumbers(j=j, K=K, m=m, omega=omega, lam=0.0)
        kgo = ScenarioSpec("oscillator", params, qn)
        heun = ScenarioSpec("oscillator_coulomb", params, qn)
        for n_kgo in range(4):
            E_kgo = spectra.kgo_energy(kgo, n_kgo)[0]
            levels = spectra.fvo_coulomb_quantization(heun, 2 * n_kgo)
            worst = max(worst, _rel(levels[0].E_plus, E_kgo))
            worst = max(worst, _rel(levels[0].E_minus, -E_kgo))
    report.add(6, "lambda = 0 Heun spectrum equals oscillator spectrum (n_Heun = 2 n)", worst, 1e-12)


def _produced_states():
    """(label, spec, n, branch, E, r_lo, r_hi) for every wavefunction kind."""
    out = []
    free = ScenarioSpec("free", SpacetimeParams(0.7, 0.2), QuantumNumbers(j=1, K=0.4))
    for zj in (0, 1, 2):
        spec = replace(free, qn=replace(free.qn, j=zj))
        out.append(("free", spec, 0, 1, 1.8, 0.1, 10.0))
    for params, qn in [
        (SpacetimeParams(1.0, 0.0), QuantumNumbers(j=0, m=1.0, omega=1.0)),
        (SpacetimeParams(0.5, 0.25), QuantumNumbers(j=1, K=0.5, m=1.0, omega=1.0)),
        (SpacetimeParams(0.8, 0.0), QuantumNumbers(j=2, K=0.0, m=1.0, omega=0.5, N_param=2.0)),
    ]:
        spec = ScenarioSpec("oscillator", params, qn)
        for n in range(3):
            for branch in (1, -1):
                out.append(("oscillator", spec, n, branch, None, 0.1, 4.0))
    for lam in (0.3, 1.0, -1.0):
        spec = ScenarioSpec(
            "coulomb", SpacetimeParams(2**-0.5, 0.0), QuantumNumbers(j=1, K=0.5, lam=lam)
        )
        for n in range(3):
            out.append(("coulomb", spec, n, 1, None, 0.2, 8.0))
    for lam in (0.2, 0.5):
        spec = ScenarioSpec(
            "oscillator_coulomb",
            SpacetimeParams(1.0, 0.0),
            QuantumNumbers(j=1, lam=lam, omega=0.1),
        )
        for n in (1, 2, 3):
            for branch in (1, -1):
                out.append(("oscillator_coulomb", spec, n, branch, None, None, None))
    return out


def _state_solution(spec, n, branch, E, grid):
    if spec.kind == "oscillator_coulomb":
        level = spectra.fvo_coulomb_quantization(spec, n)[0]
        return spectra.fvo_coulomb_wavefunction(spec, level, grid, branch), level
    return spectra.radial_solution(spec, grid, n=n, E=E, branch=branch), None


def _spec_at(spec, level):
    if level is None:
        return spec
    return replace(spec, qn=replace(spec.qn, omega=level.omega_used))


def _charge_and_residuals(report: Report):
    worst_charge = 0.0
    worst_res: Dict[str, float] = {}
    for label, spec, n, branch, E, r_lo, r_hi in _produced_states():
        if r_lo is None:
            level = spectra.fvo_coulomb_quantization(spec, n)[0]
            scale = math.sqrt(spec.qn.m * level.omega_used)
            r_lo, r_hi = 0.1 / scale, 3.0 / scale
        grid = np.linspace(r_lo, r_hi, 400)
        sol, level = _state_solution(spec, n, branch, E, grid)
        mode = sol.two_component(spec.qn.N_param)
        lhs = fv_core.charge_density(mode)
        rhs = (sol.energy / spec.qn.N_param) * np.abs(sol.profile) ** 2
        scale_c = max(float(np.max(np.abs(sol.profile) ** 2)), 1e-300)
        worst_charge = max(worst_charge, float(np.max(np.abs(lhs - rhs))) / scale_c)

        def psi(r, spec=spec, n=n, branch=branch, E=E):
            return _state_solution(spec, n, branch, E, r)[0].profile

        res = oracle.radial_residual(_spec_at(spec, level), sol.energy, psi, grid)
        worst_res[label] = max(worst_res.get(label, 0.0), res)
    report.add(9, "charge density equals (E/N)|psi|^2 on every produced state", worst_charge, 1e-12)
    for label in ("free", "oscillator", "coulomb", "oscillator_coulomb"):
        report.add(10, f"radial ODE residual, {label}", worst_res[label], 1e-6)


# --------------------------------------------------------------------------
# oracle suite
# --------------------------------------------------------------------------


def _flat_oscillator(report: Report):
    worst = 0.0
    worst_conv = 0.0
    for j in range(-2, 3):
        spec = ScenarioSpec("oscillator", SpacetimeParams(1.0, 0.0), QuantumNumbers(j=j, m=1.0, omega=1.0))
        res = oracle.oscillator_levels(spec, 4, oracle.OracleConfig(grid_points=4000))
        for n in range(4):
            worst = max(worst, _rel(res.eigenvalues[n], spectra.kgo_energy(spec, n)[0]))
        worst_conv = max(worst_conv, float(np.max(res.grid_convergence)))
    report.add(1, "flat oscillator, closed form vs oracle (relative)", worst, 1e-6, {"max_grid_estimate": worst_conv})


def _dislocation_oscillator(report: Report):
    worst = 0.0
    cases = 0
    for alpha in (0.5, 0.8):
        for chi in (0.0, 0.25):
            for K in (0.0, 0.5):
                for j in (0, 1, 2):
                    spec = ScenarioSpec(
                        "oscillator",
                        SpacetimeParams(alpha, chi),
                        QuantumNumbers(j=j, K=K, m=1.0, omega=1.0),
                    )
                    res = oracle.oscillator_levels(spec, 3)
                    for n in range(3):
                        worst = max(worst, _rel(res.eigenvalues[n], spectra.kgo_energy(spec, n)[0]))
                        cases += 1
    report.add(2, "dislocation oscillator, closed form vs oracle (relative)", worst, 1e-5, {"levels": cases})


def _coulomb(report: Report):
    worst = 0.0
    worst_iters = 0
    for K in (0.0, 0.5):
        for lam in (0.3, 1.0):
            spec = ScenarioSpec(
                "coulomb", SpacetimeParams(2**-0.5, 0.0), QuantumNumbers(j=1, K=K, m=1.0, lam=lam)
            )
            for n in range(3):
                level = spectra.coulomb_energy(spec, n)
                branch = -1 if lam > 0 else 1
                res = oracle.nonlinear_eigensolve(spec, n, branch=branch)
                err = abs(res.eigenvalues[0] - level.bound)
                worst = max(worst, err)
                worst_iters = max(worst_iters, res.iterations)
                printed = spectra.coulomb_printed_energy(spec.params, spec.qn, n)
                report.add(
                    3,
                    f"as-printed Coulomb value K={K} lambda={lam} n={n} (reported only)",
                    abs(abs(printed) - abs(level.bound)),
                    None,
                    {"as_printed": printed, "rederived_bound": level.bound, "oracle": float(res.eigenvalues[0])},
                )
    report.add(3, "Coulomb closed form vs nonlinear oracle (absolute)", worst, 1e-4, {"max_iterations": worst_iters})


def _omega_quantization(report: Report):
    m, K, lam = 1.0, 0.0, 0.2
    spec = ScenarioSpec(
        "oscillator_coulomb",
        SpacetimeParams(1.0, 0.0),
        QuantumNumbers(j=1, K=K, m=m, omega=1.0, lam=lam),
    )
    g = spec.gamma_abs
    zeta_H = 2.0 * g + 1.0
    M2 = m * m + K * K
    # delta^2 = 4 lam^2 E^2 / (m w) = 2 zeta_H with E^2 = M^2 + 2 m w (1 + g)
    omega_closed = 4.0 * lam**2 * M2 / (m * (2.0 * zeta_H - 8.0 * lam**2 * (1.0 + g)))
    E_closed = math.sqrt(M2 + 2.0 * m * omega_closed * (1.0 + g))
    levels = spectra.fvo_coulomb_quantization(spec, 1)
    level = min(levels, key=lambda lv: abs(lv.omega_used - omega_closed))
    report.add(
        5,
        "n=1 allowed omega vs closed-form pair solution (relative)",
        _rel(level.omega_used, omega_closed),
        1e-10,
        {"omega": level.omega_used, "omega_closed": omega_closed, "E": level.E_plus},
    )
    at = replace(spec, qn=replace(spec.qn, omega=level.omega_used))
    idx = spectra.heun_node_count(level, 1)
    res = oracle.nonlinear_eigensolve(at, idx, branch=1)
    report.add(
        5,
        "oracle at allowed omega vs E(1) (absolute)",
        abs(res.eigenvalues[0] - E_closed),
        1e-4,
        {"oracle": float(res.eigenvalues[0]), "E_closed": E_closed},
    )


SUITE_RUNNERS: Dict[str, List[Callable]] = {
    "metric": [lambda r, rng: check_geometry(r, rng), lambda r, rng: check_fv_algebra(r)],
    "specfun": [check_special_functions, check_heun_truncation],
    "spectra": [lambda r, rng: _lambda_zero_reduction(r), lambda r, rng: _charge_and_residuals(r)],
    "oracle": [
        lambda r, rng: _flat_oscillator(r),
        lambda r, rng: _dislocation_oscillator(r),
        lambda r, rng: _coulomb(r),
        lambda r, rng: _omega_quantization(r),
    ],
}


def run_suite(name: str) -> Report:
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; expected one of {SUITES}")
    report = Report(suite=name)
    names = [s for s in SUITES[1:]] if name == "all" else [name]
    for suite in names:
        rng = np.random.default_rng(SEED)
        for runner in SUITE_RUNNERS[suite]:
            runner(report, rng)
    report.checks.sort(key=lambda c: c.criterion)
    return report
