"""Spin-0 Feshbach-Villars oscillator in cosmic-dislocation space-time."""

from .errors import ConvergenceError, DomainError, OvercriticalCouplingError, PoleError
from .spacetime import QuantumNumbers, SpacetimeParams
from .spectra import ScenarioSpec, radial_solution, spectrum

__all__ = [
    "ConvergenceError",
    "DomainError",
    "OvercriticalCouplingError",
    "PoleError",
    "QuantumNumbers",
    "ScenarioSpec",
    "SpacetimeParams",
    "radial_solution",
    "spectrum",
]
