"""Feshbach-Villars two-component structure for a spin-0 particle."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError


@dataclass(frozen=True)
class PauliSet:
    tau1: np.ndarray
    tau2: np.ndarray
    tau3: np.ndarray


PAULI = PauliSet(
    tau1=np.array([[0, 1], [1, 0]], dtype=complex),
    tau2=np.array([[0, -1j], [1j, 0]], dtype=complex),
    tau3=np.array([[1, 0], [0, -1]], dtype=complex),
)


@dataclass
class TwoComponentMode:
    grid: np.ndarray
    scalar: np.ndarray
    phi1: np.ndarray
    phi2: np.ndarray
    E: float
    N_param: float


def fv_hamiltonian_symbol(p: float, m: float) -> np.ndarray:
    """Free FV Hamiltonian (tau3 + i tau2) p^2/(2m) + m tau3 as a 2x2 matrix."""
    if not m > 0:
        raise DomainError("mass must be positive")
    t = PAULI
    return (t.tau3 + 1j * t.tau2) * (p * p / (2.0 * m)) + m * t.tau3


def pseudo_hermiticity_residual(H: np.ndarray) -> float:
    """max |tau3 H^dagger tau3 - H|; zero for a tau3-pseudo-Hermitian H."""
    H = np.asarray(H, dtype=complex)
    t3 = PAULI.tau3
    return float(np.max(np.abs(t3 @ H.conj().T @ t3 - H)))


def assemble_two_component(scalar, E: float, N_param: float, grid=None) -> TwoComponentMode:
    """Split a stationary scalar mode into FV components.

    Inverts psi = phi1 + phi2, E psi = N (phi1 - phi2).
    """
    if N_param == 0:
        raise DomainError("N_param must be nonzero")
    scalar = np.asarray(scalar)
    ratio = E / N_param
    phi1 = 0.5 * (1.0 + ratio) * scalar
    phi2 = 0.5 * (1.0 - ratio) * scalar
    if grid is None:
        grid = np.arange(scalar.size, dtype=float)
    return TwoComponentMode(
        grid=np.asarray(grid), scalar=scalar, phi1=phi1, phi2=phi2, E=E, N_param=N_param
    )


def charge_density(mode: TwoComponentMode) -> np.ndarray:
    """|phi1|^2 - |phi2|^2, which equals (E/N) |psi|^2."""
    return np.abs(mode.phi1) ** 2 - np.abs(mode.phi2) ** 2
