"""Special functions used by the radial solutions.

Kummer's 1F1, Bessel J, Whittaker M and the biconfluent Heun series built
from its Frobenius recurrence. Everything is scalar-first; the ``*_array``
helpers map over numpy grids.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from decimal import Decimal, localcontext
from typing import List, Optional

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import ConvergenceError, DomainError, PoleError

# max |term| / |sum| beyond which the float sum is redone in decimal
_CANCELLATION_LIMIT = 1e3
_DECIMAL_DIGITS = 50


@dataclass
class SeriesAccuracy:
    """Stopping rule for a series, plus the diagnostics of the last use.

    A series stops once three consecutive terms satisfy
    |term| <= tol * |partial sum|.
    """

    tol: float = 1e-15
    max_terms: int = 10_000
    terms_used: int = 0
    converged: bool = False
    notes: List[str] = field(default_factory=list)

    def __post_init__(self):
        if not self.tol > 0:
            raise DomainError("tol must be positive")
        if self.max_terms < 1:
            raise DomainError("max_terms must be at least 1")

    def _reset(self):
        self.terms_used = 0
        self.converged = False
        self.notes = []


def _is_nonpositive_integer(x: float) -> bool:
    return x <= 0 and float(x).is_integer()


# --------------------------------------------------------------------------
# Kummer 1F1
# --------------------------------------------------------------------------


def _kummer_decimal(a: float, b: float, x: float, n_terms: int) -> float:
    with localcontext() as ctx:
        ctx.prec = _DECIMAL_DIGITS
        da, db, dx = Decimal(a), Decimal(b), Decimal(x)
        term = Decimal(1)
        total = Decimal(1)
        for k in range(n_terms):
            term = term * (da + k) / (db + k) * dx / (k + 1)
            total += term
            if term == 0:
                break
        return float(total)


def hyp1f1(a: float, b: float, x: float, acc: Optional[SeriesAccuracy] = None) -> float:
    """Kummer's confluent hypergeometric function M(a, b, x).

    The series sum_k (a)_k / (b)_k x^k / k! is summed directly. When the
    terms are much larger than the result (alternating series at negative
    x, or Laguerre-type polynomials at large x) the same terms are re-summed
    in 50-digit decimal arithmetic.
    """
    acc = acc if acc is not None else SeriesAccuracy()
    acc._reset()
    a, b, x = float(a), float(b), float(x)
    polynomial = _is_nonpositive_integer(a)
    if _is_nonpositive_integer(b) and not (polynomial and -a < -b):
        raise PoleError(f"1F1 pole: b={b} is a nonpositive integer")

    term = 1.0
    total = 1.0
    biggest = 1.0
    small_run = 0
    k = 0
    while True:
        if polynomial and a + k == 0:
            acc.converged = True
            acc.notes.append("polynomial case: terminated exactly")
            break
        if k >= acc.max_terms:
            acc.terms_used = k
            raise ConvergenceError(
                f"1F1({a}, {b}, {x}) did not converge in {acc.max_terms} terms",
                terms_used=k,
            )
        term *= (a + k) / (b + k) * x / (k + 1)
        total += term
        k += 1
        biggest = max(biggest, abs(term))
        if abs(term) <= acc.tol * abs(total):
            small_run += 1
            if small_run >= 3:
                acc.converged = True
                break
        else:
            small_run = 0
    acc.terms_used = k
    if total == 0.0 or biggest > _CANCELLATION_LIMIT * abs(total):
        acc.notes.append(f"cancellation {biggest / max(abs(total), 1e-300):.3g}: decimal re-sum")
        total = _kummer_decimal(a, b, x, k)
    return total


def hyp1f1_array(a: float, b: float, x, acc: Optional[SeriesAccuracy] = None) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    for idx, xv in np.ndenumerate(x):
        out[idx] = hyp1f1(a, b, xv, acc)
    return out


# --------------------------------------------------------------------------
# Bessel J
# --------------------------------------------------------------------------

BESSEL_ASYMPTOTIC_SWITCH = 20.0
BESSEL_EXTENDED_FROM = 2.0


def _bessel_decimal(nu: float, x: float, n_terms: int) -> float:
    """sum_k (-x^2/4)^k / (k! (nu+1)_k) in extended precision."""
    with localcontext() as ctx:
        ctx.prec = _DECIMAL_DIGITS
        q = -(Decimal(x) / 2) ** 2
        dnu = Decimal(nu)
        term = Decimal(1)
        total = Decimal(1)
        for k in range(n_terms):
            term = term * q / ((k + 1) * (k + 1 + dnu))
            total += term
        return float(total)


def _bessel_series(nu: float, x: float, acc: SeriesAccuracy) -> float:
    half = 0.5 * x
    if x == 0.0:
        acc.converged = True
        acc.terms_used = 1
        return 1.0 if nu == 0 else 0.0
    # log-space prefactor keeps large orders finite
    term = math.exp(nu * math.log(half) - math.lgamma(nu + 1.0))
    total = term
    biggest = abs(term)
    small_run = 0
    q = -half * half
    k = 0
    while True:
        if k >= acc.max_terms:
            raise ConvergenceError(f"J_{nu}({x}) series did not converge", terms_used=k)
        term *= q / ((k + 1) * (k + 1 + nu))
        total += term
        k += 1
        biggest = max(biggest, abs(term))
        if abs(term) <= acc.tol * abs(total):
            small_run += 1
            if small_run >= 3:
                break
        else:
            small_run = 0
    acc.terms_used = k
    acc.converged = True
    # terms of size up to ~exp(x) cancel; a switch keyed on x alone keeps
    # the result smooth in x (a test on |total| would toggle near zeros)
    if x > BESSEL_EXTENDED_FROM:
        prefactor = math.exp(nu * math.log(half) - math.lgamma(nu + 1.0))
        acc.notes.append("re-summed in extended precision")
        return prefactor * _bessel_decimal(nu, x, k + 5)
    return total


def _bessel_asymptotic(nu: float, x: float, acc: SeriesAccuracy):
    """Hankel expansion summed up to its smallest term.

    Returns (value, error estimate) or None when the expansion cannot reach
    the requested tolerance.
    """
    mu = 4.0 * nu * nu
    p = 1.0
    q = 0.0
    coeff = 1.0
    prev = math.inf
    err = math.inf
    k = 1
    while k < 200:
        coeff *= (mu - (2 * k - 1) ** 2) / (k * 8.0 * x)
        mag = abs(coeff)
        if mag > prev:
            break
        if k % 2 == 1:
            q += coeff if (k // 2) % 2 == 0 else -coeff
        else:
            p += -coeff if (k // 2) % 2 == 1 else coeff
        prev = mag
        err = mag
        if mag <= acc.tol:
            break
        k += 1
    if err > acc.tol:
        return None
    chi = x - (0.5 * nu + 0.25) * math.pi
    value = math.sqrt(2.0 / (math.pi * x)) * (p * math.cos(chi) - q * math.sin(chi))
    acc.terms_used = k
    return value, err


def bessel_j(nu: float, x: float, acc: Optional[SeriesAccuracy] = None) -> float:
    """Bessel function of the first kind J_nu(x) for nu >= 0, x >= 0.

    Ascending series up to x = 20, re-summed in extended precision above
    x = 2 where its terms cancel; beyond that the Hankel asymptotic form is used
    whenever it reaches ``acc.tol`` (its error estimate is left in
    ``acc.notes``), otherwise the ascending series continues.
    """
    acc = acc if acc is not None else SeriesAccuracy()
    acc._reset()
    nu, x = float(nu), float(x)
    if nu < 0 or x < 0:
        raise DomainError(f"bessel_j needs nu >= 0 and x >= 0, got nu={nu}, x={x}")
    if x > BESSEL_ASYMPTOTIC_SWITCH:
        res = _bessel_asymptotic(nu, x, acc)
        if res is not None:
            value, err = res
            acc.converged = True
            acc.notes.append(f"asymptotic form, error estimate {err:.2e}")
            return value
    return _bessel_series(nu, x, acc)


def bessel_j_array(nu: float, x, acc: Optional[SeriesAccuracy] = None) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    for idx, xv in np.ndenumerate(x):
        out[idx] = bessel_j(nu, xv, acc)
    return out


# --------------------------------------------------------------------------
# Whittaker M
# --------------------------------------------------------------------------


def whittaker_m(kw: float, mu: float, z: float, acc: Optional[SeriesAccuracy] = None) -> float:
    """M_{kw,mu}(z) = exp(-z/2) z^(mu+1/2) 1F1(mu - kw + 1/2, 1 + 2 mu, z)."""
    if not z > 0:
        raise DomainError("whittaker_m needs z > 0")
    return math.exp(-0.5 * z) * z ** (mu + 0.5) * hyp1f1(mu - kw + 0.5, 1.0 + 2.0 * mu, z, acc)


# --------------------------------------------------------------------------
# Biconfluent Heun via Frobenius
# --------------------------------------------------------------------------


@dataclass
class FrobeniusSeries:
    coeffs: np.ndarray
    zeta_H: float
    theta: float
    delta: float
    truncated_at: Optional[int] = None
    tail_max: float = 0.0

    def polynomial(self) -> np.ndarray:
        """Coefficients a_0..a_n of the truncated polynomial."""
        if self.truncated_at is None:
            raise DomainError("series does not truncate")
        return self.coeffs[: self.truncated_at + 1].copy()


def _frobenius_next(a_j, a_j1, j, zeta_H, theta, delta):
    denom = (j + 2.0) * (j + 1.0 + zeta_H)
    return (delta * a_j1 - (theta - 2.0 * j) * a_j) / denom


def truncation_index(theta: float) -> Optional[int]:
    """n such that theta = 2n, if theta is (numerically) an even integer >= 0."""
    half = 0.5 * theta
    n = round(half)
    if n >= 0 and abs(half - n) <= 1e-12 * max(1.0, abs(half)):
        return int(n)
    return None


def frobenius_coefficients(
    gamma_abs: float, theta: float, delta: float, n_max: int
) -> FrobeniusSeries:
    """Coefficients a_0..a_{n_max} of the Heun power series.

    a_0 = 1, a_1 = delta / zeta_H and
    a_{j+2} = [delta a_{j+1} - (theta - 2 j) a_j] / ((j + 2)(j + 1 + zeta_H))
    with zeta_H = 2|gamma| + 1.
    """
    if n_max < 2:
        raise DomainError("n_max must be at least 2")
    if gamma_abs < 0:
        raise DomainError("gamma_abs must be nonnegative")
    zeta_H = 2.0 * gamma_abs + 1.0
    a = np.zeros(n_max + 1)
    a[0] = 1.0
    a[1] = delta / zeta_H
    for j in range(n_max - 1):
        a[j + 2] = _frobenius_next(a[j], a[j + 1], j, zeta_H, theta, delta)

    series = FrobeniusSeries(coeffs=a, zeta_H=zeta_H, theta=theta, delta=delta)
    n = truncation_index(theta)
    if n is not None and n + 1 <= n_max:
        head = np.max(np.abs(a[: n + 1]))
        if abs(a[n + 1]) <= 1e-12 * head:
            series.truncated_at = n
            series.tail_max = float(np.max(np.abs(a[n + 1 :])))
    return series


def truncation_deltas(gamma_abs: float, n: int) -> np.ndarray:
    """All delta for which a_{n+1} = 0 once theta = 2n is imposed.

    With theta = 2n the conditions a_{n+1} = 0 read delta a_i = 2(n-i+1)
    a_{i-1} + (i+1)(i+zeta_H) a_{i+1} for i = 0..n, an eigenproblem for a
    tridiagonal matrix whose off-diagonal products are positive, so the
    roots are real and come in +/- pairs.
    """
    if n < 0:
        raise DomainError("n must be nonnegative")
    zeta_H = 2.0 * gamma_abs + 1.0
    i = np.arange(n)
    products = (i + 1.0) * (i + zeta_H) * 2.0 * (n - i)
    if n == 0:
        return np.zeros(1)
    return eigh_tridiagonal(np.zeros(n + 1), np.sqrt(products), eigvals_only=True)


def heunb_eval(
    gamma_abs: float,
    theta: float,
    delta: float,
    kk,
    acc: Optional[SeriesAccuracy] = None,
):
    """Evaluate O(kk) = sum_j a_j kk^j on a scalar or array argument.

    When theta = 2n and a_{n+1} vanishes exactly the sum stops at degree n;
    otherwise terms are generated until three consecutive ones are below
    ``acc.tol`` relative to the partial sum at every point.
    """
    acc = acc if acc is not None else SeriesAccuracy()
    acc._reset()
    scalar = np.ndim(kk) == 0
    x = np.atleast_1d(np.asarray(kk, dtype=float))
    if np.any(x < 0):
        raise DomainError("heunb_eval needs kk >= 0")
    zeta_H = 2.0 * gamma_abs + 1.0
    n_trunc = truncation_index(theta)

    a_prev, a_cur = 1.0, delta / zeta_H
    power = x.copy()
    total = np.ones_like(x) + a_cur * power
    small_run = 0
    j = 1  # index of a_cur
    while True:
        if n_trunc is not None and j == n_trunc + 1 and a_cur == 0.0:
            # exact truncation: every later coefficient is zero
            acc.notes.append(f"polynomial of degree {n_trunc}")
            acc.converged = True
            break
        if j >= acc.max_terms:
            acc.terms_used = j
            raise ConvergenceError("Heun series did not converge", terms_used=j)
        a_next = _frobenius_next(a_prev, a_cur, j - 1, zeta_H, theta, delta)
        power = power * x
        term = a_next * power
        total = total + term
        a_prev, a_cur = a_cur, a_next
        j += 1
        if np.all(np.abs(term) <= acc.tol * np.abs(total)):
            small_run += 1
            if small_run >= 3:
                acc.converged = True
                break
        else:
            small_run = 0
    acc.terms_used = j + 1
    return float(total[0]) if scalar else total


def heunb_theta(beta_sq: float, m_omega: float, gamma_abs: float, form: str = "recurrence") -> float:
    """Constant term of the Heun equation in terms of beta^2.

    ``recurrence``: beta^2/(m omega) - 2(|gamma| + 1), the value that the
    Frobenius recurrence and the K^|gamma| exp(-K^2/2) ansatz both produce.
    ``as_printed``: beta^2/(m omega) - 2(2|gamma| + 1).
    """
    if form == "recurrence":
        return beta_sq / m_omega - 2.0 * (gamma_abs + 1.0)
    if form == "as_printed":
        return beta_sq / m_omega - 2.0 * (2.0 * gamma_abs + 1.0)
    raise DomainError(f"unknown form {form!r}")


def heunb_ode_residual(gamma_abs, theta, delta, kk, h=1e-3, acc=None):
    """Residual of O'' + [(2|g|+1)/K - 2K] O' + [theta - delta/K] O.

    Derivatives are five-point central differences of ``heunb_eval``.
    """
    kk = np.asarray(kk, dtype=float)
    f = lambda x: heunb_eval(gamma_abs, theta, delta, x, acc)  # noqa: E731
    f0 = f(kk)
    fp1, fm1, fp2, fm2 = f(kk + h), f(kk - h), f(kk + 2 * h), f(kk - 2 * h)
    d1 = (-fp2 + 8 * fp1 - 8 * fm1 + fm2) / (12 * h)
    d2 = (-fp2 + 16 * fp1 - 30 * f0 + 16 * fm1 - fm2) / (12 * h * h)
    zeta_H = 2.0 * gamma_abs + 1.0
    return d2 + (zeta_H / kk - 2 * kk) * d1 + (theta - delta / kk) * f0
