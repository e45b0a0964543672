"""
Complex special functions behind every normalization.

Gamma comes from `scipy.special` (complex argument, reflection built in);
2F1 is summed here as a vectorized power series with the |x| → 1 linear
transformations, with mpmath as the fallback and the independent oracle.
"""

import cmath
import logging
import math
from typing import Callable, Literal, Union

import mpmath
import numpy as np
from scipy import integrate, special

from hyperbolic_eisenstein.exceptions import ConvergenceError, DomainError, PoleError
from hyperbolic_eisenstein.types.models import SLike, as_complex

logger = logging.getLogger(__name__)

POLE_TOLERANCE = 1e-12

SERIES_RADIUS = 0.8

HYP2F1_TERM_CAP = 5000

HYP2F1_TAIL = 1e-16

JACOBI_NODES = 32

TailFn = Callable[[np.ndarray], np.ndarray]

Method = Literal["auto", "series", "transform", "mpmath"]


def _near_nonpositive_integer(x: complex, tol: float = POLE_TOLERANCE) -> bool:
    n = round(x.real)
    return n <= 0 and abs(x - n) <= tol


def complex_gamma(s: SLike) -> complex:
    """
    Γ(s) for complex s.

    Raises:
        PoleError: If s is within 1e-12 of a non-positive integer
    """
    s = as_complex(s)
    if _near_nonpositive_integer(s):
        raise PoleError(f"Gamma has a pole at s = {s}")
    return complex(special.gamma(s))


def reciprocal_gamma(s: SLike) -> complex:
    """1/Γ(s), entire in s (zero at the Gamma poles)."""
    return complex(special.rgamma(as_complex(s)))


def k_factor(s: SLike) -> complex:
    """
    k(s) = Γ(1/2) Γ(1/2 + s/2) / Γ(1 + s/2) = ∫_0^π sin^s u du for ℜs > -1.

    Raises:
        PoleError: If 1/2 + s/2 hits a Gamma pole
    """
    s = as_complex(s)
    return math.sqrt(math.pi) * complex_gamma(0.5 + s / 2.0) * reciprocal_gamma(1.0 + s / 2.0)


def abstract_prefactor(s: SLike) -> complex:
    """Γ(1 + s/2) / (Γ(1/2) Γ(1/2 + s/2)), the normalization 1/k(s) written out."""
    s = as_complex(s)
    return complex_gamma(1.0 + s / 2.0) * reciprocal_gamma(0.5 + s / 2.0) / math.sqrt(math.pi)


def b_factor(q: int, s: SLike) -> complex:
    """
    b_q(s) = π 2^{2-s} Γ(s-1) / (Γ((s+q)/2) Γ((s-q)/2)).

    This closed form agrees with the integral e^{iπq/2} ∫_0^π sin^{s-2}u e^{-iqu} du
    for ℜs > 1 and continues it elsewhere.

    Raises:
        DomainError: If q is negative
        PoleError: At s = 1 (Gamma pole) or where b_q vanishes (s = ±q mod 2),
            the singular points of the recurrence
    """
    if q < 0:
        raise DomainError("weight q must be non-negative")
    s = as_complex(s)
    for arg in ((s + q) / 2.0, (s - q) / 2.0):
        if _near_nonpositive_integer(arg):
            raise PoleError(f"b_{q}(s) vanishes at s = {s}; the normalization 1/b_q has a pole")
    return (
        math.pi
        * 2.0 ** (2.0 - s)
        * complex_gamma(s - 1.0)
        * reciprocal_gamma((s + q) / 2.0)
        * reciprocal_gamma((s - q) / 2.0)
    )


def b_factor_quadrature(q: int, s: SLike) -> complex:
    """
    b_q(s) from its integral definition by adaptive quadrature.

    Raises:
        DomainError: If ℜs ≤ 1, where the integral diverges
    """
    s = as_complex(s)
    if s.real <= 1.0:
        raise DomainError("the integral definition of b_q needs ℜs > 1")

    def integrand(u: float) -> complex:
        return cmath.exp((s - 2.0) * math.log(math.sin(u)) - 1j * q * u)

    opts = dict(limit=400, epsabs=1e-14, epsrel=1e-13)
    re, _ = integrate.quad(lambda u: integrand(u).real, 0.0, math.pi, **opts)
    im, _ = integrate.quad(lambda u: integrand(u).imag, 0.0, math.pi, **opts)
    return cmath.exp(0.5j * math.pi * q) * complex(re, im)


def _series_2f1(a: complex, b: complex, c: complex, x: np.ndarray) -> np.ndarray:
    total = np.ones_like(x, dtype=complex)
    term = np.ones_like(x, dtype=complex)
    for n in range(HYP2F1_TERM_CAP):
        term = term * ((a + n) * (b + n) / ((c + n) * (n + 1.0))) * x
        total = total + term
        if np.all(np.abs(term) <= HYP2F1_TAIL * np.maximum(np.abs(total), 1e-300)):
            return total
    raise ConvergenceError(f"2F1 power series did not converge within {HYP2F1_TERM_CAP} terms")


def _log_case_2f1(a: complex, b: complex, x: np.ndarray) -> np.ndarray:
    # F(a, b; a + b; x) expanded in 1 - x with logarithmic terms.
    y = 1.0 - x
    log_y = np.log(y)
    psi_one = complex(special.digamma(1.0))
    psi_a = complex(special.digamma(a))
    psi_b = complex(special.digamma(b))
    coeff = np.ones_like(x, dtype=complex)
    total = coeff * (2.0 * psi_one - psi_a - psi_b - log_y)
    for n in range(HYP2F1_TERM_CAP):
        coeff = coeff * ((a + n) * (b + n) / (n + 1.0) ** 2) * y
        psi_one += 1.0 / (n + 1.0)
        psi_a += 1.0 / (a + n)
        psi_b += 1.0 / (b + n)
        term = coeff * (2.0 * psi_one - psi_a - psi_b - log_y)
        total = total + term
        if np.all(np.abs(term) <= HYP2F1_TAIL * np.maximum(np.abs(total), 1e-300)):
            break
    else:
        raise ConvergenceError("logarithmic 2F1 expansion did not converge")
    return complex_gamma(a + b) / (complex_gamma(a) * complex_gamma(b)) * total


def _transformed_2f1(a: complex, b: complex, c: complex, x: np.ndarray) -> np.ndarray:
    m = c - a - b
    if abs(m) <= POLE_TOLERANCE:
        return _log_case_2f1(a, b, x)
    if abs(m.imag) <= POLE_TOLERANCE and abs(m.real - round(m.real)) <= POLE_TOLERANCE:
        return _mpmath_2f1(a, b, c, x)
    y = 1.0 - x
    first = complex_gamma(c) * complex_gamma(m) * reciprocal_gamma(c - a) * reciprocal_gamma(c - b)
    second = complex_gamma(c) * complex_gamma(-m) * reciprocal_gamma(a) * reciprocal_gamma(b)
    return first * _series_2f1(a, b, 1.0 - m, y) + second * y**m * _series_2f1(
        c - a, c - b, 1.0 + m, y
    )


def _mpmath_2f1(a: complex, b: complex, c: complex, x: np.ndarray) -> np.ndarray:
    flat = [complex(mpmath.hyp2f1(a, b, c, complex(v))) for v in np.ravel(x)]
    return np.asarray(flat, dtype=complex).reshape(np.shape(x))


def gauss_2f1(
    a: SLike,
    b: SLike,
    c: SLike,
    x: Union[complex, float, np.ndarray],
    method: Method = "auto",
) -> Union[complex, np.ndarray]:
    """
    Gauss hypergeometric function 2F1(a, b; c; x).

    The power series is used for |x| ≤ 0.8. Real x in (0.8, 1) goes through the
    linear transformation to 1 - x (with the logarithmic expansion when
    c = a + b); anything else falls back to mpmath.

    Args:
        a, b, c: Complex parameters; c must not be a non-positive integer
        x: Scalar or array argument
        method: "auto", or force "series", "transform" or "mpmath" (used by
            dual-path checks)

    Returns:
        A complex scalar for scalar x, otherwise an array of x's shape

    Raises:
        DomainError: If c is a non-positive integer or the series is forced outside |x| < 1
        ConvergenceError: If a summation exhausts its term cap
    """
    a, b, c = as_complex(a), as_complex(b), as_complex(c)
    if _near_nonpositive_integer(c):
        raise DomainError("2F1 is undefined for non-positive integer c")
    scalar = np.ndim(x) == 0
    xs = np.atleast_1d(np.asarray(x, dtype=complex))
    terminating = _near_nonpositive_integer(a) or _near_nonpositive_integer(b)

    if method == "series":
        if not terminating and np.any(np.abs(xs) >= 1.0):
            raise DomainError("the 2F1 power series needs |x| < 1")
        out = _series_2f1(a, b, c, xs)
    elif method == "transform":
        out = _transformed_2f1(a, b, c, xs)
    elif method == "mpmath":
        out = _mpmath_2f1(a, b, c, xs)
    else:
        out = np.empty_like(xs)
        near = np.abs(xs) <= SERIES_RADIUS
        if terminating:
            near[:] = True
        real_edge = ~near & (np.abs(xs.imag) == 0.0) & (xs.real > SERIES_RADIUS) & (xs.real < 1.0)
        rest = ~near & ~real_edge
        if np.any(near):
            out[near] = _series_2f1(a, b, c, xs[near])
        if np.any(real_edge):
            out[real_edge] = _transformed_2f1(a, b, c, xs[real_edge])
        if np.any(rest):
            logger.debug("2F1 fallback to mpmath for %d arguments", int(np.sum(rest)))
            out[rest] = _mpmath_2f1(a, b, c, xs[rest])
    return complex(out[0]) if scalar else out


def tail_integral(fn: TailFn, edge: float, decay: float, nodes: int = JACOBI_NODES) -> np.ndarray:
    """
    ∫_edge^∞ fn(t) dt for fn decaying like t^{-decay}.

    Gauss–Jacobi quadrature in τ = edge/t, whose weight τ^{decay-2} carries
    the power-law decay exactly.

    Raises:
        DomainError: If decay ≤ 1, where the integral diverges
    """
    if not decay > 1.0:
        raise DomainError(f"tail integrals need decay > 1, got {decay}")
    beta = decay - 2.0
    x, weights = special.roots_jacobi(nodes, 0.0, beta)
    acc = 0.0
    for node, weight in zip((1.0 + x) / 2.0, weights):
        acc = acc + weight * fn(edge / node) * edge * node ** (-2.0 - beta)
    return acc * 2.0 ** (-beta - 1.0)


def midpoint_corrections(fn: TailFn, edge: float, spacing: float, h: np.ndarray) -> np.ndarray:
    """
    Derivative terms of Σ_{n > N} fn(n·spacing) ≈ (1/spacing)∫_edge^∞ fn + corrections.

    With edge = (N + ½)·spacing the corrections are spacing·fn'(edge)/24 and
    -7·spacing³·fn'''(edge)/5760; derivatives use five-point differences of
    step `h`, which may vary per point.
    """
    fm2, fm1, fp1, fp2 = (fn(edge + k * h) for k in (-2.0, -1.0, 1.0, 2.0))
    first = (fm2 - 8.0 * fm1 + 8.0 * fp1 - fp2) / (12.0 * h)
    third = (-fm2 + 2.0 * fm1 - 2.0 * fp1 + fp2) / (2.0 * h**3)
    return spacing * first / 24.0 - 7.0 * spacing**3 * third / 5760.0
