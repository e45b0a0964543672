"""
Eisenstein series families as truncated orbit sums.

Every family is evaluated through its weight-q automorphic lift y^q f: a sum
over group elements M of φ(Mz) ((c z̄ + d)/(cz + d))^q for a base function φ.
Sums run by shells with the stopping rule of `TruncationPolicy`: word-length
shells on groups without cusps and displacement shells otherwise. Point
batches are summed in fixed blocks so results do not depend on how a grid is
split across threads.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from hyperbolic_eisenstein.exceptions import ConvergenceError, DomainError
from hyperbolic_eisenstein.group import (
    ElementShell,
    conjugator_to_axis,
    cusp_width,
    has_cusps,
    iter_displacement_shells,
    iter_shells,
    scaling_matrix,
)
from hyperbolic_eisenstein.specfun import b_factor, gauss_2f1, k_factor, midpoint_corrections
from hyperbolic_eisenstein.types.models import (
    CuspExpansionReport,
    FormValue,
    FuchsianGroup,
    Matrix2,
    PointH,
    SeriesConfig,
    SeriesEvaluation,
    SeriesFamily,
    SLike,
    TraceType,
    TruncationPolicy,
    as_complex,
)

logger = logging.getLogger(__name__)

TERM_BLOCK = 4096

GRID_CHUNK = 256

# Direct translation sums reach this many multiples of max(height, width).
TAIL_SPAN = 8.0

# Projected growth of a displacement shell, for the element budget.
DISPLACEMENT_BRANCHING = 3

TermFn = Callable[[np.ndarray, np.ndarray], np.ndarray]


@dataclass
class ShellStream:
    """Lazy shells of group elements together with their term function."""

    shells: Iterator[ElementShell]
    term: TermFn
    branching: int = 3


@dataclass
class OrbitSum:
    """Lift values of a truncated orbit sum over a batch of points."""

    values: np.ndarray
    tails: np.ndarray
    weight: int
    word_len: int
    terms: int
    converged: bool
    shell_sums: List[float] = field(default_factory=list)
    real_form: bool = False

    def scaled(self, factor: complex) -> "OrbitSum":
        return OrbitSum(
            values=self.values * factor,
            tails=self.tails * abs(factor),
            weight=self.weight,
            word_len=self.word_len,
            terms=self.terms,
            converged=self.converged,
            shell_sums=[v * abs(factor) for v in self.shell_sums],
            real_form=self.real_form,
        )


def weight_factor(mats: np.ndarray, points: np.ndarray, q: int) -> np.ndarray:
    """((c z̄ + d)/(cz + d))^q for every (point, matrix) pair, shape (P, K)."""
    c, d = mats[:, 1, 0], mats[:, 1, 1]
    z = points[:, None]
    if q == 0:
        return np.ones((points.shape[0], mats.shape[0]), dtype=complex)
    return ((c * np.conj(z) + d) / (c * z + d)) ** q


def images(mats: np.ndarray, points: np.ndarray) -> np.ndarray:
    a, b, c, d = mats[:, 0, 0], mats[:, 0, 1], mats[:, 1, 0], mats[:, 1, 1]
    z = points[:, None]
    return (a * z + b) / (c * z + d)


def angular_base(w: np.ndarray, s: complex, q: int) -> np.ndarray:
    """e^{-iqθ} sin^s θ at w = |w| e^{iθ}: the lift of a hyperbolic-family term."""
    r = np.abs(w)
    return (np.conj(w) / r) ** q * (w.imag / r) ** s


def orbit_sum(
    streams: Sequence[ShellStream],
    points: np.ndarray,
    policy: TruncationPolicy,
    weight: int,
    label: str,
    base: Optional[np.ndarray] = None,
    real_form: bool = False,
) -> OrbitSum:
    """
    Sum term functions shell by shell until the stopping rule holds.

    Shells of all streams with the same index are summed together. Summation
    stops once two consecutive shells have magnitude sums below
    abs_tol + rel_tol·|partial| at every point (never before min_word_len), when
    the streams run out, or at the shell cap or element budget.

    Raises:
        ConvergenceError: At the cap under a strict policy, or on any
            non-finite shell
    """
    points = np.atleast_1d(np.asarray(points, dtype=complex))
    total = np.zeros(points.shape[0], dtype=complex) if base is None else base.astype(complex)
    tails = np.zeros(points.shape[0])
    shell_sums: List[float] = []
    sizes = [0] * len(streams)
    active = [True] * len(streams)
    terms = 0
    word_len = 0
    small_prev = False
    converged = False
    exhausted = False
    for length in range(policy.max_word_len + 1):
        projected = terms + sum(n * st.branching for n, st in zip(sizes, streams))
        if length > 0 and projected > policy.max_terms:
            logger.warning("%s: element budget %d reached at shell %d", label, policy.max_terms, word_len)
            break
        shell_total = np.zeros_like(total)
        shell_mag = np.zeros(points.shape[0])
        found = False
        for index, stream in enumerate(streams):
            if not active[index]:
                continue
            shell = next(stream.shells, None)
            if shell is None or len(shell) == 0:
                active[index] = False
                sizes[index] = 0
                continue
            found = True
            sizes[index] = len(shell)
            for start in range(0, len(shell), TERM_BLOCK):
                block = stream.term(shell.matrices[start : start + TERM_BLOCK], points)
                shell_total += block.sum(axis=1)
                shell_mag += np.abs(block).sum(axis=1)
            terms += len(shell)
        if not found:
            exhausted = True
            tails = np.zeros(points.shape[0])
            break
        if not np.all(np.isfinite(shell_mag)):
            raise ConvergenceError(f"{label}: non-finite terms in shell {length}")
        total = total + shell_total
        tails = shell_mag
        word_len = length
        shell_sums.append(float(np.max(shell_mag)))
        logger.debug("%s: shell %d magnitude %.3e", label, length, shell_sums[-1])
        small = bool(np.all(shell_mag <= policy.abs_tol + policy.rel_tol * np.abs(total)))
        if length >= policy.min_word_len and small and small_prev:
            converged = True
            break
        small_prev = small
    if exhausted:
        converged = True
    if not converged:
        if len(shell_sums) >= 2 and shell_sums[-1] > shell_sums[-2]:
            logger.warning("%s: shell sums are not decreasing at the cap", label)
        if policy.strict:
            raise ConvergenceError(
                f"{label}: not converged at shell {word_len} (tail {float(np.max(tails)):.3e})"
            )
        logger.warning(
            "%s: not converged at shell %d (tail %.3e)", label, word_len, float(np.max(tails))
        )
    return OrbitSum(
        values=total,
        tails=tails,
        weight=weight,
        word_len=word_len,
        terms=terms,
        converged=converged,
        shell_sums=shell_sums,
        real_form=real_form,
    )


def _branching(group: FuchsianGroup) -> int:
    return max(1, 2 * group.rank - 1)


def batch_centre(points: np.ndarray) -> complex:
    """Mean abscissa and geometric-mean height of a point batch."""
    points = np.atleast_1d(np.asarray(points, dtype=complex))
    return complex(float(np.mean(points.real)), float(np.exp(np.mean(np.log(points.imag)))))


def shell_stream(
    group: FuchsianGroup,
    max_shells: int,
    term: TermFn,
    points: np.ndarray,
    excluded_first: Optional[int] = None,
    base: Optional[complex] = None,
) -> ShellStream:
    """
    Shells for an orbit sum over `group`.

    Groups with a parabolic generator are walked by displacement from `base`
    (the batch centre by default); powers of a parabolic decay only
    polynomially in word length, so word-length shells would not converge.
    """
    if has_cusps(group):
        centre = batch_centre(points) if base is None else complex(base)
        shells = iter_displacement_shells(group, centre, max_shells, excluded_first)
        return ShellStream(shells, term, DISPLACEMENT_BRANCHING)
    return ShellStream(iter_shells(group, max_shells, excluded_first, False), term, _branching(group))


def _require_re_above(s: complex, bound: float, what: str) -> None:
    if not s.real > bound:
        raise DomainError(f"{what} needs ℜs > {bound:g}, got s = {s}")


def _axis_matrix(group: FuchsianGroup, c_gen: int) -> np.ndarray:
    if not 1 <= c_gen <= group.rank:
        raise DomainError(f"generator index {c_gen} out of range")
    return conjugator_to_axis(group, c_gen).as_array()


# Batch evaluators. Each returns the lift values y^q f over an array of points.


def omega_lifts(
    group: FuchsianGroup, c_gen: int, s: SLike, points: np.ndarray, policy: TruncationPolicy
) -> OrbitSum:
    """Lift of Ω_c(s): coset sum of e^{-iθ} sin^{s+1}θ / (2i k(s))."""
    s = as_complex(s)
    _require_re_above(s, 0.0, "the hyperbolic series")
    axis = _axis_matrix(group, c_gen)
    scale = 1.0 / (2j * k_factor(s))

    def term(mats: np.ndarray, pts: np.ndarray) -> np.ndarray:
        moved = axis @ mats
        return scale * angular_base(images(moved, pts), s + 1.0, 1) * weight_factor(moved, pts, 1)

    stream = shell_stream(group, policy.max_word_len, term, points, c_gen)
    return orbit_sum([stream], points, policy, 1, "hyperbolic series", real_form=True)


def alpha_lifts(
    group: FuchsianGroup, c_gen: int, s: SLike, points: np.ndarray, policy: TruncationPolicy
) -> OrbitSum:
    """Lift of α_l(s) = Σ γ*[sin^{s-1}θ dθ]."""
    s = as_complex(s)
    _require_re_above(s, 1.0, "α_l")
    axis = _axis_matrix(group, c_gen)

    def term(mats: np.ndarray, pts: np.ndarray) -> np.ndarray:
        moved = axis @ mats
        return angular_base(images(moved, pts), s, 1) * weight_factor(moved, pts, 1) / 2j

    stream = shell_stream(group, policy.max_word_len, term, points, c_gen)
    return orbit_sum([stream], points, policy, 1, "α_l series", real_form=True)


def weight_q_lifts(
    group: FuchsianGroup, c_gen: int, q: int, s: SLike, points: np.ndarray, policy: TruncationPolicy
) -> OrbitSum:
    """
    Lift of A_{l,q}(s), summed from dz^q coefficients (γ'(z)/γ(z))^q sin^{s-q}θ(γz).

    This path never forms the angular base, which keeps it independent of `alpha_lifts`.
    """
    s = as_complex(s)
    if q < 0:
        raise DomainError("weight q must be non-negative")
    _require_re_above(s, 1.0, "the weight-q series")
    axis = _axis_matrix(group, c_gen)

    def term(mats: np.ndarray, pts: np.ndarray) -> np.ndarray:
        moved = axis @ mats
        c, d = moved[:, 1, 0], moved[:, 1, 1]
        w = images(moved, pts)
        derivative = 1.0 / (c * pts[:, None] + d) ** 2
        coeff = (derivative / w) ** q * (w.imag / np.abs(w)) ** (s - q)
        return coeff * (pts.imag[:, None] ** q)

    stream = shell_stream(group, policy.max_word_len, term, points, c_gen)
    return orbit_sum([stream], points, policy, q, "weight-q series")


def parabolic_lifts(
    group: FuchsianGroup,
    cusp_gen: int,
    q: int,
    s: SLike,
    points: np.ndarray,
    policy: TruncationPolicy,
    scaling: Optional[Matrix2] = None,
    min_re_s: float = 1.0,
) -> OrbitSum:
    """Lift of E_{A,q}(s): Σ over ⟨A⟩\\Γ of Im(σ^{-1}γz)^s ((c z̄ + d)/(cz + d))^q with σ^{-1}γ = (a b; c d)."""
    s = as_complex(s)
    _require_re_above(s, min_re_s, "the parabolic series")
    if not 1 <= cusp_gen <= group.rank:
        raise DomainError(f"generator index {cusp_gen} out of range")
    if group.generators[cusp_gen - 1].trace_type is not TraceType.PARABOLIC:
        raise DomainError(f"cusp generator {cusp_gen} is not parabolic")
    sigma = scaling if scaling is not None else scaling_matrix(group, cusp_gen)
    inv = sigma.inverse().as_array()

    def term(mats: np.ndarray, pts: np.ndarray) -> np.ndarray:
        moved = inv @ mats
        return images(moved, pts).imag ** s * weight_factor(moved, pts, q)

    stream = shell_stream(group, policy.max_word_len, term, points, cusp_gen)
    return orbit_sum([stream], points, policy, q, "parabolic series")


def patterson_lifts(
    group: FuchsianGroup,
    b: Optional[float],
    k: int,
    s: SLike,
    points: np.ndarray,
    policy: TruncationPolicy,
    min_re_s: float = 1.0,
) -> OrbitSum:
    """Lift of E_b(z, s, k): Σ_γ j(γ, z)^k P(γz, b)^s (γz, b)^k over the whole group."""
    s = as_complex(s)
    _require_re_above(s, min_re_s, "the Patterson series")

    def term(mats: np.ndarray, pts: np.ndarray) -> np.ndarray:
        w = images(mats, pts)
        if b is None or math.isinf(b):
            kernel = w.imag
            phase = np.ones_like(w)
        else:
            kernel = w.imag / np.abs(w - b) ** 2
            phase = (np.conj(w) - b) / (w - b)
        return kernel**s * phase**k * weight_factor(mats, pts, k)

    stream = shell_stream(group, policy.max_word_len, term, points)
    return orbit_sum([stream], points, policy, k, "Patterson series")


def _require_two_cusps(group: FuchsianGroup) -> float:
    """Width λ of the presentation A = z + λ, B = z/(λz + 1) needed by θ^s."""
    if group.rank != 2:
        raise DomainError("θ^s needs a rank-2 group with cusps at ∞ and 0")
    a_gen, b_gen = group.generators[0], group.generators[1]
    if a_gen.trace_type is not TraceType.PARABOLIC or b_gen.trace_type is not TraceType.PARABOLIC:
        raise DomainError("θ^s needs two parabolic generators")
    a, b = a_gen.matrix, b_gen.matrix
    if a.c != 0.0 or b.b != 0.0:
        raise DomainError("θ^s needs generator 1 fixing ∞ and generator 2 fixing 0")
    lam = cusp_width(group, 1)
    if abs(abs(b.c / b.d) - lam) > 1e-12 * max(1.0, lam):
        raise DomainError("θ^s needs the cusps at 0 and ∞ exchanged by z ↦ -1/z")
    return lam


def theta_base(w: np.ndarray, s: complex) -> np.ndarray:
    """(w̄/|w|) sin^s θ, the lift of (y/|z|)^{s-1} dz/z."""
    return angular_base(w, s, 1)


def _translation_tail(w: np.ndarray, s: complex, lam: float, n_cut: int) -> np.ndarray:
    """Midpoint Euler–Maclaurin tails of Σ_{|n| > n_cut} theta_base(w + nλ)."""
    u, v = w.real, w.imag
    right = u + (n_cut + 0.5) * lam
    left = (n_cut + 0.5) * lam - u
    vs = v**s
    x_part = vs * ((right**2 + v**2) ** ((1.0 - s) / 2.0) - (left**2 + v**2) ** ((1.0 - s) / 2.0)) / (s - 1.0)
    a, bb, c = (s + 1.0) / 2.0, s / 2.0, s / 2.0 + 1.0
    y_part = (
        v ** (s + 1.0)
        / s
        * (
            right ** (-s) * gauss_2f1(a, bb, c, -(v**2) / right**2)
            + left ** (-s) * gauss_2f1(a, bb, c, -(v**2) / left**2)
        )
    )
    edge = (n_cut + 0.5) * lam
    h = np.minimum(right, left) / 32.0
    corrections = midpoint_corrections(lambda t: theta_base(w + t, s), edge, lam, h)
    corrections = corrections + midpoint_corrections(lambda t: theta_base(w - t, s), edge, lam, h)
    return (x_part - 1j * y_part) / lam + corrections


def translation_remainder(w: np.ndarray, s: complex, lam: float) -> np.ndarray:
    """Σ_{n ≠ 0} theta_base(w + nλ), direct near n = 0 with analytic tails beyond."""
    if w.size == 0:
        return np.zeros_like(w)
    reach = float(np.max(np.abs(w.real))) + TAIL_SPAN * max(float(np.max(w.imag)), lam)
    n_cut = int(math.ceil(reach / lam))
    acc = np.zeros_like(w)
    for n in range(1, n_cut + 1):
        acc = acc + theta_base(w + n * lam, s) + theta_base(w - n * lam, s)
    return acc + _translation_tail(w, s, lam, n_cut)


def _zero_cusp_remainder(w: np.ndarray, s: complex, lam: float) -> np.ndarray:
    # The B-orbit sum is the ∞-orbit sum moved by z ↦ -1/z, which negates the base form.
    moved = -1.0 / w
    full = theta_base(moved, s) + translation_remainder(moved, s, lam)
    return -(np.conj(w) / w) * full - theta_base(w, s)


def theta_lifts(
    group: FuchsianGroup,
    s: SLike,
    points: np.ndarray,
    policy: TruncationPolicy,
    unfold: bool = True,
) -> OrbitSum:
    """
    Lift of θ^s summed over the whole group.

    With `unfold`, every element is written as A^a ρ or B^b ρ with a maximal
    leading syllable; the syllable sums are the two cusp-orbit sums, done in
    closed form, and only the remainders ρ are enumerated. Without it the
    reduced words themselves are summed.
    """
    s = as_complex(s)
    _require_re_above(s, 1.0, "θ^s")
    lam = _require_two_cusps(group)
    scale = 1.0 / k_factor(s - 1.0)
    points = np.atleast_1d(np.asarray(points, dtype=complex))

    if not unfold:

        def direct(mats: np.ndarray, pts: np.ndarray) -> np.ndarray:
            return scale * theta_base(images(mats, pts), s) * weight_factor(mats, pts, 1)

        stream = shell_stream(group, policy.max_word_len, direct, points)
        return orbit_sum([stream], points, policy, 1, "θ series")

    def after_b(mats: np.ndarray, pts: np.ndarray) -> np.ndarray:
        w = images(mats, pts)
        return scale * translation_remainder(w, s, lam) * weight_factor(mats, pts, 1)

    def after_a(mats: np.ndarray, pts: np.ndarray) -> np.ndarray:
        w = images(mats, pts)
        return scale * _zero_cusp_remainder(w, s, lam) * weight_factor(mats, pts, 1)

    streams = [
        shell_stream(group, policy.max_word_len, after_b, points, 1),
        shell_stream(group, policy.max_word_len, after_a, points, 2),
    ]
    base = scale * theta_base(points[:, None], s)[:, 0]
    return orbit_sum(streams, points, policy, 1, "θ series", base=base)


def eta_hat_lifts(
    group: FuchsianGroup, s: SLike, points: np.ndarray, policy: TruncationPolicy, unfold: bool = True
) -> OrbitSum:
    """Lift of η̂^s = Im θ^s, whose dz-part is θ^s/(2i)."""
    theta = theta_lifts(group, s, points, policy, unfold)
    out = theta.scaled(1.0 / 2j)
    out.real_form = True
    return out


# Single-point operations.


def _form(result: OrbitSum, point: PointH, index: int = 0, factor: complex = 1.0) -> FormValue:
    return FormValue.from_lift(result.weight, complex(result.values[index]) * factor, point)


def _evaluation(
    family: SeriesFamily,
    result: OrbitSum,
    point: PointH,
    normalized: Optional[FormValue] = None,
) -> SeriesEvaluation:
    return SeriesEvaluation(
        family=family,
        value=_form(result, point),
        word_len=result.word_len,
        terms=result.terms,
        tail_estimate=float(result.tails[0]),
        converged=result.converged,
        shell_sums=result.shell_sums,
        normalized=normalized,
    )


def hyperbolic_eisenstein(
    group: FuchsianGroup,
    c_gen: int,
    s: SLike,
    z: PointH,
    trunc: Optional[TruncationPolicy] = None,
) -> SeriesEvaluation:
    """
    Hyperbolic Eisenstein series Ω_c(s) dual to the closed geodesic of `c_gen`.

    The value is the dz-coefficient f of the real form f dz + f̄ dz̄.

    Args:
        group: The group
        c_gen: 1-based index of a hyperbolic generator
        s: Spectral parameter, ℜs > 0
        z: Evaluation point
        trunc: Truncation policy (defaults apply when omitted)

    Raises:
        DomainError: If ℜs ≤ 0 or the generator is not hyperbolic
        ConvergenceError: At the cap under a strict policy
    """
    result = omega_lifts(group, c_gen, s, np.array([z.z]), trunc or TruncationPolicy())
    return _evaluation(SeriesFamily.HYPERBOLIC, result, z)


def alpha_series(
    group: FuchsianGroup,
    c_gen: int,
    s: SLike,
    z: PointH,
    trunc: Optional[TruncationPolicy] = None,
) -> SeriesEvaluation:
    """α_l(s) = k(s-1) Ω_l(s-1), summed from its own base form."""
    result = alpha_lifts(group, c_gen, s, np.array([z.z]), trunc or TruncationPolicy())
    return _evaluation(SeriesFamily.HYPERBOLIC, result, z)


def weight_q_series(
    group: FuchsianGroup,
    c_gen: int,
    q: int,
    s: SLike,
    z: PointH,
    trunc: Optional[TruncationPolicy] = None,
) -> SeriesEvaluation:
    """
    A_{l,q}(s) with Ξ_{l,q}(s) = A_{l,q}(s)/b_q(s) as the normalized companion.

    Raises:
        DomainError: If ℜs ≤ 1 or q < 0
        PoleError: Where b_q(s) vanishes
    """
    s = as_complex(s)
    norm = b_factor(q, s)
    result = weight_q_lifts(group, c_gen, q, s, np.array([z.z]), trunc or TruncationPolicy())
    return _evaluation(SeriesFamily.WEIGHT_Q, result, z, _form(result, z, factor=1.0 / norm))


def parabolic_eisenstein(
    group: FuchsianGroup,
    cusp_gen: int,
    q: int,
    s: SLike,
    z: PointH,
    trunc: Optional[TruncationPolicy] = None,
    scaling: Optional[Matrix2] = None,
    min_re_s: float = 1.0,
) -> SeriesEvaluation:
    """
    Weight-q parabolic Eisenstein series E_{A,q}(s) at the cusp of `cusp_gen`.

    q = 0 gives the classical E_A(z, s); for q = 1 the dz-coefficient is the
    1-form E_{A,1}/y dz.

    Args:
        scaling: Scaling matrix σ_A; defaults to `scaling_matrix(group, cusp_gen)`
        min_re_s: Lower bound enforced on ℜs
    """
    result = parabolic_lifts(
        group, cusp_gen, q, s, np.array([z.z]), trunc or TruncationPolicy(), scaling, min_re_s
    )
    return _evaluation(SeriesFamily.PARABOLIC, result, z)


def patterson_eisenstein(
    group: FuchsianGroup,
    b: Optional[float],
    k: int,
    s: SLike,
    z: PointH,
    trunc: Optional[TruncationPolicy] = None,
    min_re_s: float = 1.0,
) -> SeriesEvaluation:
    """
    Patterson's Eisenstein series E_b(z, s, k) at a boundary point b.

    Args:
        b: Real boundary point in the discontinuity set, or None for ∞
        k: Weight of the phase factors
    """
    result = patterson_lifts(group, b, k, s, np.array([z.z]), trunc or TruncationPolicy(), min_re_s)
    return _evaluation(SeriesFamily.PATTERSON, result, z)


def infinite_geodesic_series(
    group: FuchsianGroup,
    s: SLike,
    z: PointH,
    trunc: Optional[TruncationPolicy] = None,
    unfold: bool = True,
) -> Tuple[SeriesEvaluation, SeriesEvaluation]:
    """
    θ^s and η̂^s = Im θ^s for the geodesic from 0 to ∞ between two cusps.

    Returns:
        (theta, eta_hat); theta is a complex 1-form, eta_hat a real one
    """
    theta = theta_lifts(group, s, np.array([z.z]), trunc or TruncationPolicy(), unfold)
    eta = theta.scaled(1.0 / 2j)
    return _evaluation(SeriesFamily.THETA, theta, z), _evaluation(SeriesFamily.ETA_HAT, eta, z)


def dtheta_component(value: FormValue) -> float:
    """Coefficient of dθ in the real form f dz + f̄ dz̄, in polar coordinates about 0."""
    z = value.point.z
    return float(2.0 * (1j * z * complex(value.dz_coeff)).real)


def cusp_expansion_report(
    group: FuchsianGroup,
    s: SLike,
    heights: Sequence[float] = (10.0, 20.0, 40.0),
    x: float = 0.3,
    trunc: Optional[TruncationPolicy] = None,
) -> CuspExpansionReport:
    """
    Leading terms of θ^s at both cusps.

    At ∞ the dz-coefficient tends to 1/(iλ); at 0 it behaves like
    -1/(iλ z²). Deviations are reported as Y·|coefficient - leading| at
    z = x + iY and, for the cusp at 0, at -1/(x + iY) after undoing the z² factor.
    """
    s = as_complex(s)
    lam = _require_two_cusps(group)
    policy = trunc or TruncationPolicy()
    leading = 1.0 / (1j * lam)
    high = np.array([complex(x, y) for y in heights])
    low = -1.0 / high
    at_inf = theta_lifts(group, s, high, policy)
    at_zero = theta_lifts(group, s, low, policy)
    inf_dev = [float(y * abs(at_inf.values[i] / y - leading)) for i, y in enumerate(heights)]
    zero_dev = []
    for i, y in enumerate(heights):
        coeff = at_zero.values[i] / low[i].imag
        zero_dev.append(float(y * abs(-coeff * low[i] ** 2 - leading)))
    return CuspExpansionReport(
        s=s,
        width=lam,
        heights=[float(y) for y in heights],
        leading=leading,
        infinity_deviations=inf_dev,
        zero_deviations=zero_dev,
        converged=at_inf.converged and at_zero.converged,
    )


def family_lifts(
    family: SeriesFamily,
    group: FuchsianGroup,
    s: SLike,
    points: np.ndarray,
    config: SeriesConfig,
    policy: TruncationPolicy,
) -> OrbitSum:
    """
    Evaluate a series family over a point batch from its job configuration.

    Raises:
        DomainError: For the resolvent family, which lives in the resolvent module
    """
    if family is SeriesFamily.HYPERBOLIC:
        return omega_lifts(group, config.c_gen, s, points, policy)
    if family is SeriesFamily.WEIGHT_Q:
        return weight_q_lifts(group, config.c_gen, config.q, s, points, policy)
    if family is SeriesFamily.PARABOLIC:
        return parabolic_lifts(group, config.cusp_gen, config.q, s, points, policy)
    if family is SeriesFamily.PATTERSON:
        return patterson_lifts(group, config.boundary_point, config.k, s, points, policy)
    if family is SeriesFamily.THETA:
        return theta_lifts(group, s, points, policy)
    if family is SeriesFamily.ETA_HAT:
        return eta_hat_lifts(group, s, points, policy)
    raise DomainError(f"family {family.value} is not a series family")


def evaluate_chunks(
    evaluator: Callable[[np.ndarray], OrbitSum], points: np.ndarray, threads: int = 1
) -> List[OrbitSum]:
    """
    Evaluate a batch evaluator over fixed-size point chunks.

    Chunk boundaries do not depend on `threads`, and results come back in
    chunk order, so the output is the same for any thread count.
    """
    points = np.asarray(points, dtype=complex)
    chunks = [points[i : i + GRID_CHUNK] for i in range(0, points.shape[0], GRID_CHUNK)]
    if threads <= 1 or len(chunks) <= 1:
        return [evaluator(chunk) for chunk in chunks]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(evaluator, chunks))
