"""
Weight-2 resolvent kernels and the boundary limits that define funnel and
cusp Eisenstein series.
"""

import logging
import math
from typing import Dict, List, Literal, Optional, Sequence, Tuple

import numpy as np

from hyperbolic_eisenstein.exceptions import DomainError
from hyperbolic_eisenstein.group import cusp_width, scaling_matrix
from hyperbolic_eisenstein.hypgeom import distance_array, point_pair_invariant
from hyperbolic_eisenstein.series import (
    OrbitSum,
    images,
    orbit_sum,
    parabolic_lifts,
    patterson_lifts,
    shell_stream,
)
from hyperbolic_eisenstein.specfun import complex_gamma, gauss_2f1, midpoint_corrections, tail_integral
from hyperbolic_eisenstein.types.models import (
    FormValue,
    FuchsianGroup,
    KernelCandidate,
    KernelConventionReport,
    KernelValue,
    LimitIdentityReport,
    PointH,
    SeriesEvaluation,
    SeriesFamily,
    SLike,
    TraceType,
    TruncationPolicy,
    as_complex,
)

logger = logging.getLogger(__name__)

ThirdParameter = Literal["s", "2s"]

DIAGONAL_TOLERANCE = 1e-12

ORBIT_PROXIMITY = 1e-4

# Direct translation sums in the unfolded resolvent reach this many multiples of
# max(height sum, width) past the horizontal offset; the rest is a tail integral.
ORBIT_REACH = 4.0

# Deviations below this many stopping-rule tolerances count as numerical noise.
LIMIT_NOISE_FACTOR = 100.0

STENCIL_STEP = 1e-3


def kernel_constant(s: complex) -> complex:
    """Γ(s+1) Γ(s-1) / (4π Γ(2s))."""
    return complex_gamma(s + 1.0) * complex_gamma(s - 1.0) / (4.0 * math.pi * complex_gamma(2.0 * s))


def kernel_array(
    s: complex,
    z: np.ndarray,
    w: np.ndarray,
    third_parameter: ThirdParameter = "2s",
) -> np.ndarray:
    """
    g_s(z, w) = -((w - z̄)/(z - w̄)) C(s) σ^{-s} F(s+1, s-1; c; 1/σ) on broadcast arrays.

    `third_parameter` selects c = 2s (the weight-2 resolvent) or c = s.
    """
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    sigma = point_pair_invariant(z, w)
    phase = (w - np.conj(z)) / (z - np.conj(w))
    c = 2.0 * s if third_parameter == "2s" else s
    hyper = gauss_2f1(s + 1.0, s - 1.0, c, 1.0 / sigma)
    return -phase * kernel_constant(s) * sigma ** (-s) * hyper


def free_resolvent_w2(
    s: SLike, z: PointH, w: PointH, third_parameter: ThirdParameter = "2s"
) -> KernelValue:
    """
    Free weight-2 resolvent kernel g_s(z, w).

    Args:
        s: Spectral parameter, ℜs > 1
        z: First point
        w: Second point, distinct from z
        third_parameter: Third 2F1 parameter; "2s" is the eigenfunction of Δ₂ + s(1-s)

    Returns:
        The kernel value with σ and the separation

    Raises:
        DomainError: On the diagonal or for ℜs ≤ 1
        PoleError: If a Gamma argument hits a pole
    """
    s = as_complex(s)
    if not s.real > 1.0:
        raise DomainError(f"the weight-2 resolvent needs ℜs > 1, got s = {s}")
    separation = float(distance_array(z.z, w.z))
    if separation <= DIAGONAL_TOLERANCE:
        raise DomainError("the resolvent kernel is singular on the diagonal")
    value = complex(kernel_array(s, np.array(z.z), np.array(w.z), third_parameter))
    return KernelValue(
        value=value, sigma=float(point_pair_invariant(z.z, w.z)), separation=separation
    )


def weighted_laplacian_at(values: np.ndarray, y: float, h: float, q: int) -> complex:
    """Δ_{2q} = y²(∂x² + ∂y²) - 2iqy ∂x at the center of a 3x3 stencil indexed [y, x]."""
    center = values[1, 1]
    dxx = (values[1, 2] - 2.0 * center + values[1, 0]) / h**2
    dyy = (values[2, 1] - 2.0 * center + values[0, 1]) / h**2
    dx = (values[1, 2] - values[1, 0]) / (2.0 * h)
    return complex(y**2 * (dxx + dyy) - 2j * q * y * dx)


def select_kernel_convention(
    s_values: Sequence[float] = (2.0, 3.0),
    w: Optional[PointH] = None,
    separation: float = 2.0,
    h: float = STENCIL_STEP,
) -> KernelConventionReport:
    """
    Pick the third 2F1 parameter and the eigenvalue sign by finite differences.

    For each s, both kernels (c = s, c = 2s) are tested against both operators
    Δ₂ ± s(1-s) at a point at the given distance from w; the residual is
    relative to |g_s|. A combination is selected when it is the best for every s.
    """
    w = w or PointH(x=0.0, y=1.0)
    center = complex(w.x, w.y * math.exp(separation))
    offsets = np.array([[complex(dx, dy) for dx in (-h, 0.0, h)] for dy in (-h, 0.0, h)])
    stencil = center + offsets
    candidates: List[KernelCandidate] = []
    best: Dict[float, Tuple[str, str]] = {}
    for s_real in s_values:
        s = complex(s_real)
        scores = []
        for third in ("s", "2s"):
            vals = kernel_array(s, stencil, np.full(stencil.shape, w.z), third)
            lap = weighted_laplacian_at(vals, center.imag, h, 1)
            for sign in ("+", "-"):
                shift = s * (1.0 - s) if sign == "+" else -s * (1.0 - s)
                residual = abs(lap + shift * vals[1, 1]) / abs(vals[1, 1])
                candidates.append(
                    KernelCandidate(third_parameter=third, sign=sign, s=s_real, residual=residual)
                )
                scores.append((residual, third, sign))
        scores.sort()
        best[s_real] = (scores[0][1], scores[0][2])
        logger.info("kernel residuals at s=%g: %s", s_real, [(t, g, f"{r:.2e}") for r, t, g in scores])
    choices = set(best.values())
    if len(choices) != 1:
        return KernelConventionReport(candidates=candidates)
    third, sign = choices.pop()
    chosen = [c.residual for c in candidates if (c.third_parameter, c.sign) == (third, sign)]
    others = [c.residual for c in candidates if (c.third_parameter, c.sign) != (third, sign)]
    return KernelConventionReport(
        candidates=candidates,
        selected_third_parameter=third,
        selected_sign=sign,
        unique=max(chosen) < 1e-3 and min(others) > 1e-2,
    )


def _translation_generator(group: FuchsianGroup) -> Optional[int]:
    for index, info in enumerate(group.generators, start=1):
        if info.trace_type is TraceType.PARABOLIC and info.matrix.c == 0.0:
            return index
    return None


def resolvent_lifts(
    group: FuchsianGroup,
    s: SLike,
    points: np.ndarray,
    w: PointH,
    policy: TruncationPolicy,
    unfold: bool = True,
) -> OrbitSum:
    """
    G_s(z, w) = Σ_γ j_γ(w) g_s(z, γw) over a batch of z, for fixed w.

    When a generator is a translation z ↦ z + λ and `unfold` is set, the sum
    runs over its cosets; each translation orbit is summed directly out to
    ORBIT_REACH and by a tail integral with midpoint corrections beyond. Shells
    are taken by displacement from w on groups with cusps.

    Raises:
        DomainError: If ℜs ≤ 1 or some γw lies within 1e-4 of a point z
    """
    s = as_complex(s)
    if not s.real > 1.0:
        raise DomainError(f"the automorphic resolvent needs ℜs > 1, got s = {s}")
    cusp = _translation_generator(group) if unfold else None
    lam = cusp_width(group, cusp) if cusp is not None else 0.0
    target = w.z

    def phase_and_image(mats: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        c, d = mats[:, 1, 0], mats[:, 1, 1]
        moved = images(mats, np.array([target]))[0]
        return moved, (c * target + d) / (c * np.conj(target) + d)

    def check_proximity(z: np.ndarray, moved: np.ndarray) -> None:
        if np.min(distance_array(z, moved)) < ORBIT_PROXIMITY:
            raise DomainError("z lies on the orbit of w; G_s is singular there")

    def direct(mats: np.ndarray, pts: np.ndarray) -> np.ndarray:
        moved, factor = phase_and_image(mats)
        check_proximity(pts[:, None], moved[None, :])
        return kernel_array(s, pts[:, None], moved[None, :]) * factor[None, :]

    def unfolded(mats: np.ndarray, pts: np.ndarray) -> np.ndarray:
        moved, factor = phase_and_image(mats)
        zz, ww = pts[:, None], moved[None, :]
        offset = np.abs(ww.real - zz.real)
        height = float(np.max(moved.imag)) + float(np.max(pts.imag))
        n_cut = int(math.ceil((float(np.max(offset)) + ORBIT_REACH * max(height, lam)) / lam))
        acc = np.zeros((pts.shape[0], moved.shape[0]), dtype=complex)
        for n in range(-n_cut, n_cut + 1):
            shifted = ww + n * lam
            check_proximity(zz, shifted)
            acc = acc + kernel_array(s, zz, shifted)
        edge = (n_cut + 0.5) * lam
        h = (edge - offset) / 32.0
        for sign in (1.0, -1.0):

            def along(t: np.ndarray, sign: float = sign) -> np.ndarray:
                return kernel_array(s, zz, ww + sign * t)

            acc = acc + tail_integral(along, edge, 2.0 * s.real) / lam + midpoint_corrections(along, edge, lam, h)
        return acc * factor[None, :]

    if cusp is None:
        stream = shell_stream(group, policy.max_word_len, direct, points, base=target)
    else:
        stream = shell_stream(group, policy.max_word_len, unfolded, points, cusp, base=target)
    return orbit_sum([stream], points, policy, 1, "resolvent series")


def group_resolvent(
    group: FuchsianGroup,
    s: SLike,
    z: PointH,
    w: PointH,
    trunc: Optional[TruncationPolicy] = None,
    unfold: bool = True,
) -> SeriesEvaluation:
    """
    Automorphic resolvent G_s(z, w) of weight 1 in z.

    The value field holds G_s itself in its `auto_lift` slot; it transforms
    as G_s(γz, w) = j_γ(z) G_s(z, w).
    """
    result = resolvent_lifts(group, s, np.array([z.z]), w, trunc or TruncationPolicy(), unfold)
    return SeriesEvaluation(
        family=SeriesFamily.RESOLVENT,
        value=FormValue.from_lift(1, complex(result.values[0]), z),
        word_len=result.word_len,
        terms=result.terms,
        tail_estimate=float(result.tails[0]),
        converged=result.converged,
        shell_sums=result.shell_sums,
    )


def _richardson(grid: Sequence[float], values: Sequence[complex]) -> complex:
    # Fit L + c/t through the last two entries.
    if len(values) < 2:
        return values[-1]
    t1, t2 = grid[-2], grid[-1]
    return (t2 * values[-1] - t1 * values[-2]) / (t2 - t1)


def _noise_floor(policy: TruncationPolicy, sums: Sequence[OrbitSum]) -> float:
    """Relative deviation that truncation of the orbit sums alone can produce."""
    relative = [float(r.tails[0]) / max(abs(complex(r.values[0])), policy.abs_tol) for r in sums]
    return LIMIT_NOISE_FACTOR * max([policy.rel_tol, *relative])


def _monotone_within(deviations: Sequence[float], floor: float) -> bool:
    # Deviations at the noise floor may jitter.
    return all(later <= max(earlier, floor) for earlier, later in zip(deviations, deviations[1:]))


def cusp_limit_identity(
    group: FuchsianGroup,
    s: SLike,
    z: PointH,
    Y_grid: Sequence[float] = (10.0, 20.0, 40.0, 80.0),
    x_prime: float = 0.0,
    cusp_gen: int = 1,
    trunc: Optional[TruncationPolicy] = None,
) -> LimitIdentityReport:
    """
    (y'/λ)^{s-1} G_s(z, x' + iy') against E_{∞,1}(s, z)/(1 - 2s) as y' → ∞.

    Heights are measured in the cusp's width-normalized coordinate, and
    E_{∞,1} uses the scaling matrix, so for width 1 this is the identity as
    usually stated.

    Raises:
        DomainError: If the grid is not increasing or the cusp generator does not fix ∞
    """
    s = as_complex(s)
    if any(b <= a for a, b in zip(Y_grid, Y_grid[1:])) or not Y_grid:
        raise DomainError("Y_grid must be non-empty and increasing")
    lam = cusp_width(group, cusp_gen)
    policy = trunc or TruncationPolicy()
    e_inf = parabolic_lifts(
        group, cusp_gen, 1, s, np.array([z.z]), policy, scaling_matrix(group, cusp_gen)
    )
    reference = complex(e_inf.values[0]) / (1.0 - 2.0 * s)
    sums: List[OrbitSum] = [e_inf]
    lhs: List[complex] = []
    for height in Y_grid:
        g = resolvent_lifts(group, s, np.array([z.z]), PointH(x=x_prime, y=height), policy)
        sums.append(g)
        lhs.append((height / lam) ** (s - 1.0) * complex(g.values[0]))
    deviations = [abs(v - reference) / abs(reference) for v in lhs]
    limit = _richardson(list(Y_grid), lhs)
    floor = _noise_floor(policy, sums)
    logger.info("cusp limit deviations %s (noise floor %.1e)", [f"{d:.3e}" for d in deviations], floor)
    return LimitIdentityReport(
        identity="cusp",
        grid=list(Y_grid),
        lhs=lhs,
        rhs_reference=reference,
        deviations=deviations,
        extrapolated_limit=limit,
        deviation=deviations[-1],
        noise_floor=floor,
        monotone=_monotone_within(deviations, floor),
        converged=all(r.converged for r in sums),
        notes=[f"cusp width {lam:g}; heights normalized by the width"],
    )


def funnel_prefactors(s: complex) -> Tuple[complex, complex]:
    """(printed, derived) prefactors ∓4^s Γ(s+1)Γ(s-1)/(4π Γ(2s)) of the funnel limit."""
    derived = 4.0**s * kernel_constant(s)
    return -derived, derived


def funnel_limit_identity(
    group: FuchsianGroup,
    s: SLike,
    z: PointH,
    x_prime: float = 1.0,
    eps_grid: Sequence[float] = (1e-1, 1e-2, 1e-3),
    trunc: Optional[TruncationPolicy] = None,
) -> LimitIdentityReport:
    """
    Ratio of ε^{-s} G_s(z, x' + iε) to E_{x'}(z, s, 1) as ε → 0.

    The ratio tends to 4^s Γ(s+1)Γ(s-1)/(4π Γ(2s)); the report carries this
    derived prefactor next to the printed one of opposite sign, and the
    deviations are measured against the derived one.

    Raises:
        DomainError: If x' = 0 or the grid is not decreasing
    """
    s = as_complex(s)
    if x_prime == 0.0:
        raise DomainError("x' = 0 is a limit point of the cyclic group")
    if not eps_grid or any(b >= a for a, b in zip(eps_grid, eps_grid[1:])):
        raise DomainError("eps_grid must be non-empty and decreasing")
    policy = trunc or TruncationPolicy()
    patterson = patterson_lifts(group, x_prime, 1, s, np.array([z.z]), policy)
    reference = complex(patterson.values[0])
    printed, derived = funnel_prefactors(s)
    sums: List[OrbitSum] = [patterson]
    ratios: List[complex] = []
    for eps in eps_grid:
        g = resolvent_lifts(group, s, np.array([z.z]), PointH(x=x_prime, y=eps), policy)
        sums.append(g)
        ratios.append(eps ** (-s) * complex(g.values[0]) / reference)
    deviations = [abs(r - derived) / abs(derived) for r in ratios]
    limit = _richardson([1.0 / e for e in eps_grid], ratios)
    floor = _noise_floor(policy, sums)
    return LimitIdentityReport(
        identity="funnel",
        grid=list(eps_grid),
        lhs=ratios,
        rhs_reference=reference,
        deviations=deviations,
        extrapolated_limit=limit,
        deviation=deviations[-1],
        noise_floor=floor,
        monotone=_monotone_within(deviations, floor),
        converged=all(r.converged for r in sums),
        printed_factor=printed,
        derived_factor=derived,
        notes=["lhs holds ε^{-s} G_s / E_{x'}(z, s, 1); the derived factor has the opposite sign of the printed one"],
    )
