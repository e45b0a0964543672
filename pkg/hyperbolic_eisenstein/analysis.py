"""
Verification harness.

Finite-difference weighted Laplacians and Maass operators on automorphic
lifts, functional-equation residuals, cycle integrals and intersection
numbers, the duality check, L² masses over fundamental domains, collar
checks and the degeneration diagnostic.
"""

import logging
import math
from typing import Any, Callable, List, Literal, Optional, Sequence, Tuple

import numpy as np

from hyperbolic_eisenstein.exceptions import DomainError
from hyperbolic_eisenstein.group import (
    build_preset,
    conjugator_to_axis,
    disjoint_lift_pairs,
    enumerate_elements,
    lift_axes,
    multiplicity_bound,
    orbital_count,
)
from hyperbolic_eisenstein.hypgeom import (
    axis_normalizer,
    collar_halfwidth,
    distance_array,
    geodesic_endpoints,
    geodesic_through,
    translation_length,
)
from hyperbolic_eisenstein.resolvent import resolvent_lifts
from hyperbolic_eisenstein.series import (
    OrbitSum,
    alpha_lifts,
    family_lifts,
    omega_lifts,
    parabolic_lifts,
    weight_q_lifts,
)
from hyperbolic_eisenstein.specfun import k_factor
from hyperbolic_eisenstein.types.models import (
    Cycle,
    CycleKind,
    DegenerationTable,
    FuchsianGroup,
    GridField,
    GridSpec,
    GroupElement,
    L2Report,
    MaassDirection,
    Matrix2,
    PointH,
    PresetName,
    ResidualReport,
    SeriesConfig,
    SeriesFamily,
    SLike,
    TruncationPolicy,
    as_complex,
)

logger = logging.getLogger(__name__)

DEFAULT_STEP = 1e-3

DEFAULT_CENTER = PointH(x=0.4, y=1.3)

RESIDUAL_FLOOR = 1e-12

QUAD_NODES = 16

# Relative side values below this count as lying on the geodesic.
SIDE_SNAP = 1e-10

GRAZING = 1e-3

FormEvaluator = Callable[[np.ndarray], np.ndarray]

LiftEvaluator = Callable[[complex, np.ndarray, TruncationPolicy], OrbitSum]

_SHIFT_FAMILIES = (
    SeriesFamily.HYPERBOLIC,
    SeriesFamily.WEIGHT_Q,
    SeriesFamily.THETA,
    SeriesFamily.ETA_HAT,
)


def _apply(m: Matrix2, z: Any) -> Any:
    return (m.a * z + m.b) / (m.c * z + m.d)


# Grid fields and differential operators.


def stencil_grid(center: PointH, h: float = DEFAULT_STEP, n: int = 5) -> GridSpec:
    """Square n×n grid of spacing h centred on a point."""
    if n < 3:
        raise DomainError("a stencil grid needs at least 3 nodes per side")
    half = h * (n - 1) / 2.0
    return GridSpec(
        x_min=center.x - half,
        x_max=center.x + half,
        y_min=center.y - half,
        y_max=center.y + half,
        nx=n,
        ny=n,
    )


def grid_step(spec: GridSpec) -> float:
    """
    The common spacing of a grid.

    Raises:
        DomainError: If the grid has fewer than 3 nodes per side or is not uniform
    """
    if spec.nx < 3 or spec.ny < 3:
        raise DomainError("grid too small: five-point stencils need at least 3x3 nodes")
    hx = (spec.x_max - spec.x_min) / (spec.nx - 1)
    hy = (spec.y_max - spec.y_min) / (spec.ny - 1)
    if abs(hx - hy) > 1e-9 * max(hx, hy):
        raise DomainError(f"grid spacing must be uniform, got hx = {hx:g}, hy = {hy:g}")
    return hx


def field_on_grid(values: np.ndarray, spec: GridSpec, weight: int) -> GridField:
    """Wrap row-major lift values (as produced by `GridSpec.points`) into a GridField."""
    return GridField(
        x_min=spec.x_min,
        y_min=spec.y_min,
        h=grid_step(spec),
        values=np.asarray(values, dtype=complex).reshape(spec.ny, spec.nx),
        weight=weight,
    )


def _require_stencil(field: GridField) -> None:
    ny, nx = field.shape
    if ny < 3 or nx < 3:
        raise DomainError("grid too small: five-point stencils need at least 3x3 nodes")
    if not np.all(np.isfinite(field.values)):
        raise DomainError("field values must be finite")


def _inner(field: GridField, values: np.ndarray, weight: int) -> GridField:
    return GridField(
        x_min=field.x_min + field.h,
        y_min=field.y_min + field.h,
        h=field.h,
        values=values,
        weight=weight,
    )


def apply_weighted_laplacian(field: GridField) -> GridField:
    """
    Δ_{2q} = y²(∂x² + ∂y²) - 2iqy ∂x by centred second-order differences.

    The result lives on the interior nodes; the boundary ring is dropped.

    Raises:
        DomainError: If the grid is smaller than 3x3 or holds non-finite values
    """
    _require_stencil(field)
    v, h, q = field.values, field.h, field.weight
    y = field.ys[1:-1, None]
    center = v[1:-1, 1:-1]
    dxx = (v[1:-1, 2:] - 2.0 * center + v[1:-1, :-2]) / h**2
    dyy = (v[2:, 1:-1] - 2.0 * center + v[:-2, 1:-1]) / h**2
    dx = (v[1:-1, 2:] - v[1:-1, :-2]) / (2.0 * h)
    return _inner(field, y**2 * (dxx + dyy) - 2j * q * y * dx, q)


def apply_maass(field: GridField, direction: MaassDirection) -> GridField:
    """
    Raising K_q = (z - z̄)∂_z + q or lowering L_q = (z̄ - z)∂_z̄ - q.

    In real coordinates K_q = iy∂x + y∂y + q and L_q = -iy∂x + y∂y - q. The
    output has weight q ± 1 and lives on the interior nodes.
    """
    _require_stencil(field)
    direction = MaassDirection(direction)
    v, h, q = field.values, field.h, field.weight
    y = field.ys[1:-1, None]
    center = v[1:-1, 1:-1]
    dx = (v[1:-1, 2:] - v[1:-1, :-2]) / (2.0 * h)
    dy = (v[2:, 1:-1] - v[:-2, 1:-1]) / (2.0 * h)
    if direction is MaassDirection.RAISE:
        return _inner(field, 1j * y * dx + y * dy + q * center, q + 1)
    return _inner(field, -1j * y * dx + y * dy - q * center, q - 1)


def composition_identity_residual(
    field: GridField, order: Literal["raise_lower", "lower_raise"] = "raise_lower"
) -> float:
    """
    Relative residual of L_{q+1}K_q = Δ_{2q} - q(q+1) or K_{q-1}L_q = Δ_{2q} - q(q-1).

    Needs at least a 5x5 grid; the comparison runs two rings in.
    """
    q = field.weight
    if order == "raise_lower":
        composed = apply_maass(apply_maass(field, MaassDirection.RAISE), MaassDirection.LOWER)
        shift = q * (q + 1)
    else:
        composed = apply_maass(apply_maass(field, MaassDirection.LOWER), MaassDirection.RAISE)
        shift = q * (q - 1)
    lap = apply_weighted_laplacian(field).values[1:-1, 1:-1]
    expected = lap - shift * field.values[2:-2, 2:-2]
    scale = float(np.max(np.abs(expected))) + RESIDUAL_FLOOR
    return float(np.max(np.abs(composed.values - expected))) / scale


# Functional equations.


def matched_policy(policy: TruncationPolicy, word_len: int) -> TruncationPolicy:
    """A policy that sums exactly the shells up to `word_len`, for sums compared term by term."""
    return policy.model_copy(
        update={
            "min_word_len": word_len,
            "max_word_len": word_len + 1,
            "abs_tol": 1e300,
            "strict": False,
        }
    )


def _lift_evaluator(family: SeriesFamily, group: FuchsianGroup, config: SeriesConfig) -> LiftEvaluator:
    if family is SeriesFamily.RESOLVENT:
        if config.w is None:
            raise DomainError("the resolvent family needs the second point w")
        w = PointH(x=config.w[0], y=config.w[1])
        return lambda s, pts, policy: resolvent_lifts(group, s, pts, w, policy)
    return lambda s, pts, policy: family_lifts(family, group, s, pts, config, policy)


def functional_equation_residual(
    family: SeriesFamily,
    group: FuchsianGroup,
    s: SLike,
    grid: Optional[GridSpec] = None,
    config: Optional[SeriesConfig] = None,
    trunc: Optional[TruncationPolicy] = None,
) -> ResidualReport:
    """
    Relative sup-norm residual of a family's differential equation on a grid.

    Ω, A_{l,q}, θ and η̂ are compared with their own lift at s + 2, summed
    over exactly the same elements; the parabolic, Patterson and resolvent
    families are eigenfunctions and are compared against s(1 - s) times the
    lift. The grid is evaluated as one batch so every stencil shares one
    truncation.

    Args:
        family: Series family
        group: The group
        s: Spectral parameter; s and s + 2 must both be in the family's domain
        grid: Uniform grid, by default 5x5 nodes of spacing 1e-3 about 0.4 + 1.3i
        config: Family parameters (c_gen, q, cusp_gen, boundary point, w)
        trunc: Truncation policy for the sum at s

    Returns:
        A ResidualReport; `residual` is max |LHS - RHS| / (|reference| + 1e-12)
    """
    family = SeriesFamily(family)
    s = as_complex(s)
    config = config or SeriesConfig(family=family)
    policy = trunc or TruncationPolicy()
    spec = grid or stencil_grid(DEFAULT_CENTER)
    h = grid_step(spec)
    points = spec.points()
    evaluate = _lift_evaluator(family, group, config)

    first = evaluate(s, points, policy)
    q = first.weight
    field = field_on_grid(first.values, spec, q)
    lap = apply_weighted_laplacian(field).values
    f = field.interior()
    word_len, converged = first.word_len, first.converged
    if family in _SHIFT_FAMILIES:
        second = evaluate(s + 2.0, points, matched_policy(policy, first.word_len))
        f2 = field_on_grid(second.values, spec, q).interior()
        converged = converged and second.converged
        word_len = max(word_len, second.word_len)
        if family is SeriesFamily.HYPERBOLIC:
            lhs = -lap + s * (s + 1.0) * f
            rhs = s * (s + 1.0) * f2
        elif family is SeriesFamily.WEIGHT_Q:
            lhs = lap + s * (1.0 - s) * f
            rhs = (s + q) * (q - s) * f2
        else:
            lhs = lap
            rhs = s * (1.0 - s) * (f2 - f)
        reference = rhs
    else:
        lhs = lap + s * (1.0 - s) * f
        rhs = np.zeros_like(lhs)
        reference = s * (1.0 - s) * f
    residual = float(np.max(np.abs(lhs - rhs) / (np.abs(reference) + RESIDUAL_FLOOR)))
    logger.info("%s residual %.3e at s = %s (h = %g)", family.value, residual, s, h)
    return ResidualReport(
        family=family,
        s=s,
        q=q,
        grid={key: float(value) for key, value in spec.model_dump().items()},
        h=h,
        residual=residual,
        truncation=word_len,
        converged=converged,
    )


# Cycles and their integrals.


def _segment_frame(z1: complex, z2: complex) -> Tuple[Matrix2, float, float]:
    # T^{-1} and the log-heights of z1, z2 once T moves their geodesic onto the imaginary axis.
    e1, e2 = geodesic_through(PointH.from_complex(z1), PointH.from_complex(z2))
    t = axis_normalizer(e1, e2)
    return t.inverse(), math.log(abs(_apply(t, z1))), math.log(abs(_apply(t, z2)))


def geodesic_samples(z1: PointH, z2: PointH, n_samples: int = 33) -> List[PointH]:
    """Points equally spaced in arclength along the geodesic segment from z1 to z2."""
    if n_samples < 2:
        raise DomainError("a path needs at least two samples")
    inv, lo, hi = _segment_frame(z1.z, z2.z)
    zs = _apply(inv, 1j * np.exp(np.linspace(lo, hi, n_samples)))
    samples = [PointH.from_complex(complex(z)) for z in zs]
    samples[0], samples[-1] = z1, z2
    return samples


def geodesic_loop(element: GroupElement, n_samples: int = 33, offset: float = 0.3) -> Cycle:
    """
    The closed geodesic of a hyperbolic element, lifted to one period of its axis.

    The base point sits at log-height `offset` along the normalized axis; the
    path ends at its image under the element.

    Raises:
        DomainError: If the element is not hyperbolic
    """
    m = element.matrix
    length = translation_length(m)
    if not isinstance(length, float):
        raise DomainError("only hyperbolic elements close up into geodesic loops")
    inv = axis_normalizer(*geodesic_endpoints(m)).inverse()
    zs = _apply(inv, 1j * np.exp(offset + np.linspace(0.0, length, n_samples)))
    samples = [PointH.from_complex(complex(z)) for z in zs]
    samples[-1] = PointH.from_complex(_apply(m, samples[0].z))
    return Cycle(kind=CycleKind.GEODESIC_LOOP, base_point=samples[0], closer=element, samples=samples)


def generator_loop(group: FuchsianGroup, gen: int, n_samples: int = 33, offset: float = 0.3) -> Cycle:
    """`geodesic_loop` of a hyperbolic generator."""
    if not 1 <= gen <= group.rank:
        raise DomainError(f"generator index {gen} out of range")
    element = GroupElement(matrix=group.generators[gen - 1].matrix.normalized(), word=(gen,))
    return geodesic_loop(element, n_samples, offset)


def deck_path(element: GroupElement, base_point: PointH, n_samples: int = 33) -> Cycle:
    """The geodesic segment from a base point to its image, closed up by the element."""
    image = PointH.from_complex(_apply(element.matrix, base_point.z))
    return Cycle(
        kind=CycleKind.DECK_PATH,
        base_point=base_point,
        closer=element,
        samples=geodesic_samples(base_point, image, n_samples),
    )


def integrate_form_along_cycle(
    form: FormEvaluator, cycle: Cycle, n_quad: int = QUAD_NODES, real_form: bool = True
) -> complex:
    """
    Integrate a 1-form along the lift path of a cycle.

    Each pair of consecutive samples is joined by its geodesic segment,
    parameterized by log-height after normalization, and integrated with
    n_quad-point Gauss–Legendre; all nodes are evaluated in one batch.

    Args:
        form: Maps an array of points to the dz-coefficients f of the form
        cycle: The cycle
        n_quad: Gauss–Legendre nodes per segment
        real_form: Integrate the real form f dz + f̄ dz̄ (2 Re ∫ f dz) instead of f dz

    Returns:
        The integral (real for real forms)
    """
    nodes, weights = np.polynomial.legendre.leggauss(n_quad)
    points: List[np.ndarray] = []
    factors: List[np.ndarray] = []
    for start, end in zip(cycle.samples, cycle.samples[1:]):
        if start == end:
            continue
        inv, lo, hi = _segment_frame(start.z, end.z)
        half = (hi - lo) / 2.0
        u = 1j * np.exp(lo + half * (nodes + 1.0))
        # dz = (T^{-1})'(u) u dt for u = i e^t.
        derivative = 1.0 / (inv.c * u + inv.d) ** 2
        points.append(_apply(inv, u))
        factors.append(derivative * u * weights * half)
    if not points:
        return 0j
    coeffs = np.asarray(form(np.concatenate(points)), dtype=complex)
    if not np.all(np.isfinite(coeffs)):
        raise DomainError("the form evaluator returned non-finite values along the cycle")
    total = complex(np.sum(coeffs * np.concatenate(factors)))
    return complex(2.0 * total.real) if real_form else total


def _relative_side(axis: Tuple[float, float], points: np.ndarray) -> np.ndarray:
    # cos of the angle at 0 after normalizing the axis: positive to the right of travel.
    w = _apply(axis_normalizer(*axis), points)
    side = w.real / np.abs(w)
    side[np.abs(side) < SIDE_SNAP] = 0.0
    return side


def intersection_number(a: Cycle, b: Cycle, group: FuchsianGroup, max_word_len: int = 4) -> int:
    """
    Signed intersection number of two closed geodesics on the quotient.

    Lifts γ·axis(a) up to `max_word_len` are tested against one period of
    b's lift path. A crossing from the right of a lift to its left counts
    +1, the reverse -1; points on a lift count as right, which makes the
    count consistent between the two ends of the period. A lift that carries
    the whole path is b's own axis and is skipped.

    Raises:
        DomainError: If a's closer is not hyperbolic, or a lift grazes the whole path
    """
    path = np.array([p.z for p in b.samples])
    total = 0
    for axis in lift_axes(group, a.closer.matrix, max_word_len):
        side = _relative_side(axis, path)
        if np.all(side == 0.0):
            continue
        if np.all(np.abs(side) < GRAZING):
            raise DomainError("cycles are not transverse: a lift runs along the path")
        right = side >= 0.0
        total += int(np.sum(right[:-1] & ~right[1:])) - int(np.sum(~right[:-1] & right[1:]))
    return total


def duality_check(
    group: FuchsianGroup,
    c_gen: int,
    cycle: Cycle,
    s: SLike,
    trunc: Optional[TruncationPolicy] = None,
    n_quad: int = QUAD_NODES,
    max_word_len: int = 4,
) -> float:
    """
    |∫_cycle Ω_c(s)| - |c · cycle|, with c the closed geodesic of `c_gen`.

    Only magnitudes are compared; the sign of the pairing depends on the
    orientation convention of the intersection number.
    """
    s = as_complex(s)
    policy = trunc or TruncationPolicy()

    def omega(points: np.ndarray) -> np.ndarray:
        return omega_lifts(group, c_gen, s, points, policy).values / points.imag

    integral = integrate_form_along_cycle(omega, cycle, n_quad)
    crossing = intersection_number(generator_loop(group, c_gen), cycle, group, max_word_len)
    deviation = abs(integral) - abs(crossing)
    logger.info("duality: ∫Ω = %.10f, intersection %d, s = %s", integral.real, crossing, s)
    return float(deviation)


# L² masses and collars.


def _gauss_interval(lo: float, hi: float, n_quad: int, piece: float = 1.0) -> Tuple[np.ndarray, np.ndarray]:
    # Composite Gauss–Legendre on [lo, hi] with panels no longer than `piece`.
    nodes, weights = np.polynomial.legendre.leggauss(n_quad)
    panels = max(1, int(math.ceil((hi - lo) / piece)))
    edges = np.linspace(lo, hi, panels + 1)
    xs, ws = [], []
    for a, b in zip(edges, edges[1:]):
        half = (b - a) / 2.0
        xs.append(a + half * (nodes + 1.0))
        ws.append(weights * half)
    return np.concatenate(xs), np.concatenate(ws)


def _injectivity_radius(group: FuchsianGroup, z0: complex, max_word_len: int = 3) -> float:
    elements = enumerate_elements(group, max_word_len)[1:]
    mats = np.stack([e.matrix.as_array() for e in elements])
    moved = (mats[:, 0, 0] * z0 + mats[:, 0, 1]) / (mats[:, 1, 0] * z0 + mats[:, 1, 1])
    return float(np.min(distance_array(z0, moved))) / 2.0


def l2_norm_estimate(
    form: FormEvaluator,
    group: FuchsianGroup,
    funnel_cut_grid: Sequence[float],
    c_gen: int = 1,
    normalization: complex = 1.0,
    sigma: Optional[float] = None,
    n_quad: int = QUAD_NODES,
    multiplicity_radius: float = 1.0,
) -> L2Report:
    """
    L² mass of a weight-1 form over a fundamental domain cut at funnel depths.

    The domain is the Fermi strip 0 ≤ x1 ≤ l, |x2| ≤ r about the axis of
    `c_gen`, with the ping-pong disks of the other generators removed. The
    pointwise norm of f dz + f̄ dz̄ is 2|y f|, and the area element is
    cosh x2 dx1 dx2.

    Args:
        form: Maps points to the automorphic lift y f of the form
        group: The group; its certificate supplies the fundamental domain
        funnel_cut_grid: Increasing cut depths r
        c_gen: Generator whose axis anchors the Fermi coordinates
        normalization: Factor removed from the form for the unnormalized masses
            (k(s) for Ω_c(s))
        sigma: ℜs; when given, the bound k(σ - 1)(e^l - 1) on the unnormalized mass is reported
        n_quad: Gauss–Legendre nodes per unit panel
        multiplicity_radius: Ball radius c of the multiplicity diagnostic

    Raises:
        DomainError: If the cuts are not positive and increasing
    """
    cuts = [float(r) for r in funnel_cut_grid]
    if not cuts or cuts[0] <= 0.0 or any(b <= a for a, b in zip(cuts, cuts[1:])):
        raise DomainError("funnel cuts must be positive and increasing")
    length = translation_length(group.generators[c_gen - 1].matrix)
    if not isinstance(length, float):
        raise DomainError(f"generator {c_gen} is not hyperbolic")
    inv = conjugator_to_axis(group, c_gen).inverse()
    x1, w1 = _gauss_interval(0.0, length, n_quad)
    others = [d for d in group.discreteness_certificate.domains if abs(d.letter) != c_gen]

    def band_mass(lo: float, hi: float) -> float:
        x2, w2 = _gauss_interval(lo, hi, n_quad)
        x2 = np.concatenate([x2, -x2])
        w2 = np.concatenate([w2, w2])
        u1, u2 = np.meshgrid(x1, x2, indexing="ij")
        fermi = np.exp(u1) * (np.tanh(u2) + 1j / np.cosh(u2))
        points = _apply(inv, fermi.ravel())
        density = 4.0 * np.abs(np.asarray(form(points))) ** 2
        for domain in others:
            density[domain.contains(points)] = 0.0
        weights = np.outer(w1, w2 * np.cosh(x2)).ravel()
        return float(np.sum(density * weights))

    masses: List[float] = []
    total, previous = 0.0, 0.0
    for cut in cuts:
        total += band_mass(previous, cut)
        masses.append(total)
        previous = cut
    increments = [b - a for a, b in zip(masses, masses[1:])]
    scale = abs(normalization) ** 2
    z0 = complex(_apply(inv, 1j * math.exp(length / 2.0)))
    rho = _injectivity_radius(group, z0)
    observed = orbital_count(group, PointH.from_complex(z0), 2.0 * multiplicity_radius).counts[0]
    bound: Optional[float] = None
    if sigma is not None:
        bound = float(abs(k_factor(sigma - 1.0))) * (math.exp(length) - 1.0)
    logger.info("L² masses %s, increments %s", masses, increments)
    return L2Report(
        cuts=cuts,
        masses=masses,
        increments=increments,
        unnormalized_masses=[m * scale for m in masses],
        bound=bound,
        multiplicity_observed=observed,
        multiplicity_bound=multiplicity_bound(multiplicity_radius, rho),
    )


def standard_collar_check(lengths: Sequence[float] = (0.05, 0.1, 0.5, 1.0, 2.0, 4.0)) -> float:
    """Largest deviation of sinh(d) sinh(l/2) from 1 for the collar half-width d(l)."""
    return max(abs(math.sinh(collar_halfwidth(l)) * math.sinh(l / 2.0) - 1.0) for l in lengths)


def collar_separation_margin(group: FuchsianGroup, gen: int, count: int = 5, max_word_len: int = 3) -> float:
    """
    Smallest cosh d(axis, lift) - coth(l/2) over disjoint lifts of a simple closed geodesic.

    Non-negative when the collar separation inequality holds.

    Raises:
        DomainError: If fewer than one disjoint lift is found
    """
    length = translation_length(group.generators[gen - 1].matrix)
    if not isinstance(length, float):
        raise DomainError(f"generator {gen} is not hyperbolic")
    pairs = disjoint_lift_pairs(group, gen, count, max_word_len)
    if not pairs:
        raise DomainError("no disjoint lifts found; raise max_word_len")
    threshold = 1.0 / math.tanh(length / 2.0)
    return min(math.cosh(dist) - threshold for _, _, dist in pairs)


# Degeneration.

Correspondence = Callable[[float, np.ndarray], np.ndarray]

GroupFamily = Callable[[float], FuchsianGroup]


def elementary_correspondence(l: float, w: np.ndarray) -> np.ndarray:
    """π_l(w) = e^{lw}, which carries z ↦ z + 1 to z ↦ e^l z."""
    return np.exp(l * np.asarray(w, dtype=complex))


def _elementary_family(l: float) -> FuchsianGroup:
    return build_preset(PresetName.CYCLIC_HYPERBOLIC, [l])


def _pullback_factor(correspondence: Correspondence, l: float, w: np.ndarray, z: np.ndarray) -> np.ndarray:
    if correspondence is elementary_correspondence:
        return l * z
    step = 1e-6
    return (correspondence(l, w + step) - correspondence(l, w - step)) / (2.0 * step)


def degeneration_diagnostic(
    q: int,
    s: SLike,
    l_grid: Sequence[float],
    limit_group: Optional[FuchsianGroup] = None,
    compact_grid: Optional[GridSpec] = None,
    trunc: Optional[TruncationPolicy] = None,
    family: Optional[GroupFamily] = None,
    correspondence: Optional[Correspondence] = None,
) -> DegenerationTable:
    """
    Rescaled weight-q series of a pinching family against the cusp series of the limit.

    For each l the weight-q series of generator 1 is pulled back through π_l,
    divided by l^s, and compared with E_{∞,q}(s) of the limit group on the
    compact grid; the 1-form α_l(s)/l^s is compared with Im E_∞(s). Without
    `family` and `correspondence` the elementary family cyclic_hyperbolic(l)
    with π_l(w) = e^{lw} is used and the closed form (sin(lv)/l)^{s-1} is
    checked too; with them, the table only reports trends.

    Args:
        q: Weight
        s: Spectral parameter, ℜs > 1
        l_grid: Strictly decreasing lengths
        limit_group: The limit group; cyclic_parabolic by default
        compact_grid: Points w of the limit surface; u ∈ [-0.5, 0.5], v ∈ [0.5, 1] by default
        trunc: Truncation policy
        family: Group for each l (generator 1 is the pinching geodesic)
        correspondence: π_l as a function of (l, w)

    Raises:
        DomainError: If l_grid is not decreasing, ℜs ≤ 1, or only one of
            `family` / `correspondence` is given
    """
    s = as_complex(s)
    if not s.real > 1.0:
        raise DomainError(f"the degeneration diagnostic needs ℜs > 1, got s = {s}")
    lengths = [float(l) for l in l_grid]
    if not lengths or any(l <= 0.0 for l in lengths) or any(b >= a for a, b in zip(lengths, lengths[1:])):
        raise DomainError("l_grid must be positive and strictly decreasing")
    if (family is None) != (correspondence is None):
        raise DomainError("a custom family needs both the group family and the correspondence")
    assertive = family is None
    family = family or _elementary_family
    correspondence = correspondence or elementary_correspondence
    limit_group = limit_group or build_preset(PresetName.CYCLIC_PARABOLIC)
    policy = trunc or TruncationPolicy()
    spec = compact_grid or GridSpec(x_min=-0.5, x_max=0.5, y_min=0.5, y_max=1.0, nx=5, ny=5)
    w = spec.points()
    v = w.imag

    limit = parabolic_lifts(limit_group, 1, q, s, w, policy).values
    limit_one_form = parabolic_lifts(limit_group, 1, 1, s, w, policy).values / v / 2j

    sup_errors: List[float] = []
    closed_errors: List[float] = []
    one_form_errors: List[float] = []
    for l in lengths:
        group = family(l)
        z = correspondence(l, w)
        factor = _pullback_factor(correspondence, l, w, z)
        lifts = weight_q_lifts(group, 1, q, s, z, policy).values
        pulled = lifts / z.imag**q * factor**q * v**q / l**s
        sup_errors.append(float(np.max(np.abs(pulled - limit))))
        alpha = alpha_lifts(group, 1, s, z, policy).values / z.imag * factor / l**s
        one_form_errors.append(float(np.max(np.abs(alpha - limit_one_form))))
        if assertive:
            closed = (np.sin(l * v) / l) ** (s - 1.0)
            closed_errors.append(float(np.max(np.abs(closed - v ** (s - 1.0)))))
        logger.info("l = %g: sup error %.3e, 1-form error %.3e", l, sup_errors[-1], one_form_errors[-1])
    monotone = all(b < a for a, b in zip(sup_errors, sup_errors[1:]))
    if not assertive:
        logger.warning("custom degenerating family: errors are reported as trends only")
    return DegenerationTable(
        q=q,
        s=s,
        l_grid=lengths,
        sup_errors=sup_errors,
        closed_form_errors=closed_errors,
        one_form_errors=one_form_errors,
        monotone=monotone,
        assertive=assertive,
    )
