"""
Hyperbolic plane geometry on the upper half-plane model.

Möbius action, distances, geodesics and their normalizing maps, Fermi
coordinates about the imaginary axis, collars, the Poisson kernel and the
automorphy factors used by every series. Scalar operations take and return
the pydantic value types; the `*_batch` / array helpers are the vectorized
forms used by the orbit sums.
"""

import logging
import math
from typing import Optional, Tuple, Union

import numpy as np

from hyperbolic_eisenstein.exceptions import DomainError
from hyperbolic_eisenstein.types.models import (
    DET_TOLERANCE,
    FermiCoords,
    Matrix2,
    PointH,
    TraceType,
)

logger = logging.getLogger(__name__)

INFINITY = math.inf

# Boundary points are reals or INFINITY.
BoundaryPoint = float

TRACE_TOLERANCE = 1e-12


def _require_unimodular(g: Matrix2) -> None:
    if not g.is_unimodular(DET_TOLERANCE):
        raise DomainError(f"Matrix determinant {g.det!r} differs from 1 beyond tolerance")


def mobius_apply(g: Matrix2, z: PointH) -> PointH:
    """
    Apply z ↦ (az + b)/(cz + d).

    Args:
        g: Unit-determinant matrix
        z: Point of the upper half-plane

    Returns:
        The image point

    Raises:
        DomainError: If the determinant of g is not 1 within tolerance
    """
    _require_unimodular(g)
    w = (g.a * z.z + g.b) / (g.c * z.z + g.d)
    # Unit determinant keeps the image in H; clamp rounding at extreme heights.
    return PointH(x=float(w.real), y=max(float(w.imag), np.finfo(float).tiny))


def mobius_derivative(g: Matrix2, z: PointH) -> complex:
    """Derivative 1/(cz + d)^2 of a unit-determinant Möbius map."""
    return 1.0 / (g.c * z.z + g.d) ** 2


def act(mats: np.ndarray, z: Union[complex, np.ndarray]) -> np.ndarray:
    """
    Apply a stack of matrices to points.

    Args:
        mats: Array of shape (N, 2, 2)
        z: Scalar or array of shape (M,)

    Returns:
        Array of shape (M, N) (or (N,) for scalar z) of images
    """
    a, b, c, d = mats[:, 0, 0], mats[:, 0, 1], mats[:, 1, 0], mats[:, 1, 1]
    z = np.asarray(z, dtype=complex)
    if z.ndim == 0:
        return (a * z + b) / (c * z + d)
    zz = z[:, None]
    return (a * zz + b) / (c * zz + d)


def canonical_signs(mats: np.ndarray) -> np.ndarray:
    """
    Flip, in place, the sign of unimodular matrices so that c > 0, or c = 0 and a > 0.

    Determinants are not recomputed; ad - bc of long products loses all
    precision to cancellation.
    """
    c, a = mats[:, 1, 0], mats[:, 0, 0]
    flip = (c < 0.0) | ((c == 0.0) & (a < 0.0))
    mats[flip] *= -1.0
    return mats


def hyperbolic_distance(z: PointH, w: PointH) -> float:
    """
    Hyperbolic distance, via sinh(d/2) = |z - w| / (2 sqrt(y(z) y(w))).

    This is the cosh-d formula rewritten so nearby points keep full relative
    accuracy.
    """
    return float(distance_array(z.z, w.z))


def distance_array(z: Union[complex, np.ndarray], w: Union[complex, np.ndarray]) -> np.ndarray:
    """Vectorized hyperbolic distance for broadcastable complex arrays."""
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    return 2.0 * np.arcsinh(np.abs(z - w) / (2.0 * np.sqrt(z.imag * w.imag)))


def point_pair_invariant(z: Union[complex, np.ndarray], w: Union[complex, np.ndarray]) -> np.ndarray:
    """σ(z, w) = |z - conj(w)|^2 / (4 Im z Im w) = cosh^2(d(z, w)/2)."""
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    return np.abs(z - np.conj(w)) ** 2 / (4.0 * z.imag * w.imag)


def fermi_coordinates(z: PointH) -> FermiCoords:
    """
    Fermi coordinates about the imaginary axis.

    x1 = log|z|, and x2 is the signed distance to the axis with
    sign(x2) = sign(Re z), so that sin θ = 1/cosh x2 for the polar angle θ.
    """
    return FermiCoords(x1=math.log(abs(z.z)), x2=math.asinh(z.x / z.y))


def from_fermi(coords: FermiCoords) -> PointH:
    """Inverse of `fermi_coordinates`."""
    r = math.exp(coords.x1)
    return PointH(x=r * math.tanh(coords.x2), y=r / math.cosh(coords.x2))


def polar_angle(z: Union[complex, np.ndarray]) -> np.ndarray:
    """Polar angle θ ∈ (0, π) of points of H."""
    return np.angle(np.asarray(z, dtype=complex))


def collar_halfwidth(l: float) -> float:
    """
    Half-width d of the standard collar about a simple closed geodesic of length l.

    Raises:
        DomainError: If l is not positive
    """
    if not l > 0.0:
        raise DomainError("geodesic length must be positive")
    return math.asinh(1.0 / math.sinh(l / 2.0))


def in_standard_collar(z: PointH, l: float) -> bool:
    """Membership in {1 ≤ |z| ≤ e^l, l < θ < π - l} about the imaginary axis."""
    r = abs(z.z)
    theta = math.atan2(z.y, z.x)
    return 1.0 <= r <= math.exp(l) and l < theta < math.pi - l


def poisson_kernel(z: PointH, b: Optional[BoundaryPoint]) -> float:
    """
    Poisson kernel P(z, b) = y / |z - b|^2, with P(z, ∞) = y.

    Args:
        z: Point of H
        b: Real boundary point, or None / INFINITY for the point at infinity
    """
    if b is None or math.isinf(b):
        return z.y
    return z.y / abs(z.z - b) ** 2


def boundary_phase(z: Union[complex, np.ndarray], b: float) -> np.ndarray:
    """(z, b) = (conj(z) - b)/(z - b), a number of modulus one."""
    z = np.asarray(z, dtype=complex)
    return (np.conj(z) - b) / (z - b)


def automorphy_factor(g: Matrix2, z: Union[complex, np.ndarray]) -> np.ndarray:
    """j_g(z) = (cz + d)/(c conj(z) + d)."""
    z = np.asarray(z, dtype=complex)
    return (g.c * z + g.d) / (g.c * np.conj(z) + g.d)


def classify_trace(g: Matrix2) -> TraceType:
    """Classify a unit-determinant matrix by |trace|."""
    t = abs(g.trace)
    if abs(t - 2.0) <= TRACE_TOLERANCE:
        return TraceType.PARABOLIC
    return TraceType.HYPERBOLIC if t > 2.0 else TraceType.ELLIPTIC


def translation_length(g: Matrix2) -> Union[float, TraceType]:
    """
    Translation length 2 arccosh(|tr g|/2) of a hyperbolic element.

    Returns:
        The length for hyperbolic g, otherwise the PARABOLIC or ELLIPTIC tag
    """
    kind = classify_trace(g)
    if kind is not TraceType.HYPERBOLIC:
        return kind
    return 2.0 * math.acosh(abs(g.trace) / 2.0)


def fixed_points(g: Matrix2) -> Tuple[BoundaryPoint, BoundaryPoint]:
    """
    Boundary fixed points of a hyperbolic or parabolic element.

    Returns:
        (repelling, attracting) for hyperbolic g; the same point twice for parabolic g
    """
    a, b, c, d = g.a, g.b, g.c, g.d
    if classify_trace(g) is TraceType.ELLIPTIC:
        raise DomainError("elliptic elements have no boundary fixed points")
    if c == 0.0:
        if abs(a - d) <= TRACE_TOLERANCE * max(1.0, abs(a)):
            return INFINITY, INFINITY
        finite = b / (d - a)
        # z ↦ (a/d) z + b/d expands towards infinity when |a| > |d|.
        return (finite, INFINITY) if abs(a) > abs(d) else (INFINITY, finite)
    disc = max((a + d) ** 2 - 4.0, 0.0)
    roots = ((a - d - math.sqrt(disc)) / (2.0 * c), (a - d + math.sqrt(disc)) / (2.0 * c))
    if disc == 0.0:
        return roots[0], roots[0]
    # |g'(x)| = 1/(cx + d)^2 < 1 at the attracting point.
    if abs(c * roots[0] + d) > 1.0:
        return roots[1], roots[0]
    return roots[0], roots[1]


def axis_normalizer(e1: BoundaryPoint, e2: BoundaryPoint) -> Matrix2:
    """
    Unit-determinant map sending e1 to 0 and e2 to ∞.

    The oriented geodesic from e1 to e2 becomes the upward imaginary axis.
    """
    if math.isinf(e1) and math.isinf(e2):
        raise DomainError("a geodesic needs two distinct endpoints")
    if math.isinf(e2):
        return Matrix2(a=1.0, b=-e1, c=0.0, d=1.0)
    if math.isinf(e1):
        return Matrix2(a=0.0, b=-1.0, c=1.0, d=-e2)
    if e1 == e2:
        raise DomainError("a geodesic needs two distinct endpoints")
    if e1 > e2:
        return Matrix2(a=1.0, b=-e1, c=1.0, d=-e2).normalized()
    return Matrix2(a=-1.0, b=e1, c=1.0, d=-e2).normalized()


def boundary_image(g: Matrix2, x: BoundaryPoint) -> BoundaryPoint:
    """Image of a boundary point, with ∞ handled."""
    if math.isinf(x):
        return INFINITY if g.c == 0.0 else g.a / g.c
    denom = g.c * x + g.d
    if denom == 0.0:
        return INFINITY
    return (g.a * x + g.b) / denom


def geodesic_endpoints(g: Matrix2) -> Tuple[BoundaryPoint, BoundaryPoint]:
    """Oriented axis (repelling, attracting) of a hyperbolic element."""
    if classify_trace(g) is not TraceType.HYPERBOLIC:
        raise DomainError("only hyperbolic elements have an axis")
    return fixed_points(g)


def geodesic_through(z: PointH, w: PointH) -> Tuple[BoundaryPoint, BoundaryPoint]:
    """Endpoints (e1, e2) of the geodesic through z and w, oriented from z to w."""
    if z == w:
        raise DomainError("a geodesic needs two distinct points")
    if abs(z.x - w.x) <= 1e-14 * max(1.0, abs(z.x)):
        return (z.x, INFINITY) if w.y > z.y else (INFINITY, z.x)
    center = (abs(w.z) ** 2 - abs(z.z) ** 2) / (2.0 * (w.x - z.x))
    radius = abs(z.z - center)
    if w.x > z.x:
        return center - radius, center + radius
    return center + radius, center - radius


def geodesic_side(e1: BoundaryPoint, e2: BoundaryPoint, z: Union[complex, np.ndarray]) -> np.ndarray:
    """
    Signed side of points relative to the oriented geodesic e1 → e2.

    Positive values lie to the right of the direction of travel, negative to the left.
    """
    t = axis_normalizer(e1, e2)
    z = np.asarray(z, dtype=complex)
    return ((t.a * z + t.b) / (t.c * z + t.d)).real


def geodesic_distance(
    axis1: Tuple[BoundaryPoint, BoundaryPoint],
    axis2: Tuple[BoundaryPoint, BoundaryPoint],
) -> Optional[float]:
    """
    Distance between two geodesics given by their endpoints.

    Returns:
        The distance, 0.0 for asymptotic geodesics, or None if they cross
    """
    t = axis_normalizer(*axis1)
    p = boundary_image(t, axis2[0])
    q = boundary_image(t, axis2[1])
    if math.isinf(p) or math.isinf(q) or p == 0.0 or q == 0.0:
        return 0.0
    if (p > 0.0) != (q > 0.0):
        return None
    return math.acosh(abs(q + p) / abs(q - p))
