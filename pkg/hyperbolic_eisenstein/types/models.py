"""
Data models for hyperbolic geometry, groups, series values and reports.
"""

import math
from enum import Enum
from typing import Any, Dict, List, Literal, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator
from pydantic.functional_serializers import PlainSerializer
from pydantic.functional_validators import BeforeValidator
from typing_extensions import Annotated

SCHEMA_VERSION = "1"

DET_TOLERANCE = 1e-9


def _coerce_complex(value: Any) -> complex:
    """Accept complex, real, {"re", "im"}, [re, im] or a Python complex literal."""
    if isinstance(value, complex):
        return value
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return complex(value)
    if isinstance(value, np.generic):
        return complex(value)
    if isinstance(value, dict) and set(value) <= {"re", "im"}:
        return complex(float(value.get("re", 0.0)), float(value.get("im", 0.0)))
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return complex(float(value[0]), float(value[1]))
    if isinstance(value, str):
        return complex(value.replace(" ", "").replace("i", "j"))
    raise ValueError(f"Cannot interpret {value!r} as a complex number")


def _complex_pair(value: complex) -> Dict[str, float]:
    return {"re": float(value.real), "im": float(value.imag)}


ComplexNumber = Annotated[
    Any,
    BeforeValidator(_coerce_complex),
    PlainSerializer(_complex_pair, return_type=dict),
]


class TraceType(str, Enum):
    """Conjugacy type of a unit-determinant real matrix."""

    HYPERBOLIC = "hyperbolic"
    PARABOLIC = "parabolic"
    ELLIPTIC = "elliptic"


class PresetName(str, Enum):
    """Group presets that carry a ping-pong certificate."""

    CYCLIC_HYPERBOLIC = "cyclic_hyperbolic"
    CYCLIC_PARABOLIC = "cyclic_parabolic"
    SCHOTTKY_TORUS = "schottky_torus"
    PARABOLIC_PAIR = "parabolic_pair"
    EXPLICIT = "explicit"


class SeriesFamily(str, Enum):
    """Series families that can be evaluated on grids."""

    HYPERBOLIC = "hyperbolic"
    WEIGHT_Q = "weight_q"
    PARABOLIC = "parabolic"
    PATTERSON = "patterson"
    THETA = "theta"
    ETA_HAT = "eta_hat"
    RESOLVENT = "resolvent"


class MaassDirection(str, Enum):
    """Raising (K_q) or lowering (L_q) Maass operator."""

    RAISE = "raise"
    LOWER = "lower"


class CycleKind(str, Enum):
    """How a cycle on the quotient is represented in the plane."""

    GEODESIC_LOOP = "geodesic_loop"
    DECK_PATH = "deck_path"


class CheckStatus(str, Enum):
    """Outcome of a verification check."""

    PASSED = "passed"
    FAILED = "failed"
    INCONCLUSIVE = "inconclusive"


class PointH(BaseModel):
    """A point z = x + iy of the upper half-plane."""

    model_config = ConfigDict(frozen=True)

    x: float
    y: float

    @field_validator("x")
    @classmethod
    def _finite_x(cls, value: float) -> float:
        if not math.isfinite(value):
            raise ValueError("x must be finite")
        return value

    @field_validator("y")
    @classmethod
    def _positive_y(cls, value: float) -> float:
        if not math.isfinite(value) or value <= 0.0:
            raise ValueError("y must be finite and strictly positive")
        return value

    @property
    def z(self) -> complex:
        return complex(self.x, self.y)

    @classmethod
    def from_complex(cls, z: complex) -> "PointH":
        return cls(x=float(z.real), y=float(z.imag))


class Matrix2(BaseModel):
    """
    A real 2x2 matrix (a b; c d) acting by Möbius transformations.

    The determinant is not enforced at construction so that operations can
    reject degenerate input explicitly; use `normalized` to rescale to
    determinant one with the canonical sign.
    """

    model_config = ConfigDict(frozen=True)

    a: float
    b: float
    c: float
    d: float

    @property
    def det(self) -> float:
        return self.a * self.d - self.b * self.c

    @property
    def trace(self) -> float:
        return self.a + self.d

    def is_unimodular(self, tol: float = DET_TOLERANCE) -> bool:
        return abs(self.det - 1.0) <= tol

    def as_array(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]], dtype=float)

    def inverse(self) -> "Matrix2":
        det = self.det
        return Matrix2(a=self.d / det, b=-self.b / det, c=-self.c / det, d=self.a / det)

    def __matmul__(self, other: "Matrix2") -> "Matrix2":
        return Matrix2.from_array(self.as_array() @ other.as_array())

    def normalized(self) -> "Matrix2":
        """Rescale to determinant one and make the first nonzero of (a, c) positive."""
        det = self.det
        if det <= 0.0:
            raise ValueError("Matrix must have positive determinant to act on H")
        scale = 1.0 / math.sqrt(det)
        a, b, c, d = (self.a * scale, self.b * scale, self.c * scale, self.d * scale)
        if c < 0.0 or (c == 0.0 and a < 0.0):
            a, b, c, d = -a, -b, -c, -d
        return Matrix2(a=a, b=b, c=c, d=d)

    @classmethod
    def from_array(cls, array: Any) -> "Matrix2":
        m = np.asarray(array, dtype=float)
        return cls(a=float(m[0, 0]), b=float(m[0, 1]), c=float(m[1, 0]), d=float(m[1, 1]))

    @classmethod
    def identity(cls) -> "Matrix2":
        return cls(a=1.0, b=0.0, c=0.0, d=1.0)


class FermiCoords(BaseModel):
    """Signed arclength along the imaginary axis and signed distance from it."""

    model_config = ConfigDict(frozen=True)

    x1: float
    x2: float


class ComplexParam(BaseModel):
    """Spectral parameter s = re + i·im."""

    model_config = ConfigDict(frozen=True)

    re: float
    im: float = 0.0

    @field_validator("re", "im")
    @classmethod
    def _finite(cls, value: float) -> float:
        if not math.isfinite(value):
            raise ValueError("complex parameter components must be finite")
        return value

    @property
    def value(self) -> complex:
        return complex(self.re, self.im)

    @classmethod
    def of(cls, s: "SLike") -> "ComplexParam":
        if isinstance(s, ComplexParam):
            return s
        s = complex(s)
        return cls(re=s.real, im=s.imag)


SLike = Union[complex, float, int, ComplexParam]


def as_complex(s: SLike) -> complex:
    """Coerce a spectral parameter given in any accepted form to complex."""
    if isinstance(s, ComplexParam):
        return s.value
    return complex(s)


class GroupElement(BaseModel):
    """A group element: its matrix together with a reduced word in the generators."""

    model_config = ConfigDict(frozen=True)

    matrix: Matrix2
    word: Tuple[int, ...] = Field(
        default=(),
        description="Signed 1-based generator indices; -k denotes the inverse of generator k",
        examples=[(1, -2, -2)],
    )

    @field_validator("word")
    @classmethod
    def _reduced(cls, word: Tuple[int, ...]) -> Tuple[int, ...]:
        if any(letter == 0 for letter in word):
            raise ValueError("letters are signed 1-based generator indices")
        for left, right in zip(word, word[1:]):
            if left == -right:
                raise ValueError(f"word {word} is not reduced")
        return word


class GeneratorInfo(BaseModel):
    """A generator matrix with its trace classification."""

    model_config = ConfigDict(frozen=True)

    matrix: Matrix2
    trace_type: TraceType
    translation_length: Optional[float] = None


class PingPongDomain(BaseModel):
    """
    One ping-pong region, bounded by a geodesic.

    A circle boundary describes |z - center| < radius (interior=True) or
    > radius; a line boundary describes Re z < center (interior=True) or > center.
    """

    model_config = ConfigDict(frozen=True)

    letter: int
    boundary: Literal["circle", "line"]
    center: float
    radius: float = 0.0
    interior: bool = True

    def contains(self, z: Any, margin: float = 0.0) -> np.ndarray:
        """Strict membership with the boundary pushed inward by `margin`."""
        z = np.asarray(z, dtype=complex)
        if self.boundary == "circle":
            dist = np.abs(z - self.center)
            if self.interior:
                return dist < self.radius - margin
            return dist > self.radius + margin
        if self.interior:
            return z.real < self.center - margin
        return z.real > self.center + margin

    def boundary_samples(self, count: int = 64, height: float = 20.0) -> np.ndarray:
        """Points of H on the boundary geodesic."""
        if self.boundary == "circle":
            angles = np.linspace(0.0, math.pi, count + 2)[1:-1]
            return self.center + self.radius * np.exp(1j * angles)
        heights = np.geomspace(1.0 / height, height, count)
        return self.center + 1j * heights


class DiscretenessCertificate(BaseModel):
    """Ping-pong regions and the outcome of their numerical validation."""

    domains: List[PingPongDomain] = Field(default_factory=list)
    validated: bool = False
    asserted: bool = Field(
        default=False,
        description="True when discreteness was asserted by the user instead of validated",
    )
    min_separation: Optional[float] = None
    notes: List[str] = Field(default_factory=list)


class PresetSpec(BaseModel):
    """Preset name and its real parameters."""

    model_config = ConfigDict(frozen=True)

    name: PresetName
    params: Tuple[float, ...] = ()


class FuchsianGroup(BaseModel):
    """A finitely generated free Fuchsian group given by its generators."""

    model_config = ConfigDict(frozen=True)

    generators: Tuple[GeneratorInfo, ...]
    rank: int
    preset: PresetSpec
    discreteness_certificate: DiscretenessCertificate

    def model_post_init(self, __context: Any) -> None:
        """Validate that the rank matches the generator list."""
        if self.rank != len(self.generators) or self.rank < 1:
            raise ValueError("rank must equal the (positive) number of generators")

    def letter_matrix(self, letter: int) -> np.ndarray:
        """Matrix of a signed generator letter as a numpy array."""
        gen = self.generators[abs(letter) - 1].matrix
        return gen.as_array() if letter > 0 else gen.inverse().as_array()

    @property
    def letters(self) -> List[int]:
        out: List[int] = []
        for k in range(1, self.rank + 1):
            out.extend([k, -k])
        return out


class CountingReport(BaseModel):
    """Orbital counts N(R), counting-bound partial sums and the δ estimate."""

    radii: List[float] = Field(default_factory=list)
    counts: List[int] = Field(default_factory=list)
    partial_bound_sums: List[float] = Field(default_factory=list)
    delta_estimate: Optional[float] = None
    fit_residual: Optional[float] = None
    truncation_sufficient: bool = True


class TruncationPolicy(BaseModel):
    """Shell truncation for orbit sums, by word length or by displacement on groups with cusps."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    abs_tol: float = Field(default=1e-10, gt=0.0)
    rel_tol: float = Field(default=1e-8, ge=0.0)
    max_word_len: int = Field(
        default=16,
        ge=0,
        le=64,
        description="Shell cap: word length, or unit displacement steps on groups with cusps",
    )
    min_word_len: int = Field(
        default=2,
        ge=0,
        description="Shells always summed before the stopping rule is consulted",
    )
    strict: bool = Field(
        default=False,
        description="Raise ConvergenceError at the cap instead of flagging the result",
    )
    max_terms: int = Field(
        default=2_000_000,
        ge=1,
        description="Element budget across shells; reaching it stops summation like the word-length cap",
    )


class FormValue(BaseModel):
    """Value of a weight-q differential f dz^q at a point, with its automorphic lift y^q f."""

    q: int
    dz_coeff: ComplexNumber
    auto_lift: ComplexNumber
    point: PointH

    @classmethod
    def from_lift(cls, q: int, lift: complex, point: PointH) -> "FormValue":
        return cls(q=q, dz_coeff=complex(lift) / point.y**q, auto_lift=complex(lift), point=point)


class SeriesEvaluation(BaseModel):
    """A truncated series value with its truncation diagnostics."""

    family: SeriesFamily
    value: FormValue
    word_len: int
    terms: int
    tail_estimate: float = Field(ge=0.0)
    converged: bool = True
    shell_sums: List[float] = Field(default_factory=list)
    normalized: Optional[FormValue] = Field(
        default=None,
        description="Normalized companion value, e.g. Ξ = A / b_q(s) for the weight-q series",
    )


class KernelValue(BaseModel):
    """Resolvent kernel value with its point-pair invariant and separation."""

    value: ComplexNumber
    sigma: float = Field(ge=1.0 - 1e-12)
    separation: float = Field(ge=0.0)


class KernelCandidate(BaseModel):
    """One (third 2F1 parameter, eigen sign) combination with its residual."""

    third_parameter: Literal["s", "2s"]
    sign: Literal["+", "-"]
    s: float
    residual: float


class KernelConventionReport(BaseModel):
    """Finite-difference selection of the weight-2 resolvent convention."""

    schema_version: str = SCHEMA_VERSION
    candidates: List[KernelCandidate] = Field(default_factory=list)
    selected_third_parameter: Optional[Literal["s", "2s"]] = None
    selected_sign: Optional[Literal["+", "-"]] = None
    unique: bool = False


class LimitIdentityReport(BaseModel):
    """Boundary-limit identity: left side along a grid against a series reference."""

    schema_version: str = SCHEMA_VERSION
    identity: Literal["cusp", "funnel"]
    grid: List[float] = Field(default_factory=list)
    lhs: List[ComplexNumber] = Field(default_factory=list)
    rhs_reference: ComplexNumber = 0j
    deviations: List[float] = Field(default_factory=list)
    extrapolated_limit: ComplexNumber = 0j
    deviation: float = 0.0
    noise_floor: float = 0.0
    monotone: bool = True
    converged: bool = True
    printed_factor: Optional[ComplexNumber] = None
    derived_factor: Optional[ComplexNumber] = None
    notes: List[str] = Field(default_factory=list)


class GridSpec(BaseModel):
    """Uniform rectangular grid in the upper half-plane."""

    model_config = ConfigDict(extra="forbid")

    x_min: float
    x_max: float
    y_min: float
    y_max: float
    nx: int = Field(ge=1)
    ny: int = Field(ge=1)

    def model_post_init(self, __context: Any) -> None:
        """Reject grids touching the boundary or with reversed ranges."""
        if self.y_min <= 0.0:
            raise ValueError("grid must lie strictly inside the upper half-plane (y_min > 0)")
        if self.x_max < self.x_min or self.y_max < self.y_min:
            raise ValueError("grid ranges must be increasing")

    def points(self) -> np.ndarray:
        """Grid nodes, row-major with y outer and x inner."""
        xs = np.linspace(self.x_min, self.x_max, self.nx)
        ys = np.linspace(self.y_min, self.y_max, self.ny)
        xx, yy = np.meshgrid(xs, ys)
        return (xx + 1j * yy).ravel()


class GridField(BaseModel):
    """Automorphic-lift samples of a weight-q form on a uniform grid."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    x_min: float
    y_min: float
    h: float = Field(gt=0.0)
    values: np.ndarray
    weight: int = 0

    def model_post_init(self, __context: Any) -> None:
        """Validate the grid placement and array shape."""
        if self.y_min <= 0.0:
            raise ValueError("y range must be strictly positive")
        if self.values.ndim != 2:
            raise ValueError("values must be a 2-D array indexed [y, x]")

    @property
    def shape(self) -> Tuple[int, int]:
        return (int(self.values.shape[0]), int(self.values.shape[1]))

    @property
    def xs(self) -> np.ndarray:
        return self.x_min + self.h * np.arange(self.values.shape[1])

    @property
    def ys(self) -> np.ndarray:
        return self.y_min + self.h * np.arange(self.values.shape[0])

    @property
    def rectangle(self) -> Tuple[Tuple[float, float], Tuple[float, float]]:
        xs, ys = self.xs, self.ys
        return ((float(xs[0]), float(xs[-1])), (float(ys[0]), float(ys[-1])))

    def nodes(self) -> np.ndarray:
        xx, yy = np.meshgrid(self.xs, self.ys)
        return xx + 1j * yy

    def interior(self) -> np.ndarray:
        """Values on nodes with a full five-point stencil."""
        return self.values[1:-1, 1:-1]


class Cycle(BaseModel):
    """A closed path on the quotient, given by a lift path and its closing deck transformation."""

    kind: CycleKind
    base_point: PointH
    closer: GroupElement
    samples: List[PointH]

    def model_post_init(self, __context: Any) -> None:
        """Check that the closer maps the first sample onto the last."""
        if len(self.samples) < 2:
            raise ValueError("a cycle needs at least two samples")
        m = self.closer.matrix
        z0 = self.samples[0].z
        image = (m.a * z0 + m.b) / (m.c * z0 + m.d)
        if abs(image - self.samples[-1].z) > 1e-8 * max(1.0, abs(image)):
            raise ValueError("closer does not map the first sample onto the last")

    def reversed(self) -> "Cycle":
        inverse_word = tuple(-letter for letter in reversed(self.closer.word))
        closer = GroupElement(matrix=self.closer.matrix.inverse().normalized(), word=inverse_word)
        return Cycle(
            kind=self.kind,
            base_point=self.samples[-1],
            closer=closer,
            samples=list(reversed(self.samples)),
        )


class ResidualReport(BaseModel):
    """Functional-equation residual over a grid."""

    schema_version: str = SCHEMA_VERSION
    family: SeriesFamily
    s: ComplexNumber
    q: int
    grid: Dict[str, float] = Field(default_factory=dict)
    h: float
    residual: float
    truncation: int
    converged: bool = True


class CuspExpansionReport(BaseModel):
    """Leading cusp terms of θ^s at ∞ and at 0, scaled by the height."""

    schema_version: str = SCHEMA_VERSION
    s: ComplexNumber
    width: float
    heights: List[float] = Field(default_factory=list)
    leading: ComplexNumber = 0j
    infinity_deviations: List[float] = Field(default_factory=list)
    zero_deviations: List[float] = Field(default_factory=list)
    converged: bool = True


class L2Report(BaseModel):
    """Truncated L² masses of a form over a fundamental domain."""

    schema_version: str = SCHEMA_VERSION
    cuts: List[float] = Field(default_factory=list)
    masses: List[float] = Field(default_factory=list)
    increments: List[float] = Field(default_factory=list)
    unnormalized_masses: List[float] = Field(default_factory=list)
    bound: Optional[float] = None
    multiplicity_observed: int = 0
    multiplicity_bound: Optional[float] = None


class DegenerationTable(BaseModel):
    """Per-length sup errors of the rescaled series against the cusp limit."""

    schema_version: str = SCHEMA_VERSION
    q: int
    s: ComplexNumber
    l_grid: List[float] = Field(default_factory=list)
    sup_errors: List[float] = Field(default_factory=list)
    closed_form_errors: List[float] = Field(default_factory=list)
    one_form_errors: List[float] = Field(default_factory=list)
    monotone: bool = False
    assertive: bool = Field(
        default=True,
        description="False for user-supplied families, where only trends are reported",
    )


class CheckResult(BaseModel):
    """Outcome of one verification check."""

    name: str
    status: CheckStatus
    value: float
    tolerance: float
    detail: str = ""


class VerifyReport(BaseModel):
    """Aggregated verification outcome."""

    schema_version: str = SCHEMA_VERSION
    checks: List[CheckResult] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(check.status != CheckStatus.FAILED for check in self.checks)


class GroupReport(BaseModel):
    """Validation report for a group job."""

    schema_version: str = SCHEMA_VERSION
    preset: PresetSpec
    rank: int
    generators: List[GeneratorInfo] = Field(default_factory=list)
    certificate: DiscretenessCertificate
    counting: CountingReport


class GridRecord(BaseModel):
    """One evaluated grid node; field order is the CSV column order."""

    x: float
    y: float
    re_f: float
    im_f: float
    re_g: float
    im_g: float
    word_len: int
    tail: float


class GridEvaluation(BaseModel):
    """Grid evaluation of one series family at one s, as written by the eval command."""

    schema_version: str = SCHEMA_VERSION
    family: SeriesFamily
    s: ComplexNumber
    weight: int
    converged: bool = True
    records: List[GridRecord] = Field(default_factory=list)


class DegenerationSweep(BaseModel):
    """Degeneration tables for every weight of a sweep."""

    schema_version: str = SCHEMA_VERSION
    tables: List[DegenerationTable] = Field(default_factory=list)


class GroupConfig(BaseModel):
    """Group section of a job: a preset or explicit generator matrices."""

    model_config = ConfigDict(extra="forbid")

    preset: PresetName
    params: List[float] = Field(default_factory=list)
    generators: Optional[List[List[float]]] = Field(
        default=None,
        description="Explicit generators as [a, b, c, d] rows (preset 'explicit' only)",
    )
    assert_discrete: bool = False


class SeriesConfig(BaseModel):
    """Series section of a job."""

    model_config = ConfigDict(extra="forbid")

    family: SeriesFamily = SeriesFamily.HYPERBOLIC
    q: int = Field(default=1, ge=0)
    c_gen: int = Field(default=1, ge=1, description="1-based generator index of the closed geodesic")
    cusp_gen: int = Field(default=1, ge=1, description="1-based parabolic generator index")
    boundary_point: Optional[float] = None
    k: int = 0
    w: Optional[List[float]] = Field(default=None, description="Second kernel point [x, y]")


class OutputConfig(BaseModel):
    """Output file names, relative to the output directory."""

    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    csv: Optional[str] = "grid.csv"
    json_path: Optional[str] = Field(default="report.json", alias="json")


class VerifyConfig(BaseModel):
    """Verification suite selection and tolerance overrides."""

    model_config = ConfigDict(extra="forbid")

    checks: List[str] = Field(default_factory=list)
    tolerances: Dict[str, float] = Field(default_factory=dict)


class DegenerateConfig(BaseModel):
    """Degeneration sweep parameters."""

    model_config = ConfigDict(extra="forbid")

    q_values: List[int] = Field(default_factory=lambda: [1])
    s: ComplexNumber = 2.0
    l_grid: List[float] = Field(default_factory=lambda: [0.4, 0.2, 0.1, 0.05])

    @field_validator("l_grid")
    @classmethod
    def _decreasing(cls, grid: List[float]) -> List[float]:
        if not grid or any(l <= 0.0 for l in grid):
            raise ValueError("l_grid must be non-empty with positive lengths")
        if any(b >= a for a, b in zip(grid, grid[1:])):
            raise ValueError("l_grid must be strictly decreasing")
        return grid


class JobConfig(BaseModel):
    """A complete CLI job."""

    model_config = ConfigDict(extra="forbid")

    schema_version: str = SCHEMA_VERSION
    group: GroupConfig
    series: SeriesConfig = Field(default_factory=SeriesConfig)
    s_values: List[ComplexNumber] = Field(default_factory=lambda: [1.0])
    grid: Optional[GridSpec] = None
    truncation: TruncationPolicy = Field(default_factory=TruncationPolicy)
    outputs: OutputConfig = Field(default_factory=OutputConfig)
    verify: VerifyConfig = Field(default_factory=VerifyConfig)
    degenerate: DegenerateConfig = Field(default_factory=DegenerateConfig)
