"""
Free Fuchsian groups of the second kind.

Presets with ping-pong certificates, reduced-word enumeration by word-length
shells, coset representatives for cyclic stabilizers, orbital counting, the
exponent-of-convergence estimate and the counting-bound partial sums.
"""

import logging
import math
from dataclasses import dataclass
from typing import Dict, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np

from hyperbolic_eisenstein.exceptions import DiscretenessError, DomainError
from hyperbolic_eisenstein.hypgeom import (
    INFINITY,
    act,
    axis_normalizer,
    boundary_image,
    canonical_signs,
    classify_trace,
    distance_array,
    fixed_points,
    geodesic_distance,
    translation_length,
)
from hyperbolic_eisenstein.types.models import (
    CountingReport,
    DiscretenessCertificate,
    FuchsianGroup,
    GeneratorInfo,
    GroupElement,
    Matrix2,
    PingPongDomain,
    PointH,
    PresetName,
    PresetSpec,
    TraceType,
)

logger = logging.getLogger(__name__)

DEFAULT_WORD_CAP = 16

DEFAULT_ORBIT_WORD_CAP = 4096

PING_PONG_MARGIN = 1e-9

FREENESS_TOLERANCE = 1e-6

DISPLACEMENT_STEP = 1.0


@dataclass(frozen=True)
class ElementShell:
    """All enumerated elements of one word length, as stacked arrays."""

    length: int
    matrices: np.ndarray
    words: np.ndarray
    last_letters: np.ndarray

    def __len__(self) -> int:
        return int(self.matrices.shape[0])

    def elements(self) -> List[GroupElement]:
        return [
            GroupElement(matrix=Matrix2.from_array(m), word=tuple(int(l) for l in w))
            for m, w in zip(self.matrices, self.words)
        ]


def _generator_info(matrix: Matrix2) -> GeneratorInfo:
    matrix = matrix.normalized()
    kind = classify_trace(matrix)
    if kind is TraceType.ELLIPTIC:
        raise DiscretenessError(f"generator {matrix} is elliptic")
    length = translation_length(matrix)
    return GeneratorInfo(
        matrix=matrix,
        trace_type=kind,
        translation_length=length if isinstance(length, float) else None,
    )


def _annulus_domains(letter: int, center: float, inner: float, outer: float) -> List[PingPongDomain]:
    return [
        PingPongDomain(letter=letter, boundary="circle", center=center, radius=outer, interior=False),
        PingPongDomain(letter=-letter, boundary="circle", center=center, radius=inner, interior=True),
    ]


def _isometric_domains(letter: int, matrix: Matrix2) -> List[PingPongDomain]:
    """Ping-pong regions of one generator from isometric circles or translation strips."""
    a, b, c, d = matrix.a, matrix.b, matrix.c, matrix.d
    if c != 0.0:
        return [
            PingPongDomain(letter=letter, boundary="circle", center=a / c, radius=1.0 / abs(c)),
            PingPongDomain(letter=-letter, boundary="circle", center=-d / c, radius=1.0 / abs(c)),
        ]
    if abs(a - d) <= 1e-12 * max(1.0, abs(a)):
        shift = b / d
        side = shift > 0.0
        return [
            PingPongDomain(letter=letter, boundary="line", center=shift / 2.0, interior=not side),
            PingPongDomain(letter=-letter, boundary="line", center=-shift / 2.0, interior=side),
        ]
    repelling, attracting = fixed_points(matrix)
    finite = repelling if math.isinf(attracting) else attracting
    scale = math.sqrt(abs(a / d))
    inner, outer = 1.0 / scale, scale
    if math.isinf(attracting):
        return _annulus_domains(letter, finite, inner, outer)
    return _annulus_domains(-letter, finite, inner, outer)


def validate_ping_pong(
    generators: Sequence[GeneratorInfo], domains: Sequence[PingPongDomain]
) -> DiscretenessCertificate:
    """
    Numerically validate a ping-pong certificate.

    Checks that the regions are pairwise disjoint on boundary samples and that
    each letter maps the boundary of the inverse letter's region onto the
    boundary of its own region, sending the outside into the region.
    """
    notes: List[str] = []
    by_letter: Dict[int, PingPongDomain] = {dom.letter: dom for dom in domains}
    ok = True
    min_sep = math.inf
    for dom in domains:
        samples = dom.boundary_samples()
        for other in domains:
            if other is dom:
                continue
            if np.any(other.contains(samples, margin=PING_PONG_MARGIN)):
                ok = False
                notes.append(f"region {dom.letter} meets region {other.letter}")
            other_samples = other.boundary_samples()
            sep = float(np.min(np.abs(samples[:, None] - other_samples[None, :])))
            min_sep = min(min_sep, sep)
    for index, info in enumerate(generators, start=1):
        for letter in (index, -index):
            target, source = by_letter.get(letter), by_letter.get(-letter)
            if target is None or source is None:
                ok = False
                notes.append(f"letter {letter} has no region")
                continue
            matrix = info.matrix if letter > 0 else info.matrix.inverse()
            mats = matrix.as_array()[None, :, :]
            images = act(mats, source.boundary_samples())[:, 0]
            if target.boundary == "circle":
                err = np.abs(np.abs(images - target.center) - target.radius)
                scale = max(1.0, target.radius)
            else:
                err = np.abs(images.real - target.center)
                scale = max(1.0, abs(target.center))
            finite = np.isfinite(images)
            if np.any(err[finite] > 1e-7 * scale):
                ok = False
                notes.append(f"letter {letter} does not map region boundaries onto each other")
            outside = _outside_point(source)
            image = act(mats, outside)[0]
            if not bool(target.contains(image)):
                ok = False
                notes.append(f"letter {letter} does not map the outside of {-letter} into {letter}")
    return DiscretenessCertificate(
        domains=list(domains),
        validated=ok,
        min_separation=None if math.isinf(min_sep) else min_sep,
        notes=notes,
    )


def _outside_point(dom: PingPongDomain) -> complex:
    """A point just outside a region, off its boundary geodesic."""
    if dom.boundary == "circle":
        r = dom.radius * (1.05 if dom.interior else 0.95)
        return dom.center + 1j * r
    shift = 0.05 * max(1.0, abs(dom.center))
    return complex(dom.center + (shift if dom.interior else -shift), 1.0)


def _make_group(
    preset: PresetSpec,
    matrices: Sequence[Matrix2],
    domains: Optional[List[PingPongDomain]] = None,
    assert_discrete: bool = False,
) -> FuchsianGroup:
    infos = tuple(_generator_info(m) for m in matrices)
    if domains is None:
        domains = []
        for index, info in enumerate(infos, start=1):
            domains.extend(_isometric_domains(index, info.matrix))
    certificate = validate_ping_pong(infos, domains)
    if not certificate.validated:
        if not assert_discrete:
            raise DiscretenessError(
                "ping-pong validation failed: " + "; ".join(certificate.notes)
            )
        logger.warning(
            "Ping-pong validation failed for %s; continuing on asserted discreteness",
            preset.name.value,
        )
        certificate = certificate.model_copy(update={"asserted": True})
    group = FuchsianGroup(
        generators=infos, rank=len(infos), preset=preset, discreteness_certificate=certificate
    )
    if certificate.asserted and not freeness_check(group, 4):
        logger.warning("Freeness spot-check found a relation among words of length <= 4")
    return group


def build_preset(name: PresetName, params: Sequence[float] = ()) -> FuchsianGroup:
    """
    Build a preset group with a validated ping-pong certificate.

    Args:
        name: One of cyclic_hyperbolic(l), cyclic_parabolic, schottky_torus(t, m),
            parabolic_pair(λ)
        params: The preset's real parameters

    Returns:
        The validated FuchsianGroup

    Raises:
        DomainError: If parameters are missing or out of range
        DiscretenessError: If ping-pong validation fails
    """
    name = PresetName(name)
    params = tuple(float(p) for p in params)
    spec = PresetSpec(name=name, params=params)

    def expect(count: int) -> None:
        if len(params) != count:
            raise DomainError(f"preset {name.value} takes {count} parameter(s), got {len(params)}")

    if name is PresetName.CYCLIC_HYPERBOLIC:
        expect(1)
        (l,) = params
        if not l > 0.0:
            raise DomainError("cyclic_hyperbolic needs l > 0")
        gen = Matrix2(a=math.exp(l / 2.0), b=0.0, c=0.0, d=math.exp(-l / 2.0))
        domains = _annulus_domains(1, 0.0, math.exp(-l / 2.0), math.exp(l / 2.0))
        return _make_group(spec, [gen], domains)
    if name is PresetName.CYCLIC_PARABOLIC:
        expect(0)
        return _make_group(spec, [Matrix2(a=1.0, b=1.0, c=0.0, d=1.0)])
    if name is PresetName.SCHOTTKY_TORUS:
        expect(2)
        t, m = params
        if not (t > 0.0 and m > 0.0):
            raise DomainError("schottky_torus needs t > 0 and m > 0")
        a_gen = Matrix2(a=math.exp(t / 2.0), b=0.0, c=0.0, d=math.exp(-t / 2.0))
        b_gen = Matrix2(
            a=math.cosh(m / 2.0), b=math.sinh(m / 2.0), c=math.sinh(m / 2.0), d=math.cosh(m / 2.0)
        )
        domains = _annulus_domains(1, 0.0, math.exp(-t / 2.0), math.exp(t / 2.0))
        domains.extend(_isometric_domains(2, b_gen))
        return _make_group(spec, [a_gen, b_gen], domains)
    if name is PresetName.PARABOLIC_PAIR:
        expect(1)
        (lam,) = params
        if not lam > 2.0:
            raise DomainError("parabolic_pair needs λ > 2")
        a_gen = Matrix2(a=1.0, b=lam, c=0.0, d=1.0)
        b_gen = Matrix2(a=1.0, b=0.0, c=lam, d=1.0)
        return _make_group(spec, [a_gen, b_gen])
    raise DomainError("explicit groups are built with explicit_group()")


def explicit_group(
    matrices: Sequence[Sequence[float]], assert_discrete: bool = False
) -> FuchsianGroup:
    """
    Build a group from user generator matrices given as [a, b, c, d] rows.

    Isometric-circle ping-pong is attempted; on failure the group is accepted
    only under `assert_discrete`, with the freeness spot-check logged.
    """
    gens: List[Matrix2] = []
    for row in matrices:
        if len(row) != 4:
            raise DomainError("explicit generators are [a, b, c, d] rows")
        raw = Matrix2(a=row[0], b=row[1], c=row[2], d=row[3])
        if raw.det <= 0.0:
            raise DomainError(f"generator {list(row)} does not preserve the upper half-plane")
        gens.append(raw)
    if not gens:
        raise DomainError("an explicit group needs at least one generator")
    spec = PresetSpec(name=PresetName.EXPLICIT, params=tuple(x for row in matrices for x in row))
    return _make_group(spec, gens, assert_discrete=assert_discrete)


def _letter_arrays(group: FuchsianGroup) -> Dict[int, np.ndarray]:
    return {letter: group.letter_matrix(letter) for letter in group.letters}


def iter_shells(
    group: FuchsianGroup,
    max_word_len: int,
    excluded_first: Optional[int] = None,
    track_words: bool = True,
) -> Iterator[ElementShell]:
    """
    Yield reduced-word shells of length 0, 1, ..., max_word_len.

    Words are extended on the right, so the first letter is fixed once chosen;
    `excluded_first` (a 1-based generator index) drops words starting with
    that generator or its inverse, which yields right-coset representatives
    of the cyclic subgroup it generates.
    """
    letters = _letter_arrays(group)
    shell = ElementShell(
        length=0,
        matrices=np.eye(2)[None, :, :].copy(),
        words=np.zeros((1, 0), dtype=np.int16),
        last_letters=np.zeros(1, dtype=np.int16),
    )
    yield shell
    for length in range(1, max_word_len + 1):
        shell = _extend(shell, letters, excluded_first if length == 1 else None, track_words)
        if len(shell) == 0:
            return
        yield shell


def _extend(
    shell: ElementShell,
    letters: Dict[int, np.ndarray],
    excluded_first: Optional[int],
    track_words: bool,
    keep: Optional[np.ndarray] = None,
) -> ElementShell:
    mats, words, last = shell.matrices, shell.words, shell.last_letters
    if keep is not None:
        mats, words, last = mats[keep], words[keep], last[keep]
    new_mats, new_words, new_last = [], [], []
    for letter, gen in letters.items():
        if excluded_first is not None and abs(letter) == excluded_first:
            continue
        mask = last != -letter
        if not np.any(mask):
            continue
        new_mats.append(mats[mask] @ gen)
        new_last.append(np.full(int(mask.sum()), letter, dtype=np.int16))
        if track_words:
            appended = np.full((int(mask.sum()), 1), letter, dtype=np.int16)
            new_words.append(np.hstack([words[mask], appended]))
    if not new_mats:
        empty = np.zeros((0, 2, 2))
        return ElementShell(shell.length + 1, empty, np.zeros((0, 0), np.int16), np.zeros(0, np.int16))
    stacked = canonical_signs(np.concatenate(new_mats))
    del new_mats
    words_out = (
        np.concatenate(new_words)
        if track_words
        else np.zeros((stacked.shape[0], 0), dtype=np.int16)
    )
    return ElementShell(shell.length + 1, stacked, words_out, np.concatenate(new_last))


def has_cusps(group: FuchsianGroup) -> bool:
    """True when some generator is parabolic."""
    return any(info.trace_type is TraceType.PARABOLIC for info in group.generators)


def _displacements(base: complex, mats: np.ndarray) -> np.ndarray:
    return distance_array(base, act(mats, base)) if mats.shape[0] else np.zeros(0)


def iter_displacement_shells(
    group: FuchsianGroup,
    base: complex,
    max_shells: int,
    excluded_first: Optional[int] = None,
    step: float = DISPLACEMENT_STEP,
) -> Iterator[ElementShell]:
    """
    Yield the orbit in shells of displacement d(base, γ·base).

    Shell 0 is the identity. Shell k holds the elements not yet yielded whose
    displacement is at most the current radius, which grows by `step`; radii
    that add nothing are skipped, so every later shell is non-empty. A word's
    children are generated once its displacement is within one generator
    displacement of the radius. `excluded_first` drops words starting with
    that generator or its inverse, as in `iter_shells`.
    """
    letters = _letter_arrays(group)
    margin = max(float(_displacements(base, m[None])[0]) for m in letters.values())
    empty_words = np.zeros((1, 0), dtype=np.int16)
    identity = ElementShell(0, np.eye(2)[None, :, :].copy(), empty_words, np.zeros(1, dtype=np.int16))
    yield identity
    first = _extend(identity, letters, excluded_first, False)
    open_mats, open_last = first.matrices, first.last_letters
    open_dist = _displacements(base, open_mats)
    wait_mats, wait_last, wait_dist = open_mats, open_last, open_dist
    radius = 0.0
    emitted = 0
    while emitted < max_shells and (wait_mats.shape[0] or open_mats.shape[0]):
        radius += step
        ready = open_dist <= radius + margin
        while np.any(ready):
            parents = ElementShell(0, open_mats[ready], np.zeros((int(ready.sum()), 0), np.int16), open_last[ready])
            kids = _extend(parents, letters, None, False)
            kid_dist = _displacements(base, kids.matrices)
            open_mats = np.concatenate([open_mats[~ready], kids.matrices])
            open_last = np.concatenate([open_last[~ready], kids.last_letters])
            open_dist = np.concatenate([open_dist[~ready], kid_dist])
            wait_mats = np.concatenate([wait_mats, kids.matrices])
            wait_last = np.concatenate([wait_last, kids.last_letters])
            wait_dist = np.concatenate([wait_dist, kid_dist])
            ready = open_dist <= radius + margin
        take = wait_dist <= radius
        if not np.any(take):
            continue
        emitted += 1
        count = int(take.sum())
        yield ElementShell(emitted, wait_mats[take], np.zeros((count, 0), np.int16), wait_last[take])
        wait_mats, wait_last, wait_dist = wait_mats[~take], wait_last[~take], wait_dist[~take]


def enumerate_elements(
    group: FuchsianGroup, max_word_len: int, cap: int = DEFAULT_WORD_CAP
) -> List[GroupElement]:
    """
    All reduced words of length ≤ max_word_len, each once, shortest first.

    Raises:
        DomainError: If max_word_len exceeds the cap
    """
    if max_word_len > cap:
        raise DomainError(f"max_word_len {max_word_len} exceeds the enumeration cap {cap}")
    out: List[GroupElement] = []
    for shell in iter_shells(group, max_word_len):
        out.extend(shell.elements())
    return out


def coset_representatives(
    group: FuchsianGroup, stabilizer_gen: int, max_word_len: int, cap: int = DEFAULT_WORD_CAP
) -> List[GroupElement]:
    """
    Right-coset representatives of ⟨stabilizer_gen⟩\\Γ up to a word length.

    In a free group every coset has a unique representative whose first letter
    is not stabilizer_gen^{±1}.

    Args:
        stabilizer_gen: 1-based generator index
    """
    if not 1 <= stabilizer_gen <= group.rank:
        raise DomainError(f"stabilizer generator {stabilizer_gen} is not a generator index")
    if max_word_len > cap:
        raise DomainError(f"max_word_len {max_word_len} exceeds the enumeration cap {cap}")
    out: List[GroupElement] = []
    for shell in iter_shells(group, max_word_len, excluded_first=stabilizer_gen):
        out.extend(shell.elements())
    return out


def canonical_coset_word(word: Sequence[int], stabilizer_gen: int) -> Tuple[int, ...]:
    """Strip the maximal leading power of the stabilizer generator."""
    start = 0
    while start < len(word) and abs(word[start]) == stabilizer_gen:
        start += 1
    return tuple(word[start:])


def word_element(group: FuchsianGroup, word: Sequence[int]) -> GroupElement:
    """
    The element w1·w2·…·wn of a reduced word in signed 1-based letters.

    Raises:
        DomainError: If a letter is not a generator index
    """
    product = np.eye(2)
    for letter in word:
        if letter == 0 or abs(letter) > group.rank:
            raise DomainError(f"letter {letter} is not a signed generator index")
        product = product @ group.letter_matrix(letter)
    return GroupElement(matrix=Matrix2.from_array(product).normalized(), word=tuple(word))


def freeness_check(group: FuchsianGroup, length: int) -> bool:
    """
    True when all reduced words of length ≤ `length` give distinct matrices.

    Two matrices count as equal when every entry differs by at most 1e-6.
    """
    mats = np.concatenate([s.matrices for s in iter_shells(group, length, track_words=False)])
    flat = mats.reshape(-1, 4)
    order = np.argsort(flat[:, 0], kind="stable")
    flat = flat[order]
    for offset in range(1, flat.shape[0]):
        close_first = (flat[offset:, 0] - flat[:-offset, 0]) <= FREENESS_TOLERANCE
        if not np.any(close_first):
            break
        diff = np.max(np.abs(flat[offset:] - flat[:-offset]), axis=1)
        if np.any(close_first & (diff <= FREENESS_TOLERANCE)):
            return False
    return True


def scaling_matrix(group: FuchsianGroup, cusp_gen: int) -> Matrix2:
    """
    Scaling matrix σ of a parabolic generator: σ∞ is its fixed point and
    σ^{-1} g σ is z ↦ z ± 1.
    """
    info = group.generators[cusp_gen - 1]
    if info.trace_type is not TraceType.PARABOLIC:
        raise DomainError(f"generator {cusp_gen} is not parabolic")
    g = info.matrix
    fixed, _ = fixed_points(g)
    to_inf = Matrix2.identity() if math.isinf(fixed) else Matrix2(a=0.0, b=-1.0, c=1.0, d=-fixed)
    conj = (to_inf @ g @ to_inf.inverse()).normalized()
    width = abs(conj.b / conj.d)
    scale = Matrix2(a=math.sqrt(width), b=0.0, c=0.0, d=1.0 / math.sqrt(width))
    return (to_inf.inverse() @ scale).normalized()


def cusp_width(group: FuchsianGroup, cusp_gen: int) -> float:
    """Translation width of a parabolic generator fixing ∞."""
    g = group.generators[cusp_gen - 1].matrix
    if g.c != 0.0 or group.generators[cusp_gen - 1].trace_type is not TraceType.PARABOLIC:
        raise DomainError(f"generator {cusp_gen} is not a translation")
    return abs(g.b / g.d)


def _pruned_orbit_distances(
    group: FuchsianGroup, z0: complex, r_max: float, max_word_len: int
) -> Tuple[np.ndarray, bool]:
    """
    Distances d(z0, γ z0) ≤ r_max over the orbit, enumerated shell by shell.

    Elements farther than r_max plus one generator displacement are not
    extended further.

    Returns:
        The distances found and whether enumeration finished before the cap
    """
    letters = _letter_arrays(group)
    margin = max(float(distance_array(z0, act(m[None], z0)[0])) for m in letters.values())
    shell = next(iter_shells(group, 0, track_words=False))
    found: List[np.ndarray] = [np.zeros(1)]
    keep: Optional[np.ndarray] = None
    for _ in range(max_word_len):
        shell = _extend(shell, letters, None, False, keep)
        if len(shell) == 0:
            return np.concatenate(found), True
        dist = distance_array(z0, act(shell.matrices, z0))
        found.append(dist[dist <= r_max])
        keep = dist <= r_max + margin
        if not np.any(keep):
            return np.concatenate(found), True
    logger.warning(
        "Orbit enumeration hit word length %d with points still within R = %.3g", max_word_len, r_max
    )
    return np.concatenate(found), False


def orbital_count(
    group: FuchsianGroup, z0: PointH, R: float, max_word_len: int = DEFAULT_ORBIT_WORD_CAP
) -> CountingReport:
    """
    N(R) = #{γ : d(z0, γ z0) ≤ R}.

    Returns:
        A CountingReport with one radius; truncation_sufficient is False when
        the word-length cap was reached with orbit points still inside R
    """
    if R < 0.0:
        raise DomainError("radius must be non-negative")
    dist, sufficient = _pruned_orbit_distances(group, z0.z, R, max_word_len)
    return CountingReport(
        radii=[R], counts=[int(np.sum(dist <= R))], truncation_sufficient=sufficient
    )


def _delta_fit(radii: np.ndarray, counts: np.ndarray) -> Tuple[float, float]:
    half = radii.shape[0] // 2
    r, n = radii[half:], counts[half:]
    if n[-1] <= n[0]:
        raise DomainError("orbit counts do not grow over the radius grid; δ fit is degenerate")
    coeffs, residuals, *_ = np.polyfit(r, np.log(n), 1, full=True)
    rms = math.sqrt(float(residuals[0]) / r.shape[0]) if residuals.size else 0.0
    return float(coeffs[0]), rms


def counting_report(
    group: FuchsianGroup,
    z0: PointH,
    R_grid: Sequence[float],
    q: float = 2.0,
    bound_word_len: int = 6,
    max_word_len: int = DEFAULT_ORBIT_WORD_CAP,
) -> CountingReport:
    """
    Orbital counts over a radius grid with the δ fit and counting-bound partials.

    Raises:
        DomainError: If the grid is not increasing with at least 4 radii, or
            the counts do not grow
    """
    radii = np.asarray(R_grid, dtype=float)
    if radii.shape[0] < 4 or np.any(np.diff(radii) <= 0.0):
        raise DomainError("R_grid must be increasing with at least 4 radii")
    dist, sufficient = _pruned_orbit_distances(group, z0.z, float(radii[-1]), max_word_len)
    counts = np.array([int(np.sum(dist <= r)) for r in radii])
    delta, rms = _delta_fit(radii, counts.astype(float))
    logger.info("δ estimate %.4f (fit rms %.2e) for %s", delta, rms, group.preset.name.value)
    return CountingReport(
        radii=[float(r) for r in radii],
        counts=[int(c) for c in counts],
        partial_bound_sums=counting_bound_partials(group, z0, q, bound_word_len),
        delta_estimate=delta,
        fit_residual=rms,
        truncation_sufficient=sufficient,
    )


def estimate_delta(
    group: FuchsianGroup,
    z0: PointH,
    R_grid: Sequence[float],
    max_word_len: int = DEFAULT_ORBIT_WORD_CAP,
) -> float:
    """
    Least-squares slope of log N(R) against R over the last half of R_grid.

    Raises:
        DomainError: If the grid is too short or the counts do not grow
    """
    return counting_report(group, z0, R_grid, bound_word_len=0, max_word_len=max_word_len).delta_estimate or 0.0


def counting_bound_partials(
    group: FuchsianGroup, z: PointH, q: float, max_word_len: int
) -> List[float]:
    """
    Partial sums by word length of Σ y(γz)^q / (1 + |γz|)^{2q}.

    Raises:
        DomainError: If q < 1
    """
    if q < 1.0:
        raise DomainError("the counting bound is stated for q >= 1")
    total = 0.0
    partials: List[float] = []
    for shell in iter_shells(group, max_word_len, track_words=False):
        w = act(shell.matrices, z.z)
        total += float(np.sum(w.imag**q / (1.0 + np.abs(w)) ** (2.0 * q)))
        partials.append(total)
    return partials


def lift_axes(
    group: FuchsianGroup, gen: Union[int, Matrix2], max_word_len: int
) -> List[Tuple[float, float]]:
    """
    Distinct lifts γ·axis(gen) of an axis, as oriented endpoint pairs.

    `gen` is a generator index or any hyperbolic element of the group.
    Translates run over all reduced words up to max_word_len and are
    deduplicated by endpoints, since γ and γ·gen^k give the same lift.
    """
    base = gen if isinstance(gen, Matrix2) else group.generators[gen - 1].matrix
    e1, e2 = fixed_points(base)
    seen: Dict[Tuple[float, ...], Tuple[float, float]] = {}
    for shell in iter_shells(group, max_word_len, track_words=False):
        for m in shell.matrices:
            g = Matrix2.from_array(m)
            p, q = boundary_image(g, e1), boundary_image(g, e2)
            key = tuple(sorted(round(v, 9) if math.isfinite(v) else INFINITY for v in (p, q)))
            seen.setdefault(key, (p, q))
    return list(seen.values())


def disjoint_lift_pairs(
    group: FuchsianGroup, gen: int, count: int = 5, max_word_len: int = 3
) -> List[Tuple[Tuple[float, float], Tuple[float, float], float]]:
    """
    Pairs (axis(gen), disjoint lift, distance) for the collar-separation check.

    Lifts of a simple closed geodesic other than the axis itself are disjoint
    from it; the pairs come in shortest-word order.
    """
    base = fixed_points(group.generators[gen - 1].matrix)
    out = []
    for axis in lift_axes(group, gen, max_word_len):
        same = all(
            (math.isinf(x) and math.isinf(y)) or abs(x - y) <= 1e-9 * max(1.0, abs(x))
            for x, y in zip(sorted(base), sorted(axis))
        )
        if same:
            continue
        dist = geodesic_distance(base, axis)
        if dist is None:
            continue
        out.append((base, axis, dist))
        if len(out) == count:
            break
    return out


def multiplicity_bound(c: float, rho: float) -> float:
    """Upper bound 2(cosh 3c - 1) ρ^{-2} on how many translates of a ρ-ball meet a c-ball."""
    if rho <= 0.0:
        raise DomainError("ρ must be positive")
    return 2.0 * (math.cosh(3.0 * c) - 1.0) / rho**2


def conjugator_to_axis(group: FuchsianGroup, gen: int) -> Matrix2:
    """Unit-determinant T with T·gen·T^{-1} = diag(e^{l/2}, e^{-l/2})."""
    info = group.generators[gen - 1]
    if info.trace_type is not TraceType.HYPERBOLIC:
        raise DomainError(f"generator {gen} is not hyperbolic")
    repelling, attracting = fixed_points(info.matrix)
    return axis_normalizer(repelling, attracting)
