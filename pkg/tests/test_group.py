"""
Unit tests for group presets, word enumeration and orbital counting.
"""

import math
import unittest

import numpy as np

from hyperbolic_eisenstein.exceptions import DiscretenessError, DomainError
from hyperbolic_eisenstein.group import (
    build_preset,
    canonical_coset_word,
    conjugator_to_axis,
    coset_representatives,
    counting_bound_partials,
    counting_report,
    cusp_width,
    disjoint_lift_pairs,
    enumerate_elements,
    estimate_delta,
    explicit_group,
    freeness_check,
    has_cusps,
    iter_displacement_shells,
    iter_shells,
    lift_axes,
    multiplicity_bound,
    orbital_count,
    scaling_matrix,
    word_element,
)
from hyperbolic_eisenstein.types.models import PointH, PresetName, TraceType


class TestPresets(unittest.TestCase):
    """Preset construction and discreteness certificates."""

    def test_cyclic_hyperbolic(self):
        """Test the cyclic hyperbolic preset."""
        group = build_preset(PresetName.CYCLIC_HYPERBOLIC, [1.0])
        self.assertEqual(group.rank, 1)
        self.assertTrue(group.discreteness_certificate.validated)
        info = group.generators[0]
        self.assertIs(info.trace_type, TraceType.HYPERBOLIC)
        self.assertAlmostEqual(info.translation_length, 1.0, places=12)

    def test_schottky_torus(self):
        """Test the Schottky torus preset and its generators."""
        group = build_preset(PresetName.SCHOTTKY_TORUS, [4.0, 4.0])
        self.assertEqual(group.rank, 2)
        self.assertTrue(group.discreteness_certificate.validated)
        self.assertFalse(group.discreteness_certificate.asserted)
        b = group.generators[1].matrix
        self.assertAlmostEqual(b.a, math.cosh(2.0))
        self.assertAlmostEqual(b.b, math.sinh(2.0))
        for info in group.generators:
            self.assertAlmostEqual(info.translation_length, 4.0, places=10)

    def test_parabolic_presets(self):
        """Test the cusped presets."""
        pair = build_preset(PresetName.PARABOLIC_PAIR, [3.0])
        self.assertTrue(pair.discreteness_certificate.validated)
        self.assertTrue(all(g.trace_type is TraceType.PARABOLIC for g in pair.generators))
        cyclic = build_preset("cyclic_parabolic")
        self.assertTrue(cyclic.discreteness_certificate.validated)

    def test_preset_parameters(self):
        """Test the parameter checks."""
        with self.assertRaises(DomainError):
            build_preset(PresetName.CYCLIC_HYPERBOLIC, [])
        with self.assertRaises(DomainError):
            build_preset(PresetName.CYCLIC_HYPERBOLIC, [-1.0])
        with self.assertRaises(DomainError):
            build_preset(PresetName.PARABOLIC_PAIR, [2.0])
        with self.assertRaises(DomainError):
            build_preset(PresetName.EXPLICIT, [])

    def test_explicit_group(self):
        """Test explicit generators, rejected inputs and asserted discreteness."""
        group = explicit_group([[1.0, 1.0, 0.0, 1.0]])
        self.assertTrue(group.discreteness_certificate.validated)
        self.assertIs(group.preset.name, PresetName.EXPLICIT)
        with self.assertRaises(DiscretenessError):
            explicit_group([[0.0, -1.0, 1.0, 0.0]])
        with self.assertRaises(DomainError):
            explicit_group([[1.0, 0.0, 0.0, -1.0]])
        with self.assertRaises(DomainError):
            explicit_group([[1.0, 1.0, 0.0]])

    def test_overlapping_circles_need_assertion(self):
        """Test that overlapping isometric circles fail unless discreteness is asserted."""
        gens = [[1.0, 1.0, 0.0, 1.0], [1.0, 0.0, 1.0, 1.0]]
        with self.assertRaises(DiscretenessError):
            explicit_group(gens)
        with self.assertLogs("hyperbolic_eisenstein.group", level="WARNING"):
            group = explicit_group(gens, assert_discrete=True)
        self.assertTrue(group.discreteness_certificate.asserted)
        self.assertFalse(group.discreteness_certificate.validated)


class TestWords(unittest.TestCase):
    """Reduced-word shells, cosets and word products."""

    def setUp(self):
        """Set up a Schottky torus and a cyclic group."""
        self.torus = build_preset(PresetName.SCHOTTKY_TORUS, [4.0, 4.0])
        self.cyclic = build_preset(PresetName.CYCLIC_HYPERBOLIC, [1.0])

    def test_shell_sizes(self):
        """Test the reduced-word counts 1, 4, 12, 36 in rank two."""
        sizes = [len(shell) for shell in iter_shells(self.torus, 3)]
        self.assertEqual(sizes, [1, 4, 12, 36])
        sizes = [len(shell) for shell in iter_shells(self.torus, 2, excluded_first=1)]
        self.assertEqual(sizes, [1, 2, 6])

    def test_enumerate_elements(self):
        """Test identity-first, shortest-first enumeration and the cap."""
        elements = enumerate_elements(self.cyclic, 3)
        self.assertEqual(len(elements), 7)
        self.assertEqual(elements[0].word, ())
        lengths = [len(e.word) for e in elements]
        self.assertEqual(lengths, sorted(lengths))
        with self.assertRaises(DomainError):
            enumerate_elements(self.cyclic, 17)

    def test_coset_representatives(self):
        """Test that no representative starts with the stabilizer."""
        reps = coset_representatives(self.torus, 1, 3)
        self.assertTrue(all(not rep.word or abs(rep.word[0]) != 1 for rep in reps))
        self.assertEqual(len(reps), 1 + 2 + 6 + 18)
        self.assertEqual(canonical_coset_word((1, 1, 2, -1), 1), (2, -1))
        with self.assertRaises(DomainError):
            coset_representatives(self.torus, 3, 2)

    def test_word_element(self):
        """Test that word products multiply on the right."""
        element = word_element(self.torus, (1, 2))
        expected = (self.torus.generators[0].matrix @ self.torus.generators[1].matrix).normalized()
        np.testing.assert_allclose(element.matrix.as_array(), expected.as_array(), atol=1e-12)
        inverse = word_element(self.torus, (-2, -1))
        product = element.matrix @ inverse.matrix
        np.testing.assert_allclose(np.abs(product.as_array()), np.eye(2), atol=1e-10)
        with self.assertRaises(DomainError):
            word_element(self.torus, (3,))

    def test_long_words_stay_finite(self):
        """Test that torus shells up to length 14 hold finite matrices with the canonical sign."""
        for shell in iter_shells(self.torus, 14, track_words=False):
            self.assertEqual(len(shell), 1 if shell.length == 0 else 4 * 3 ** (shell.length - 1))
            self.assertTrue(np.all(np.isfinite(shell.matrices)), shell.length)
            self.assertTrue(np.all(shell.matrices[:, 1, 0] >= 0.0), shell.length)

    def test_freeness(self):
        """Test the freeness spot-check on a Schottky group."""
        self.assertTrue(freeness_check(self.torus, 4))


class TestCusps(unittest.TestCase):
    """Scaling matrices and cusp widths."""

    def setUp(self):
        """Set up a parabolic pair of width 3."""
        self.group = build_preset(PresetName.PARABOLIC_PAIR, [3.0])

    def test_cusp_width(self):
        """Test the width of the translation and the rejection of the other generator."""
        self.assertAlmostEqual(cusp_width(self.group, 1), 3.0)
        with self.assertRaises(DomainError):
            cusp_width(self.group, 2)

    def test_scaling_matrix(self):
        """Test that σ^{-1} g σ is a unit translation for both cusps."""
        for gen in (1, 2):
            sigma = scaling_matrix(self.group, gen)
            g = self.group.generators[gen - 1].matrix
            conj = (sigma.inverse() @ g @ sigma).normalized()
            self.assertAlmostEqual(conj.c, 0.0, places=10)
            self.assertAlmostEqual(abs(conj.b / conj.d), 1.0, places=10)
        sigma = scaling_matrix(self.group, 2)
        self.assertAlmostEqual(sigma.a / sigma.c, 0.0, places=12)

    def test_has_cusps(self):
        """Test cusp detection on the presets."""
        self.assertTrue(has_cusps(self.group))
        self.assertFalse(has_cusps(build_preset(PresetName.SCHOTTKY_TORUS, [4.0, 4.0])))

    def test_displacement_shells_of_a_translation(self):
        """Test the shells {A^±1}, {A^±2}, {A^±3, A^±4} around i, since d(i, i + n) = 2 asinh(n/2)."""
        group = build_preset(PresetName.CYCLIC_PARABOLIC)
        shells = list(iter_displacement_shells(group, 1j, 3))
        self.assertEqual([len(shell) for shell in shells], [1, 2, 2, 4])
        np.testing.assert_allclose(shells[0].matrices[0], np.eye(2))
        translations = sorted(abs(m[0, 1]) for m in shells[3].matrices)
        np.testing.assert_allclose(translations, [3.0, 3.0, 4.0, 4.0])

    def test_displacement_shells_exhaust_cosets(self):
        """Test that excluding the only generator leaves the identity alone."""
        group = build_preset(PresetName.CYCLIC_PARABOLIC)
        shells = list(iter_displacement_shells(group, 0.3 + 0.7j, 10, excluded_first=1))
        self.assertEqual([len(shell) for shell in shells], [1])

    def test_displacement_shells_are_disjoint(self):
        """Test that no element of the parabolic pair is yielded twice."""
        shells = list(iter_displacement_shells(self.group, 0.2 + 1.1j, 6))
        self.assertEqual(len(shells), 7)
        mats = np.concatenate([shell.matrices for shell in shells])
        self.assertTrue(np.all(np.isfinite(mats)))
        keys = {tuple(np.round(m.ravel(), 6)) for m in mats}
        self.assertEqual(len(keys), mats.shape[0])


class TestCounting(unittest.TestCase):
    """Orbital counts, δ estimates and related bounds."""

    def test_cyclic_orbit_count(self):
        """Test N(2.5) = 5 for the cyclic group of length 1 at i."""
        group = build_preset(PresetName.CYCLIC_HYPERBOLIC, [1.0])
        report = orbital_count(group, PointH(x=0.0, y=1.0), 2.5)
        self.assertEqual(report.counts, [5])
        self.assertTrue(report.truncation_sufficient)
        with self.assertRaises(DomainError):
            orbital_count(group, PointH(x=0.0, y=1.0), -1.0)

    def test_counting_report(self):
        """Test monotone counts and a δ estimate in (0, 1) for the Schottky torus."""
        group = build_preset(PresetName.SCHOTTKY_TORUS, [4.0, 4.0])
        report = counting_report(group, PointH(x=0.0, y=1.0), [4.0, 6.0, 8.0, 10.0, 12.0, 14.0])
        self.assertEqual(report.counts, sorted(report.counts))
        self.assertGreater(report.delta_estimate, 0.0)
        self.assertLess(report.delta_estimate, 1.0)
        self.assertEqual(report.partial_bound_sums, sorted(report.partial_bound_sums))
        with self.assertRaises(DomainError):
            counting_report(group, PointH(x=0.0, y=1.0), [4.0, 6.0, 8.0])

    def test_estimate_delta(self):
        """Test that estimate_delta is the slope of the counting report."""
        group = build_preset(PresetName.SCHOTTKY_TORUS, [4.0, 4.0])
        radii = [4.0, 6.0, 8.0, 10.0, 12.0, 14.0]
        delta = estimate_delta(group, PointH(x=0.0, y=1.0), radii)
        report = counting_report(group, PointH(x=0.0, y=1.0), radii)
        self.assertAlmostEqual(delta, report.delta_estimate)

    def test_counting_bound_partials(self):
        """Test that the identity term is y^q/(1 + |z|)^{2q} and q < 1 is rejected."""
        group = build_preset(PresetName.CYCLIC_PARABOLIC)
        partials = counting_bound_partials(group, PointH(x=0.0, y=1.0), 2.0, 3)
        self.assertAlmostEqual(partials[0], 1.0 / 16.0)
        self.assertEqual(len(partials), 4)
        with self.assertRaises(DomainError):
            counting_bound_partials(group, PointH(x=0.0, y=1.0), 0.5, 3)

    def test_counting_bound_cauchy(self):
        """Test finite, shrinking increments below 1e-8 by word length 14 on the torus."""
        torus = build_preset(PresetName.SCHOTTKY_TORUS, [4.0, 4.0])
        partials = counting_bound_partials(torus, PointH(x=0.0, y=1.0), 1.0, 14)
        self.assertEqual(len(partials), 15)
        self.assertTrue(all(math.isfinite(p) for p in partials))
        increments = np.diff(partials)
        self.assertTrue(np.all(increments >= 0.0))
        self.assertLess(increments[-1], 1e-8)

    def test_delta_ranges(self):
        """Test δ for the cyclic and cusped presets."""
        i = PointH(x=0.0, y=1.0)
        cyclic = build_preset(PresetName.CYCLIC_HYPERBOLIC, [1.0])
        self.assertLessEqual(estimate_delta(cyclic, i, [4.5, 6.5, 8.5, 10.5, 12.5, 14.5]), 0.1)
        elementary = build_preset(PresetName.CYCLIC_PARABOLIC)
        self.assertAlmostEqual(
            estimate_delta(elementary, i, [4.0, 6.0, 8.0, 10.0, 12.0, 14.0]), 0.5, delta=0.1
        )
        pair = build_preset(PresetName.PARABOLIC_PAIR, [3.0])
        delta = estimate_delta(pair, i, [4.0, 6.0, 8.0, 10.0, 12.0, 14.0])
        self.assertGreater(delta, 0.5)
        self.assertLess(delta, 1.0)

    def test_multiplicity_bound(self):
        """Test 2(cosh 3c - 1)/ρ²."""
        self.assertAlmostEqual(multiplicity_bound(1.0, 0.5), 8.0 * (math.cosh(3.0) - 1.0))
        with self.assertRaises(DomainError):
            multiplicity_bound(1.0, 0.0)


class TestAxes(unittest.TestCase):
    """Axis lifts, collar pairs and conjugators."""

    def setUp(self):
        """Set up a Schottky torus."""
        self.torus = build_preset(PresetName.SCHOTTKY_TORUS, [4.0, 4.0])

    def test_cyclic_has_one_lift(self):
        """Test that a cyclic group has a single lift of its axis."""
        group = build_preset(PresetName.CYCLIC_HYPERBOLIC, [1.0])
        self.assertEqual(len(lift_axes(group, 1, 3)), 1)

    def test_lift_axes_accepts_matrices(self):
        """Test lifts of the axis of a product element."""
        element = word_element(self.torus, (1, 2))
        lifts = lift_axes(self.torus, element.matrix, 2)
        self.assertGreater(len(lifts), 1)

    def test_collar_pairs_are_disjoint(self):
        """Test that disjoint lifts are at positive distance from the axis."""
        pairs = disjoint_lift_pairs(self.torus, 1, 5, 3)
        self.assertEqual(len(pairs), 5)
        self.assertTrue(all(dist > 0.0 for _, _, dist in pairs))

    def test_conjugator_to_axis(self):
        """Test that the conjugator diagonalizes the generator."""
        t = conjugator_to_axis(self.torus, 2)
        g = self.torus.generators[1].matrix
        diag = (t @ g @ t.inverse()).normalized()
        self.assertAlmostEqual(diag.b, 0.0, places=10)
        self.assertAlmostEqual(diag.c, 0.0, places=10)
        self.assertAlmostEqual(diag.a / diag.d, math.exp(4.0), places=6)
        with self.assertRaises(DomainError):
            conjugator_to_axis(build_preset(PresetName.CYCLIC_PARABOLIC), 1)


if __name__ == "__main__":
    unittest.main()
