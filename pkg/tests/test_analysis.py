"""
Unit tests for the verification harness.
"""

import math
import unittest

import numpy as np

from hyperbolic_eisenstein.analysis import (
    apply_maass,
    apply_weighted_laplacian,
    collar_separation_margin,
    composition_identity_residual,
    deck_path,
    degeneration_diagnostic,
    duality_check,
    field_on_grid,
    functional_equation_residual,
    generator_loop,
    geodesic_loop,
    geodesic_samples,
    grid_step,
    integrate_form_along_cycle,
    intersection_number,
    l2_norm_estimate,
    matched_policy,
    standard_collar_check,
    stencil_grid,
)
from hyperbolic_eisenstein.exceptions import DomainError
from hyperbolic_eisenstein.group import build_preset
from hyperbolic_eisenstein.series import omega_lifts
from hyperbolic_eisenstein.specfun import k_factor
from hyperbolic_eisenstein.types.models import (
    CycleKind,
    GridField,
    GridSpec,
    GroupElement,
    MaassDirection,
    Matrix2,
    PointH,
    PresetName,
    SeriesConfig,
    SeriesFamily,
    TruncationPolicy,
)


def sample_field(weight: int, h: float = 1e-2, n: int = 7) -> GridField:
    """A smooth non-automorphic test field on an n×n grid about 0.4 + 1.3i."""
    spec = stencil_grid(PointH(x=0.4, y=1.3), h, n)
    z = spec.points()
    values = (1.0 + 0.1j) * np.exp(0.3 * z.real) * z.imag**1.5
    return field_on_grid(values, spec, weight)


class TestOperators(unittest.TestCase):
    """Finite-difference Laplacian and Maass operators."""

    def test_grid_helpers(self):
        """Test stencil grids and the uniform-step check."""
        spec = stencil_grid(PointH(x=0.0, y=1.0), 0.01, 5)
        self.assertAlmostEqual(grid_step(spec), 0.01)
        with self.assertRaises(DomainError):
            grid_step(GridSpec(x_min=0.0, x_max=1.0, y_min=1.0, y_max=1.5, nx=5, ny=5))
        with self.assertRaises(DomainError):
            stencil_grid(PointH(x=0.0, y=1.0), 0.01, 2)

    def test_laplacian_of_y_squared(self):
        """Test Δ₀ y² = 2y², exact for central differences."""
        spec = stencil_grid(PointH(x=0.0, y=2.0), 0.05, 5)
        field = field_on_grid(spec.points().imag ** 2, spec, 0)
        lap = apply_weighted_laplacian(field)
        self.assertEqual(lap.shape, (3, 3))
        np.testing.assert_allclose(lap.values, 2.0 * field.interior(), rtol=1e-9)

    def test_maass_on_power_of_y(self):
        """Test K_0 y² = L_0 y² = 2y² and the weight shift."""
        spec = stencil_grid(PointH(x=0.0, y=2.0), 0.05, 5)
        field = field_on_grid(spec.points().imag ** 2, spec, 0)
        raised = apply_maass(field, MaassDirection.RAISE)
        lowered = apply_maass(field, MaassDirection.LOWER)
        self.assertEqual(raised.weight, 1)
        self.assertEqual(lowered.weight, -1)
        np.testing.assert_allclose(raised.values, 2.0 * field.interior(), rtol=1e-9)
        np.testing.assert_allclose(lowered.values, 2.0 * field.interior(), rtol=1e-9)

    def test_composition_identities(self):
        """Test LK = Δ - q(q+1) and KL = Δ - q(q-1) up to discretization error."""
        for q in (0, 1, 2):
            field = sample_field(q)
            self.assertLess(composition_identity_residual(field, "raise_lower"), 1e-3)
            self.assertLess(composition_identity_residual(field, "lower_raise"), 1e-3)

    def test_small_grids_rejected(self):
        """Test that fields smaller than 3x3 are rejected."""
        field = GridField(x_min=0.0, y_min=1.0, h=0.1, values=np.ones((2, 2), dtype=complex))
        with self.assertRaises(DomainError):
            apply_weighted_laplacian(field)
        with self.assertRaises(DomainError):
            apply_maass(field, MaassDirection.RAISE)


class TestFunctionalEquations(unittest.TestCase):
    """Residuals of the series' differential equations."""

    def test_matched_policy(self):
        """Test that the matched policy sums exactly the same shells."""
        policy = matched_policy(TruncationPolicy(strict=True), 5)
        self.assertEqual(policy.min_word_len, 5)
        self.assertEqual(policy.max_word_len, 6)
        self.assertFalse(policy.strict)

    def test_cyclic_omega(self):
        """Test the Ω recurrence on the cyclic group and its second-order convergence."""
        group = build_preset(PresetName.CYCLIC_HYPERBOLIC, [1.0])
        fine = functional_equation_residual(SeriesFamily.HYPERBOLIC, group, 1.0)
        self.assertLess(fine.residual, 1e-3)
        self.assertTrue(fine.converged)
        coarse_grid = stencil_grid(PointH(x=0.4, y=1.3), 2e-3)
        coarse = functional_equation_residual(SeriesFamily.HYPERBOLIC, group, 1.0, grid=coarse_grid)
        ratio = coarse.residual / fine.residual
        self.assertGreater(ratio, 3.5)
        self.assertLess(ratio, 4.5)

    def test_schottky_families(self):
        """Test the Ω and weight-q recurrences on the Schottky torus."""
        group = build_preset(PresetName.SCHOTTKY_TORUS, [4.0, 4.0])
        omega = functional_equation_residual(SeriesFamily.HYPERBOLIC, group, 1.5)
        self.assertLess(omega.residual, 5e-3)
        config = SeriesConfig(family=SeriesFamily.WEIGHT_Q, q=2, c_gen=2)
        weight_q = functional_equation_residual(SeriesFamily.WEIGHT_Q, group, 2.5, config=config)
        self.assertEqual(weight_q.q, 2)
        self.assertLess(weight_q.residual, 5e-3)

    def test_cusp_families(self):
        """Test the eigenvalue equations of the parabolic series and θ^s."""
        group = build_preset(PresetName.PARABOLIC_PAIR, [3.0])
        config = SeriesConfig(family=SeriesFamily.PARABOLIC, q=1, cusp_gen=1)
        parabolic = functional_equation_residual(SeriesFamily.PARABOLIC, group, 2.0, config=config)
        self.assertLess(parabolic.residual, 5e-3)
        theta = functional_equation_residual(SeriesFamily.THETA, group, 2.0)
        self.assertLess(theta.residual, 5e-3)

    def test_weight_q_second_order(self):
        """Test the weight-q recurrence for q = 1, 2 and its second-order convergence on the torus."""
        group = build_preset(PresetName.SCHOTTKY_TORUS, [4.0, 4.0])
        coarse_grid = stencil_grid(PointH(x=0.4, y=1.3), 2e-3)
        for q in (1, 2):
            config = SeriesConfig(family=SeriesFamily.WEIGHT_Q, q=q, c_gen=1)
            fine = functional_equation_residual(SeriesFamily.WEIGHT_Q, group, 2.5, config=config)
            coarse = functional_equation_residual(SeriesFamily.WEIGHT_Q, group, 2.5, grid=coarse_grid, config=config)
            self.assertLess(fine.residual, 5e-3)
            ratio = coarse.residual / fine.residual
            self.assertGreater(ratio, 3.5, q)
            self.assertLess(ratio, 4.5, q)

    def test_eta_hat_second_order(self):
        """Test the η̂ recurrence and its second-order convergence on a parabolic pair."""
        group = build_preset(PresetName.PARABOLIC_PAIR, [3.0])
        fine = functional_equation_residual(SeriesFamily.ETA_HAT, group, 3.0)
        self.assertTrue(fine.converged)
        self.assertLess(fine.residual, 5e-3)
        coarse_grid = stencil_grid(PointH(x=0.4, y=1.3), 2e-3)
        coarse = functional_equation_residual(SeriesFamily.ETA_HAT, group, 3.0, grid=coarse_grid)
        ratio = coarse.residual / fine.residual
        self.assertGreater(ratio, 3.5)
        self.assertLess(ratio, 4.5)

    def test_resolvent_needs_w(self):
        """Test that the resolvent family needs its second point."""
        group = build_preset(PresetName.CYCLIC_HYPERBOLIC, [1.0])
        with self.assertRaises(DomainError):
            functional_equation_residual(SeriesFamily.RESOLVENT, group, 2.0)


class TestCycles(unittest.TestCase):
    """Cycle construction, integrals and intersection numbers."""

    def setUp(self):
        """Set up the Schottky torus and its generator loops."""
        self.torus = build_preset(PresetName.SCHOTTKY_TORUS, [4.0, 4.0])
        self.a_loop = generator_loop(self.torus, 1)
        self.b_loop = generator_loop(self.torus, 2)

    def test_geodesic_samples(self):
        """Test that samples keep their endpoints and lie on one geodesic."""
        z1, z2 = PointH(x=-0.6, y=0.8), PointH(x=0.6, y=0.8)
        samples = geodesic_samples(z1, z2, 9)
        self.assertEqual(samples[0], z1)
        self.assertEqual(samples[-1], z2)
        for p in samples:
            self.assertAlmostEqual(abs(p.z), 1.0, places=12)
        with self.assertRaises(DomainError):
            geodesic_samples(z1, z2, 1)

    def test_loops_close_up(self):
        """Test that generator loops close under their generator."""
        self.assertIs(self.a_loop.kind, CycleKind.GEODESIC_LOOP)
        self.assertEqual(self.b_loop.closer.word, (2,))
        reversed_loop = self.b_loop.reversed()
        self.assertEqual(reversed_loop.closer.word, (-2,))
        parabolic = GroupElement(matrix=Matrix2(a=1.0, b=1.0, c=0.0, d=1.0), word=(1,))
        with self.assertRaises(DomainError):
            geodesic_loop(parabolic)

    def test_integrate_exact_forms(self):
        """Test ∫dz and ∫dz/z² along a deck path."""
        element = GroupElement(matrix=Matrix2(a=1.0, b=1.0, c=0.0, d=1.0), word=(1,))
        path = deck_path(element, PointH(x=0.2, y=1.0))
        self.assertIs(path.kind, CycleKind.DECK_PATH)
        total = integrate_form_along_cycle(lambda z: np.ones_like(z), path, real_form=False)
        self.assertAlmostEqual(total, 1.0 + 0j, places=10)
        self.assertAlmostEqual(integrate_form_along_cycle(lambda z: np.ones_like(z), path), 2.0, places=10)
        z0, z1 = 0.2 + 1.0j, 1.2 + 1.0j
        total = integrate_form_along_cycle(lambda z: 1.0 / z**2, path, real_form=False)
        self.assertAlmostEqual(total, 1.0 / z0 - 1.0 / z1, places=10)

    def test_intersection_numbers(self):
        """Test A·B = -1, B·A = +1 and A·A = 0."""
        self.assertEqual(intersection_number(self.a_loop, self.b_loop, self.torus), -1)
        self.assertEqual(intersection_number(self.b_loop, self.a_loop, self.torus), 1)
        self.assertEqual(intersection_number(self.a_loop, self.a_loop, self.torus), 0)

    def test_duality(self):
        """Test |∫_B Ω_A(s)| = |A·B| and ∫_A Ω_A(s) = 0."""
        deviations = [duality_check(self.torus, 1, self.b_loop, s) for s in (0.5, 1.0, 2.0)]
        for deviation in deviations:
            self.assertLess(abs(deviation), 2e-3)
        self.assertLess(max(deviations) - min(deviations), 2e-3)
        self.assertLess(abs(duality_check(self.torus, 1, self.a_loop, 1.0)), 1e-6)


class TestMassesAndCollars(unittest.TestCase):
    """L² masses and collar checks."""

    def test_cyclic_mass(self):
        """Test the full mass l k(2s)/|k(s)|² = π/8 of Ω(1) for l = 1."""
        group = build_preset(PresetName.CYCLIC_HYPERBOLIC, [1.0])

        def form(points):
            return omega_lifts(group, 1, 1.0, points, TruncationPolicy()).values

        report = l2_norm_estimate(form, group, (2.0, 4.0, 8.0), normalization=k_factor(1.0), sigma=1.0)
        self.assertAlmostEqual(report.masses[-1], math.pi / 8.0, places=6)
        self.assertAlmostEqual(report.unnormalized_masses[-1], math.pi / 2.0, places=5)
        self.assertLess(report.unnormalized_masses[-1], report.bound)
        self.assertEqual(len(report.increments), 2)
        self.assertLess(report.increments[-1], report.increments[0])
        self.assertGreaterEqual(report.multiplicity_observed, 3)
        self.assertLessEqual(report.multiplicity_observed, report.multiplicity_bound)
        with self.assertRaises(DomainError):
            l2_norm_estimate(form, group, (4.0, 2.0))

    def test_collars(self):
        """Test the collar relation and the separation inequality."""
        self.assertLess(standard_collar_check(), 1e-12)
        torus = build_preset(PresetName.SCHOTTKY_TORUS, [4.0, 4.0])
        for gen in (1, 2):
            self.assertGreaterEqual(collar_separation_margin(torus, gen), 0.0)


class TestDegeneration(unittest.TestCase):
    """Pinching the elementary family onto the cyclic parabolic group."""

    def test_elementary_family(self):
        """Test monotone errors below 1e-3 at l = 0.05."""
        for q, s in ((1, 2.0), (1, 3.0), (2, 3.0)):
            table = degeneration_diagnostic(q, s, (0.4, 0.2, 0.1, 0.05))
            self.assertTrue(table.assertive)
            self.assertTrue(table.monotone)
            self.assertLess(table.sup_errors[-1], 1e-3)
            self.assertEqual(table.closed_form_errors, sorted(table.closed_form_errors, reverse=True))
            self.assertLess(table.one_form_errors[-1], 1e-3)

    def test_custom_family_reports_trends(self):
        """Test that a user family is not assertive and logs a warning."""
        with self.assertLogs("hyperbolic_eisenstein.analysis", level="WARNING"):
            table = degeneration_diagnostic(
                1,
                2.0,
                (0.4, 0.2),
                family=lambda l: build_preset(PresetName.CYCLIC_HYPERBOLIC, [l]),
                correspondence=lambda l, w: np.exp(l * w),
            )
        self.assertFalse(table.assertive)
        self.assertEqual(table.closed_form_errors, [])

    def test_rejected_inputs(self):
        """Test the grid, ℜs and family checks."""
        with self.assertRaises(DomainError):
            degeneration_diagnostic(1, 2.0, (0.1, 0.2))
        with self.assertRaises(DomainError):
            degeneration_diagnostic(1, 1.0, (0.2, 0.1))
        with self.assertRaises(DomainError):
            degeneration_diagnostic(1, 2.0, (0.2, 0.1), family=lambda l: build_preset(PresetName.CYCLIC_PARABOLIC))


if __name__ == "__main__":
    unittest.main()
