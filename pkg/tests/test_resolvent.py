"""
Unit tests for resolvent kernels and their boundary limits.
"""

import unittest

import numpy as np

from hyperbolic_eisenstein.exceptions import DomainError
from hyperbolic_eisenstein.group import build_preset
from hyperbolic_eisenstein.resolvent import (
    cusp_limit_identity,
    free_resolvent_w2,
    funnel_limit_identity,
    funnel_prefactors,
    group_resolvent,
    kernel_array,
    resolvent_lifts,
    select_kernel_convention,
    weighted_laplacian_at,
)
from hyperbolic_eisenstein.types.models import PointH, PresetName, TruncationPolicy


class TestFreeKernel(unittest.TestCase):
    """The free weight-2 kernel."""

    def test_domain(self):
        """Test the diagonal and the half-plane ℜs > 1."""
        z = PointH(x=0.1, y=1.0)
        with self.assertRaises(DomainError):
            free_resolvent_w2(2.0, z, z)
        with self.assertRaises(DomainError):
            free_resolvent_w2(1.0, z, PointH(x=0.0, y=3.0))

    def test_modulus_is_point_pair_invariant(self):
        """Test that |g_s| only depends on the distance."""
        s = 2.5
        z, w = np.array(0.3 + 0.8j), np.array(-0.4 + 1.7j)
        a, b, c, d = 2.0, 1.0, 1.0, 1.0
        mz, mw = (a * z + b) / (c * z + d), (a * w + b) / (c * w + d)
        self.assertAlmostEqual(abs(kernel_array(s, z, w)), abs(kernel_array(s, mz, mw)), places=12)

    def test_value_report(self):
        """Test the reported σ and separation."""
        value = free_resolvent_w2(2.0, PointH(x=0.0, y=1.0), PointH(x=0.0, y=np.e))
        self.assertAlmostEqual(value.separation, 1.0, places=12)
        self.assertAlmostEqual(value.sigma, np.cosh(0.5) ** 2, places=12)

    def test_eigenfunction(self):
        """Test Δ₂ g_s + s(1 - s) g_s ≈ 0 away from the diagonal."""
        s, h = 2.0, 1e-3
        w = 1j
        center = 0.5 + 3.0j
        offsets = np.array([[complex(dx, dy) for dx in (-h, 0.0, h)] for dy in (-h, 0.0, h)])
        vals = kernel_array(s, center + offsets, np.full((3, 3), w))
        lap = weighted_laplacian_at(vals, center.imag, h, 1)
        self.assertLess(abs(lap + s * (1.0 - s) * vals[1, 1]) / abs(vals[1, 1]), 1e-4)

    def test_select_kernel_convention(self):
        """Test that c = 2s with Δ₂ + s(1 - s) is selected uniquely."""
        report = select_kernel_convention()
        self.assertTrue(report.unique)
        self.assertEqual(report.selected_third_parameter, "2s")
        self.assertEqual(report.selected_sign, "+")
        self.assertEqual(len(report.candidates), 8)

    def test_funnel_prefactors(self):
        """Test that the printed and derived prefactors differ by sign."""
        printed, derived = funnel_prefactors(2.0)
        self.assertAlmostEqual(printed, -derived)


class TestGroupResolvent(unittest.TestCase):
    """Automorphic resolvents."""

    def setUp(self):
        """Set up the cyclic groups."""
        self.hyperbolic = build_preset(PresetName.CYCLIC_HYPERBOLIC, [1.0])
        self.parabolic = build_preset(PresetName.CYCLIC_PARABOLIC)
        self.w = PointH(x=0.2, y=0.6)

    def test_domain(self):
        """Test ℜs ≤ 1 and points on the orbit of w."""
        with self.assertRaises(DomainError):
            resolvent_lifts(self.hyperbolic, 1.0, np.array([1j]), self.w, TruncationPolicy())
        on_orbit = np.array([np.e * self.w.z])
        with self.assertRaises(DomainError):
            resolvent_lifts(self.hyperbolic, 2.0, on_orbit, self.w, TruncationPolicy())

    def test_invariance_under_generator(self):
        """Test G_s(Az, w) = G_s(z, w) for the dilation A."""
        z = PointH(x=0.5, y=1.3)
        moved = PointH(x=0.5 * np.e, y=1.3 * np.e)
        policy = TruncationPolicy(abs_tol=1e-11, rel_tol=1e-10)
        at_z = group_resolvent(self.hyperbolic, 2.0, z, self.w, policy)
        at_moved = group_resolvent(self.hyperbolic, 2.0, moved, self.w, policy)
        self.assertTrue(at_z.converged)
        self.assertAlmostEqual(
            abs(complex(at_moved.value.auto_lift) - complex(at_z.value.auto_lift)), 0.0, places=9
        )

    def test_unfolded_matches_direct(self):
        """Test that unfolding the translation orbit leaves the value unchanged."""
        z = np.array([0.3 + 0.9j])
        w = PointH(x=0.1, y=0.5)
        policy = TruncationPolicy(max_word_len=64, min_word_len=2, abs_tol=1e-12, rel_tol=1e-11)
        unfolded = resolvent_lifts(self.parabolic, 3.0, z, w, policy, unfold=True)
        direct = resolvent_lifts(self.parabolic, 3.0, z, w, policy, unfold=False)
        self.assertLess(abs(unfolded.values[0] - direct.values[0]), 1e-6 * abs(unfolded.values[0]))


class TestBoundaryLimits(unittest.TestCase):
    """Cusp and funnel limits of the resolvent."""

    def test_cusp_limit(self):
        """Test (y'/λ)^{s-1} G_s(z, x' + iy') → E_{∞,1}(s, z)/(1 - 2s) for a single cusp orbit."""
        group = build_preset(PresetName.CYCLIC_PARABOLIC)
        report = cusp_limit_identity(group, 2.0, PointH(x=0.3, y=1.1))
        self.assertAlmostEqual(complex(report.rhs_reference), 1.1**2 / -3.0)
        self.assertTrue(report.converged)
        self.assertTrue(report.monotone)
        self.assertLess(max(report.deviations), 1e-6)
        extrapolated = complex(report.extrapolated_limit)
        reference = complex(report.rhs_reference)
        self.assertLess(abs(extrapolated - reference) / abs(reference), 1e-2)

    def test_cusp_limit_parabolic_pair(self):
        """Test the cusp limit on a parabolic pair, where every coset contributes."""
        group = build_preset(PresetName.PARABOLIC_PAIR, [3.0])
        policy = TruncationPolicy(max_word_len=24)
        report = cusp_limit_identity(group, 2.0, PointH(x=0.0, y=1.0), trunc=policy)
        self.assertTrue(report.converged)
        self.assertTrue(report.monotone)
        self.assertGreater(report.noise_floor, 0.0)
        self.assertLess(report.deviations[-1], 1e-4)
        self.assertEqual(report.deviation, report.deviations[-1])

    def test_cusp_limit_grid_checks(self):
        """Test the grid and generator checks."""
        group = build_preset(PresetName.CYCLIC_PARABOLIC)
        with self.assertRaises(DomainError):
            cusp_limit_identity(group, 2.0, PointH(x=0.3, y=1.1), Y_grid=(20.0, 10.0))
        with self.assertRaises(DomainError):
            cusp_limit_identity(build_preset(PresetName.CYCLIC_HYPERBOLIC, [1.0]), 2.0, PointH(x=0.3, y=1.1))

    def test_funnel_limit(self):
        """Test that ε^{-s} G_s / E_{x'} tends to the derived prefactor."""
        group = build_preset(PresetName.CYCLIC_HYPERBOLIC, [1.0])
        report = funnel_limit_identity(group, 2.0, PointH(x=0.2, y=1.3))
        derived = complex(report.derived_factor)
        self.assertAlmostEqual(complex(report.printed_factor), -derived)
        self.assertLess(report.deviations[-1], report.deviations[0])
        self.assertLess(abs(complex(report.extrapolated_limit) - derived) / abs(derived), 1e-2)
        with self.assertRaises(DomainError):
            funnel_limit_identity(group, 2.0, PointH(x=0.2, y=1.3), x_prime=0.0)


if __name__ == "__main__":
    unittest.main()
