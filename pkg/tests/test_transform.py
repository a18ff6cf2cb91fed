"""Tests for the cylinder change of variables, Kelvin transform and FD operators."""

from __future__ import annotations

import math
import unittest

import numpy as np

from fowler_core.errors import (
    BadOrdering,
    InvalidGrid,
    NonPositiveRadius,
    NonPositiveScale,
    StencilOutOfDomain,
)
from fowler_core.model import derive_params, spherical_derivatives, spherical_laplacian
from fowler_core.model import spherical_radial
from fowler_core.sim.synthetic import log_radii, spherical_grid
from fowler_core.transform import (
    CylinderGrid,
    RadialGrid,
    from_cylinder,
    grid_function,
    kelvin,
    kelvin_function,
    radial_bilaplacian,
    radial_derivatives,
    radial_laplacian,
    three_spheres_check,
    to_cylinder,
    verify_kelvin_identity,
)

PARAMS = derive_params(6)


def gaussian(r: np.ndarray) -> np.ndarray:
    return np.exp(-np.asarray(r) ** 2)


def bubble(r: np.ndarray) -> np.ndarray:
    return spherical_radial(PARAMS, 1.0, r)


class TestGrids(unittest.TestCase):
    def test_radial_grid_validation(self) -> None:
        radii = log_radii(0.1, 10.0, 20)
        with self.assertRaises(InvalidGrid):
            RadialGrid(radii[:5], np.ones(5))
        with self.assertRaises(NonPositiveRadius):
            RadialGrid(np.linspace(-1.0, 1.0, 20), np.ones(20))
        with self.assertRaises(InvalidGrid):
            RadialGrid(radii[::-1], np.ones(20))
        with self.assertRaises(InvalidGrid):
            RadialGrid(radii, -np.ones(20))
        with self.assertRaises(InvalidGrid):
            RadialGrid(radii, np.ones((19, 1)))

    def test_radial_grid_is_read_only(self) -> None:
        grid = RadialGrid(log_radii(0.1, 10.0, 20), np.ones(20))
        self.assertEqual(grid.p, 1)
        self.assertEqual(len(grid), 20)
        with self.assertRaises(ValueError):
            grid.values[0, 0] = 2.0

    def test_cylinder_grid_requires_uniform_times(self) -> None:
        with self.assertRaises(InvalidGrid):
            CylinderGrid([0.0, 1.0, 3.0], np.ones(3))
        grid = CylinderGrid(np.linspace(0.0, 1.0, 11), np.ones(11))
        self.assertAlmostEqual(grid.spacing, 0.1, places=15)


class TestCylinderTransform(unittest.TestCase):
    def test_bubble_maps_to_sech(self) -> None:
        grid = spherical_grid(PARAMS, 1.0, log_radii(1e-3, 1e3, 301))
        cyl = to_cylinder(grid, PARAMS)
        expected = spherical_derivatives(PARAMS, 1.0, cyl.times, order=0)[0]
        np.testing.assert_allclose(cyl.values[:, 0], expected, rtol=1e-12, atol=1e-15)
        self.assertAlmostEqual(cyl.times[0], -math.log(1e3), places=12)

    def test_round_trip(self) -> None:
        params = derive_params(7, 2)
        grid = spherical_grid(params, 0.8, log_radii(1e-2, 1e2, 101), lam=[1.0, 3.0])
        back = from_cylinder(to_cylinder(grid, params), params)
        np.testing.assert_allclose(back.points, grid.points, rtol=1e-12)
        np.testing.assert_allclose(back.values, grid.values, rtol=1e-12)

    def test_non_log_uniform_radii_are_resampled(self) -> None:
        radii = np.linspace(0.01, 10.0, 50)
        cyl = to_cylinder(RadialGrid(radii, bubble(radii)), PARAMS)
        self.assertEqual(len(cyl), 50)
        steps = np.diff(cyl.times)
        self.assertLess(float(np.ptp(steps)), 1e-12)

    def test_grid_function_interpolates_samples(self) -> None:
        radii = log_radii(0.1, 10.0, 40)
        grid = RadialGrid(radii, bubble(radii))
        fn = grid_function(grid)
        np.testing.assert_allclose(fn(radii), bubble(radii), rtol=1e-13)
        with self.assertRaises(InvalidGrid):
            grid_function(grid, component=1)


class TestKelvin(unittest.TestCase):
    def test_involution(self) -> None:
        r = np.array([0.3, 1.0, 2.5])
        twice = kelvin(kelvin_function(gaussian, 1.5, PARAMS), 1.5, r, PARAMS)
        np.testing.assert_allclose(twice, gaussian(r), rtol=0.0, atol=1e-12)

    def test_bubble_is_fixed(self) -> None:
        r = np.array([0.5, 1.0, 2.0, 7.0])
        np.testing.assert_allclose(kelvin(bubble, 1.0, r, PARAMS), bubble(r), atol=1e-14)

    def test_invalid_arguments(self) -> None:
        with self.assertRaises(NonPositiveScale):
            kelvin(gaussian, 0.0, 1.0, PARAMS)
        with self.assertRaises(NonPositiveRadius):
            kelvin(gaussian, 1.0, np.array([1.0, 0.0]), PARAMS)

    def test_bilaplacian_identity_gaussian(self) -> None:
        residual = verify_kelvin_identity(gaussian, 1.0, [0.5, 1.0, 2.0], PARAMS, h=2e-3)
        self.assertLessEqual(residual, 1e-4)

    def test_bilaplacian_identity_bubble(self) -> None:
        residual = verify_kelvin_identity(bubble, 1.0, [0.5, 1.0, 2.0], PARAMS, h=2e-3)
        self.assertLessEqual(residual, 1e-4)


class TestRadialOperators(unittest.TestCase):
    def test_stencils_exact_on_quartic(self) -> None:
        d1, d2, d3, d4 = radial_derivatives(lambda r: np.asarray(r) ** 4, 1.0, h=0.05)
        self.assertAlmostEqual(float(d1), 4.0, delta=1e-9)
        self.assertAlmostEqual(float(d2), 12.0, delta=1e-8)
        self.assertAlmostEqual(float(d3), 24.0, delta=1e-7)
        self.assertAlmostEqual(float(d4), 24.0, delta=1e-6)

    def test_bilaplacian_of_quartic(self) -> None:
        value = radial_bilaplacian(lambda r: np.asarray(r) ** 4, 1.0, PARAMS, h=0.05)
        self.assertAlmostEqual(float(value), 8.0 * 6 * 8, delta=1e-5)

    def test_fundamental_solution_is_biharmonic(self) -> None:
        value = radial_bilaplacian(lambda r: np.asarray(r) ** -2.0, 2.0, PARAMS, h=1e-2)
        self.assertLess(abs(float(value)), 1e-5)

    def test_bubble_solves_the_pde(self) -> None:
        value = radial_bilaplacian(bubble, 1.0, PARAMS, h=1e-2)
        expected = PARAMS.c * float(bubble(np.array(1.0))) ** (PARAMS.sobolev_exp - 1)
        self.assertAlmostEqual(float(value), expected, delta=1e-3)

    def test_laplacian_matches_closed_form(self) -> None:
        r = np.array([0.5, 1.0, 2.0])
        numeric = radial_laplacian(bubble, r, PARAMS)
        exact = spherical_laplacian(PARAMS, 1.0, r)
        np.testing.assert_allclose(numeric, exact, rtol=1e-6)

    def test_bubble_is_superharmonic(self) -> None:
        r = log_radii(1e-2, 1e2, 100)
        self.assertTrue(np.all(radial_laplacian(bubble, r, PARAMS) <= 1e-8))

    def test_stencil_domain(self) -> None:
        with self.assertRaises(StencilOutOfDomain):
            radial_derivatives(gaussian, 0.002, h=1e-3)
        with self.assertRaises(StencilOutOfDomain):
            radial_derivatives(gaussian, 1.0, h=0.0)


class TestThreeSpheres(unittest.TestCase):
    probes = np.linspace(0.6, 1.9, 14)

    def test_fundamental_interpolant_is_exact(self) -> None:
        def fundamental(r: np.ndarray) -> np.ndarray:
            return 1.0 + 2.0 * np.asarray(r) ** -2.0

        report = three_spheres_check(fundamental, 0.5, 2.0, self.probes, PARAMS)
        self.assertLess(float(np.max(np.abs(report.margins))), 1e-10)
        self.assertTrue(report.holds())

    def test_bubble_margins_nonnegative(self) -> None:
        report = three_spheres_check(bubble, 0.5, 2.0, self.probes, PARAMS)
        self.assertTrue(report.holds())
        self.assertGreater(report.min_margin, -1e-10)

    def test_square_violates(self) -> None:
        report = three_spheres_check(lambda r: np.asarray(r) ** 2, 0.5, 2.0, self.probes, PARAMS)
        self.assertLess(report.min_margin, 0.0)
        self.assertFalse(report.holds())
        self.assertIn(report.worst_probe, list(self.probes))

    def test_bad_ordering(self) -> None:
        with self.assertRaises(BadOrdering):
            three_spheres_check(bubble, 2.0, 0.5, [1.0], PARAMS)
        with self.assertRaises(BadOrdering):
            three_spheres_check(bubble, 0.5, 2.0, [0.4, 1.0], PARAMS)


if __name__ == "__main__":
    unittest.main()
