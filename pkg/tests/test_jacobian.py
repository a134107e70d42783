# Copyright (c) 2026, the thetaverify authors
# All rights reserved.
#
# Use of this source code is governed by the BSD 3-clause license found in
# the LICENSE file at the root of this repository.


"""
Tests for the Abel-Jacobi map, theta-divisor membership and the Riemann vector.

"""

import unittest

import numpy as np
from numpy.polynomial import polynomial as P

from thetaverify.model.curve import INFINITY, build_curve, period_matrix
from thetaverify.model.errors import PathDegenerate
from thetaverify.model.jacobian import (Divisor, JacobianPoint, Membership, abel_infinity, abel_map,
                                        divisor_of_x_minus, divisor_of_y, is_on_theta_divisor,
                                        lattice_distance, lattice_reduce, membership, riemann_vector,
                                        sample_points, sample_regular_configuration)

PINNED = [-2, -2, 1, -1, 0, 1]
QUINTIC = [-1, 0, 0, 0, 0, 1]


class TestBaseClass(unittest.TestCase):
    """
    Shares one curve and its periods between the test cases.

    """

    coefficients = PINNED

    @classmethod
    def setUpClass(cls):
        cls.curve = build_curve(cls.coefficients)
        cls.period_data = period_matrix(cls.curve)
        cls.tau = cls.period_data.tau.tau


class TestLattice(TestBaseClass):
    """
    Lattice reduction and distances.

    """

    def test_lattice_vectors_have_zero_distance(self):
        vector = self.tau.dot([2, -1]) + np.array([1, 3])
        self.assertLess(lattice_distance(vector, self.tau), 1e-12)
        self.assertLess(np.max(np.abs(lattice_reduce(vector, self.tau))), 1e-12)

    def test_half_period_distance(self):
        self.assertGreater(lattice_distance(np.array([0.5, 0]), self.tau), 0.1)

    def test_jacobian_point_arithmetic(self):
        a = JacobianPoint.of([0.1 + 0.2j, -0.3j], 1)
        b = JacobianPoint.of(self.tau.dot([1, 0]) + np.array([0, 2]), 0)
        self.assertEqual((a + b).degree, 1)
        self.assertTrue((a + b).equivalent(a, self.tau))
        self.assertEqual((-a).degree, -1)
        self.assertTrue(np.allclose((a - a).vector, 0))
        self.assertFalse(a.equivalent(a.scaled(2), self.tau))

    def test_divisor_merges_points(self):
        p = self.curve.point(0.3 + 0.4j)
        divisor = Divisor([(p, 1), (p, 2), (INFINITY, -3)])
        self.assertEqual(len(divisor), 2)
        self.assertEqual(divisor.degree, 0)
        self.assertEqual(len(divisor - divisor), 0)


class TestAbelMap(TestBaseClass):
    """
    Abel's theorem and basic properties of the Abel-Jacobi map.

    """

    def test_base_point_maps_to_zero(self):
        self.assertTrue(np.allclose(abel_map(self.curve, self.period_data, self.curve.base_point), 0))

    def test_branch_points_are_half_periods(self):
        for k in range(1, self.curve.degree + 1):
            image = abel_map(self.curve, self.period_data, self.curve.branch_point(k))
            self.assertLess(lattice_distance(2 * image, self.tau), 1e-6)
        self.assertLess(lattice_distance(2 * abel_infinity(self.curve, self.period_data), self.tau), 1e-6)

    def test_principal_divisors_of_x(self):
        rng = np.random.default_rng(5)
        for point in sample_points(self.curve, rng, 10):
            image = divisor_of_x_minus(self.curve, point.x).abel(self.period_data)
            self.assertEqual(image.degree, 0)
            self.assertLess(lattice_distance(image.vector, self.tau), 1e-6)

    def test_principal_divisor_of_y(self):
        image = divisor_of_y(self.curve).abel(self.period_data)
        self.assertLess(lattice_distance(image.vector, self.tau), 1e-6)

    def test_sheets_are_opposite(self):
        point = self.curve.point(0.7 - 0.9j, 1)
        first = abel_map(self.curve, self.period_data, point)
        second = abel_map(self.curve, self.period_data, point.conjugate())
        total = first + second - 2 * abel_infinity(self.curve, self.period_data)
        self.assertLess(lattice_distance(total, self.tau), 1e-6)

    def test_cache_does_not_change_values(self):
        point = self.curve.point(-0.4 + 1.7j, -1)
        cached = abel_map(self.curve, self.period_data, point)
        fresh = abel_map(self.curve, self.period_data, point, use_cache=False)
        self.assertLess(np.max(np.abs(cached - fresh)), 1e-12)

    def test_point_next_to_branch_point(self):
        x = self.curve.branch_points[2] + 1e-9
        with self.assertRaises(PathDegenerate):
            abel_map(self.curve, self.period_data, self.curve.point(x))


class TestClusteredBranchPoints(TestBaseClass):
    """
    Abel's theorem on a genus 3 curve whose branch points come in tight groups.

    """

    coefficients = list(P.polyfromroots([-1.3, 0.0, 0.04 + 0.03j, 0.07 - 0.02j, 1.1, 1.12 + 0.05j, 2.0]))

    def test_branch_points_are_half_periods(self):
        for k in range(1, self.curve.degree + 1):
            image = abel_map(self.curve, self.period_data, self.curve.branch_point(k))
            self.assertLess(lattice_distance(2 * image, self.tau), 1e-6)
        self.assertLess(lattice_distance(2 * abel_infinity(self.curve, self.period_data), self.tau), 1e-6)

    def test_principal_divisor_of_y(self):
        image = divisor_of_y(self.curve).abel(self.period_data)
        self.assertLess(lattice_distance(image.vector, self.tau), 1e-6)

    def test_principal_divisors_of_x(self):
        for x in (0.05 + 0.1j, 1.11 - 0.02j, -0.6 + 0.4j):
            image = divisor_of_x_minus(self.curve, x).abel(self.period_data)
            self.assertLess(lattice_distance(image.vector, self.tau), 1e-6)


class TestThetaDivisor(TestBaseClass):
    """
    The Riemann vector and tri-state membership.

    """

    def test_single_points_lie_on_the_divisor(self):
        K = riemann_vector(self.curve, self.period_data).vector
        rng = np.random.default_rng(17)
        for point in sample_points(self.curve, rng, 3):
            e = abel_map(self.curve, self.period_data, point) + K
            self.assertTrue(is_on_theta_divisor(e, self.period_data))

    def test_generic_pairs_are_off_the_divisor(self):
        K = riemann_vector(self.curve, self.period_data).vector
        rng = np.random.default_rng(19)
        p, q = sample_points(self.curve, rng, 2)
        e = abel_map(self.curve, self.period_data, p) + abel_map(self.curve, self.period_data, q) + K
        self.assertIs(membership(e, self.period_data), Membership.OFF)

    def test_riemann_vector_is_a_half_period(self):
        riemann = riemann_vector(self.curve, self.period_data)
        self.assertLess(lattice_distance(2 * riemann.vector, self.tau), 1e-12)
        self.assertIs(riemann_vector(self.curve, self.period_data), riemann)


class TestSampling(TestBaseClass):
    """
    Seeded sampling of regular configurations.

    """

    coefficients = QUINTIC

    def test_deterministic(self):
        first = sample_regular_configuration(self.curve, 3, [7, 1])
        second = sample_regular_configuration(self.curve, 3, [7, 1])
        self.assertEqual(first, second)
        self.assertEqual(len(first), 6)

    def test_separated_from_branch_points(self):
        points = sample_regular_configuration(self.curve, 2, 3)
        gap = 1e-2 * self.curve.scale
        for i, p in enumerate(points):
            self.assertGreater(self.curve.distance_to_branch_points(p.x), gap)
            for q in points[i + 1:]:
                self.assertGreater(abs(p.x - q.x), gap)

    def test_constraint_rejections_resample(self):
        calls = []

        def constraint(points):
            calls.append(points)
            if len(calls) < 3:
                raise PathDegenerate('rejected')

        points = sample_regular_configuration(self.curve, 1, 9, constraint)
        self.assertEqual(len(calls), 3)
        self.assertEqual(points, calls[-1])


if __name__ == '__main__':
    """
    Run the tests with specified options.

    """
    unittest.main(
        verbosity=2)
