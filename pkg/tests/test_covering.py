# Copyright (c) 2026, the thetaverify authors
# All rights reserved.
#
# Use of this source code is governed by the BSD 3-clause license found in
# the LICENSE file at the root of this repository.


"""
Tests for the unramified double cover of the pinned genus 2 curve.

"""

import unittest

import numpy as np
from numpy.polynomial import polynomial as P

from thetaverify.model.covering import (FIT_TOLERANCE, DirectImageGauge, build_double_cover, check_direct_image,
                                        check_inverse_image, check_prime_form_pullback, check_pushforward_degree,
                                        pushforward_degree, sample_cover_points)
from thetaverify.model.curve import build_curve, period_matrix
from thetaverify.model.errors import (DenominatorOnThetaDivisor, IndeterminateMembership, NotEvenPartition,
                                      UnsupportedSplit)
from thetaverify.model.identities import FAIL
from thetaverify.model.jacobian import JacobianPoint, abel_infinity, abel_map, divisor_of_y, lattice_distance
from thetaverify.model.primeform import CurveContext

PINNED = [-2, -2, 1, -1, 0, 1]
F1 = [-2, 0, 1]
F2 = [1, 1, 0, 1]
TOLERANCE = 1e-6


class TestBaseClass(unittest.TestCase):
    """
    Base class that builds the cover once for all tests.

    """

    @classmethod
    def setUpClass(cls):
        curve = build_curve(PINNED)
        cls.base = CurveContext(curve, period_matrix(curve))
        cls.cover = build_double_cover(cls.base, (F1, F2), seed=3)

    def constraint(self, points):
        for point in points:
            self.cover.context.half_diff(point)
            self.cover.context.half_diff(self.cover.register_deck_lift(point))

    def twist(self, seed):
        rng = np.random.default_rng(seed)
        while True:
            vec = rng.uniform(-0.5, 0.5, 2) + 1j * rng.uniform(-0.5, 0.5, 2)
            candidate = JacobianPoint.of(vec, 0)
            try:
                DirectImageGauge(self.cover, candidate)
                return candidate
            except (DenominatorOnThetaDivisor, IndeterminateMembership):
                continue


class TestCoverConstruction(TestBaseClass):
    """
    Genus, fitted pullback matrices and the deck action.

    """

    def test_cover_genus(self):
        self.assertEqual(self.cover.genus, 2)
        self.assertEqual(self.cover.cover_genus, 3)
        self.assertEqual(self.cover.R.shape, (2, 3))
        self.assertEqual(self.cover.S.shape, (3, 2))

    def test_fit_residuals(self):
        for value in self.cover.fit_residuals.values():
            self.assertLess(value, FIT_TOLERANCE)
        for value in self.cover.consistency.values():
            self.assertLess(value, FIT_TOLERANCE)

    def test_deck_eigenvalues(self):
        eigenvalues = self.cover.deck_eigenvalues()
        np.testing.assert_allclose(eigenvalues, [-1, 1, 1], atol=1e-6)

    def test_deck_is_involution(self):
        point = sample_cover_points(self.cover, 1, [11, 0])[0]
        back = self.cover.deck(self.cover.deck(point))
        self.assertAlmostEqual(abs(back.x - point.x), 0, places=9)
        self.assertEqual(back.sheet, point.sheet)

    def test_projection_commutes_with_deck(self):
        point = sample_cover_points(self.cover, 1, [12, 0])[0]
        image = self.cover.project(point)
        deck_image = self.cover.project(self.cover.deck(point))
        self.assertAlmostEqual(abs(image.x - deck_image.x), 0, places=9)

    def test_cover_abel_images_of_branch_points(self):
        curve, period_data = self.cover.curve, self.cover.period_data
        tau = period_data.tau
        for k in range(1, curve.degree + 1):
            image = abel_map(curve, period_data, curve.branch_point(k))
            self.assertLess(lattice_distance(2 * image, tau), 1e-6)
        self.assertLess(lattice_distance(2 * abel_infinity(curve, period_data), tau), 1e-6)
        self.assertLess(lattice_distance(divisor_of_y(curve).abel(period_data).vector, tau), 1e-6)

    def test_deck_lift_matches_path_integration(self):
        tau = self.cover.period_data.tau
        for point in sample_cover_points(self.cover, 3, [17, 0]):
            image = self.cover.register_deck_lift(point)
            integrated = abel_map(self.cover.curve, self.cover.period_data, image)
            lift = self.cover.context.abel(image)
            self.assertLess(lattice_distance(lift - integrated, tau), 1e-8)
            equivariant = self.cover.deck_matrix.dot(self.cover.context.abel(point)) + self.cover.kappa
            self.assertLess(np.max(np.abs(lift - equivariant)), 1e-6)

    def test_wrong_factorization(self):
        with self.assertRaises(NotEvenPartition):
            build_double_cover(self.base, ([-3, 0, 1], F2))

    def test_odd_factor(self):
        with self.assertRaises(NotEvenPartition):
            build_double_cover(self.base, (F2, F1))

    def test_quartic_factor(self):
        roots = P.polyroots(F2)
        f1 = P.polymul(F1, P.polyfromroots(roots[:2]))
        f2 = P.polyfromroots(roots[2:])
        with self.assertRaises(UnsupportedSplit):
            build_double_cover(self.base, (list(f1), list(f2)))


class TestPushforwardDegree(TestBaseClass):
    """
    deg gamma_* M~ on an unramified cover.

    """

    def test_formula(self):
        self.assertEqual(pushforward_degree(2, 3, 2, 0, 1), 0)
        self.assertEqual(pushforward_degree(2, 3, 2, 3, 1), 3)
        self.assertEqual(pushforward_degree(2, 4, 2, 0, 1), -1)

    def test_check(self):
        self.assertTrue(check_pushforward_degree(self.cover, 0, 1))
        self.assertTrue(check_pushforward_degree(self.cover, 3, 1))
        self.assertTrue(check_pushforward_degree(self.cover, 4, 2))
        self.assertFalse(check_pushforward_degree(self.cover, 0, 1, cover_genus=4))


class TestCoverIdentities(TestBaseClass):
    """
    Prime form pullback, direct image and the cover addition formula.

    """

    def test_prime_form_pullback(self):
        points = sample_cover_points(self.cover, 8, [13, 0], self.constraint)
        report = check_prime_form_pullback(self.cover, points, TOLERANCE, seed=13)
        self.assertTrue(report.passed, report.to_json())
        self.assertEqual(report.details['pairs'], 3)

    def test_direct_image(self):
        twist = self.twist(14)
        for s in range(3):
            points = sample_cover_points(self.cover, 4, [14, s], self.constraint)
            report = check_direct_image(self.cover, twist, points, TOLERANCE)
            self.assertTrue(report.passed, report.to_json())

    def test_direct_image_of_zero(self):
        twist = self.twist(18)
        point = sample_cover_points(self.cover, 1, [18, 0], self.constraint)[0]
        report = check_direct_image(self.cover, twist, [point, point], TOLERANCE)
        self.assertLess(report.residual, 1e-12)
        self.assertEqual(report.details['lattice_offset'], 0.0)
        self.assertAlmostEqual(abs(report.rhs.to_complex() - 1), 0, places=12)

    def test_direct_image_of_a_fibre(self):
        twist = self.twist(19)
        point = sample_cover_points(self.cover, 1, [19, 0], self.constraint)[0]
        report = check_direct_image(self.cover, twist, [point, self.cover.deck(point)], TOLERANCE)
        self.assertTrue(report.passed, report.to_json())
        self.assertLess(report.details['lattice_offset'], 1e-7)

    def test_pullback_is_deck_invariant(self):
        twist = self.twist(20)
        points = sample_cover_points(self.cover, 4, [20, 0], self.constraint)
        moved = [self.cover.register_deck_lift(points[0])] + points[1:]
        tau = self.cover.period_data.tau
        first = self.cover.pullback_abel(points[:2], points[2:])
        second = self.cover.pullback_abel(moved[:2], moved[2:])
        self.assertLess(lattice_distance(first - second, tau), 1e-7)
        for configuration in (points, moved):
            report = check_direct_image(self.cover, twist, configuration, TOLERANCE)
            self.assertTrue(report.passed, report.to_json())

    def test_direct_image_detects_a_wrong_pullback(self):
        twist = self.twist(21)
        points = sample_cover_points(self.cover, 4, [21, 0], self.constraint)
        original = self.cover.S
        try:
            self.cover.S = original * 1.001
            report = check_direct_image(self.cover, twist, points, TOLERANCE)
        finally:
            self.cover.S = original
        self.assertEqual(report.verdict, FAIL)

    def test_inverse_image(self):
        twist = self.twist(15)
        for s in range(3):
            points = sample_cover_points(self.cover, 4, [15, s], self.constraint)
            report = check_inverse_image(self.cover, twist, points, TOLERANCE)
            self.assertTrue(report.passed, report.to_json())

    def test_base_product_depends_on_divisor(self):
        twist = self.twist(16)
        points = sample_cover_points(self.cover, 4, [16, 0], self.constraint)
        gauge = DirectImageGauge(self.cover, twist)
        xs, ys = points[:2], points[2:]
        a = sum((self.base.abel(self.cover.project(x)) - self.base.abel(self.cover.project(y))
                 for x, y in zip(xs, ys)), np.zeros(2, dtype=complex))
        product = gauge.base_product(a)
        shifted = gauge.base_product(a + 0.1)
        self.assertGreater(abs((shifted / product).to_complex() - 1), 1e-3)


if __name__ == '__main__':
    """
    Run the tests with specified options.

    """
    unittest.main(
        verbosity=2)
