# Copyright (c) 2026, the thetaverify authors
# All rights reserved.
#
# Use of this source code is governed by the BSD 3-clause license found in
# the LICENSE file at the root of this repository.


"""
Tests for section bases and the KP determinant identity.

"""

import unittest

import numpy as np

from thetaverify.model.curve import build_curve, period_matrix
from thetaverify.model.errors import DegreeTooSmall, NonSquareBlocks
from thetaverify.model.jacobian import sample_regular_configuration
from thetaverify.model.kp import KPQuotient, block_determinants, check_kp_identity, kp_matrix, section_basis
from thetaverify.model.primeform import CurveContext
from thetaverify.model.scaled import scaled_det, scaled_product

PINNED = [-2, -2, 1, -1, 0, 1]


def regular_samples(kp, seed):
    """Points y_1..y_m with theta(M(-sum y_j)) off the divisor."""
    return sample_regular_configuration(kp.context.curve, kp.m, seed, lambda points: kp.quotient(points[:kp.m]))[:kp.m]


class TestSectionBasis(unittest.TestCase):
    """
    Monomial bases of O(n infinity).

    """

    def setUp(self):
        self.curve = build_curve(PINNED)

    def test_degree_four(self):
        basis = section_basis(self.curve, 4)
        self.assertEqual(basis.descriptors(), ['1', 'x', 'x^2'])
        self.assertEqual(basis.count, 3)

    def test_degree_five(self):
        self.assertEqual(section_basis(self.curve, 5).descriptors(), ['1', 'x', 'x^2', 'y'])

    def test_degree_too_small(self):
        with self.assertRaises(DegreeTooSmall):
            section_basis(self.curve, 2)

    def test_vandermonde(self):
        points = [self.curve.point(x) for x in (0.5, 1.0 + 1j, -2.0)]
        det = scaled_det(kp_matrix(self.curve, [section_basis(self.curve, 4)], points)).to_complex()
        xs = [p.x for p in points]
        expected = (xs[1] - xs[0]) * (xs[2] - xs[0]) * (xs[2] - xs[1])
        self.assertLess(abs(det - expected), 1e-12 * abs(expected))

    def test_repeated_point(self):
        p = self.curve.point(0.3 - 0.2j)
        q = self.curve.point(1.1 + 0.4j)
        det = scaled_det(kp_matrix(self.curve, [section_basis(self.curve, 4)], [p, p, q]))
        self.assertLess(abs(det.to_complex()), 1e-12)

    def test_block_factorization(self):
        bases = [section_basis(self.curve, 5)] * 2
        points = [self.curve.point(x, s) for x, s in ((0.5, 1), (1 + 1j, -1), (-2, 1), (0.2 - 1.5j, -1))]
        full = scaled_det(kp_matrix(self.curve, bases, points)).to_complex()
        blocks = scaled_product(block_determinants(self.curve, bases, points)).to_complex()
        self.assertLess(min(abs(full - blocks), abs(full + blocks)), 1e-12 * abs(blocks))

    def test_non_square_blocks(self):
        points = [self.curve.point(x) for x in (0.5, 1.0 + 1j, -2.0)]
        with self.assertRaises(NonSquareBlocks):
            kp_matrix(self.curve, [section_basis(self.curve, 4), section_basis(self.curve, 5)], points)
        with self.assertRaises(NonSquareBlocks):
            kp_matrix(self.curve, [section_basis(self.curve, 5)], points)


class TestKPIdentity(unittest.TestCase):
    """
    Constancy of lambda, alternation and basis changes on a genus 2 curve.

    """

    @classmethod
    def setUpClass(cls):
        curve = build_curve(PINNED)
        cls.context = CurveContext(curve, period_matrix(curve))
        cls.basis = section_basis(curve, 4)

    def test_rank_one_constancy(self):
        report = check_kp_identity(self.context, 1, 4, 10, 7, 1e-6)
        self.assertTrue(report.passed, report.to_json())
        self.assertEqual(report.details['m'], 3)
        self.assertEqual(len(report.details['deviations']), 10)

    def test_rank_two_constancy(self):
        report = check_kp_identity(self.context, 2, 4, 10, 8, 1e-6)
        self.assertTrue(report.passed, report.to_json())

    def test_alternation(self):
        kp = KPQuotient(self.context, 2, 4)
        y1, y2, y3 = regular_samples(kp, [50, 0])
        original = kp.quotient([y1, y2, y3]).value
        swapped = kp.quotient([y2, y1, y3]).value
        self.assertLess(abs((swapped / original).to_complex() - 1), 1e-10)

    def test_basis_changes(self):
        plain_kp = KPQuotient(self.context, 1, 4)
        points = regular_samples(plain_kp, [51, 0])
        plain = plain_kp.quotient(points).value
        sheared = self.basis.with_transform([[1, 3, 0], [0, 1, 0], [0, 0, 1]])
        doubled = self.basis.with_transform(np.diag([2, 1, 1]))
        self.assertLess(abs((KPQuotient(self.context, 1, 4, [sheared]).quotient(points).value / plain).to_complex()
                            - 1), 1e-10)
        self.assertLess(abs((KPQuotient(self.context, 1, 4, [doubled]).quotient(points).value / plain).to_complex()
                            - 0.5), 1e-10)
        report = check_kp_identity(self.context, 1, 4, 4, 9, 1e-6, bases=[doubled])
        self.assertTrue(report.passed, report.to_json())


if __name__ == '__main__':
    """
    Run the tests with specified options.

    """
    unittest.main(
        verbosity=2)
