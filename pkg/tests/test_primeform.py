# Copyright (c) 2026, the thetaverify authors
# All rights reserved.
#
# Use of this source code is governed by the BSD 3-clause license found in
# the LICENSE file at the root of this repository.


"""
Tests for half-differentials and the prime form.

"""

import unittest
from fractions import Fraction

import numpy as np

from thetaverify.model.curve import build_curve, period_matrix
from thetaverify.model.errors import WeightLedgerMismatch
from thetaverify.model.jacobian import sample_points
from thetaverify.model.primeform import (CurveContext, TrivializedValue, nearby_point, odd_characteristic,
                                         prime_form, prime_form_limit, require_same_weights,
                                         trivialized_det)

PINNED = [-2, -2, 1, -1, 0, 1]


class TestTrivializedValue(unittest.TestCase):
    """
    The weight ledger.

    """

    def setUp(self):
        curve = build_curve([0, -1, 0, 1])
        self.p, self.q = curve.point(0.5 + 0.5j), curve.point(-0.3 + 2j)

    def test_weights_combine(self):
        a = TrivializedValue(2, {self.p: Fraction(1, 2)})
        b = TrivializedValue(3, {self.p: Fraction(-1, 2), self.q: 1})
        product = a * b
        self.assertEqual(product.weight(self.p), 0)
        self.assertEqual(product.weight(self.q), 1)
        self.assertNotIn(self.p, product.weights)
        self.assertEqual((a / b).weight(self.p), 1)
        self.assertEqual((a ** 4).weight(self.p), 2)
        self.assertAlmostEqual((a * 5).value.to_complex(), 10, places=12)

    def test_mismatch(self):
        with self.assertRaises(WeightLedgerMismatch):
            require_same_weights(TrivializedValue(1, {self.p: 1}), TrivializedValue(1), 'test')

    def test_determinant_ledger(self):
        consistent = [[TrivializedValue(1, {self.p: 1}), TrivializedValue(2, {self.p: 1, self.q: 1})],
                      [TrivializedValue(3), TrivializedValue(4, {self.q: 1})]]
        det = trivialized_det(consistent)
        self.assertAlmostEqual(det.value.to_complex(), -2, places=12)
        self.assertEqual(det.weight(self.p), 1)
        self.assertEqual(det.weight(self.q), 1)
        broken = [[TrivializedValue(1, {self.p: 1}), TrivializedValue(2)],
                  [TrivializedValue(3), TrivializedValue(4)]]
        with self.assertRaises(WeightLedgerMismatch):
            trivialized_det(broken)


class TestPrimeForm(unittest.TestCase):
    """
    Antisymmetry, the simple zero on the diagonal and sign independence.

    """

    @classmethod
    def setUpClass(cls):
        curve = build_curve(PINNED)
        cls.context = CurveContext(curve, period_matrix(curve))
        cls.points = sample_points(curve, np.random.default_rng(23), 20)

    def test_odd_characteristic(self):
        delta = odd_characteristic(self.context.period_data)
        self.assertTrue(delta.is_odd)
        self.assertEqual(self.context.delta, delta)

    def test_antisymmetry_is_exact(self):
        for p, q in zip(self.points[:10], self.points[10:]):
            forward = prime_form(self.context, p, q)
            backward = prime_form(self.context, q, p)
            self.assertEqual(forward.value.to_complex(), -backward.value.to_complex())
            self.assertEqual(forward.weight(p), Fraction(-1, 2))
            self.assertEqual(forward.weight(q), Fraction(-1, 2))

    def test_vanishes_on_the_diagonal(self):
        p = self.points[0]
        value = prime_form(self.context, p, p)
        self.assertTrue(value.value.is_zero)
        self.assertEqual(value.weight(p), -1)

    def test_simple_zero(self):
        for p in self.points[:10]:
            coarse = prime_form_limit(self.context, p, 1e-3)
            fine = prime_form_limit(self.context, p, 1e-4)
            self.assertLess(abs((coarse / fine).to_complex() - 1), 0.02)
            square = self.context.half_diff(p).value ** 2
            self.assertLess(abs((fine / square).to_complex() - 1), 0.01)

    def test_nearby_point_follows_the_branch(self):
        curve = self.context.curve
        p = self.points[3]
        q = nearby_point(curve, p, 1e-3)
        self.assertLess(abs(curve.y(q) - curve.y(p)), 0.1 * abs(curve.y(p)))

    def test_random_half_differential_signs(self):
        signed = CurveContext(self.context.curve, self.context.period_data, sign_seed=99)
        for p, q in zip(self.points[:5], self.points[5:10]):
            plain = prime_form(self.context, p, q).value.to_complex()
            flipped = prime_form(signed, p, q).value.to_complex()
            self.assertTrue(abs(flipped - plain) < 1e-12 * abs(plain) or abs(flipped + plain) < 1e-12 * abs(plain))


if __name__ == '__main__':
    """
    Run the tests with specified options.

    """
    unittest.main(
        verbosity=2)
