# Copyright (c) 2026, the thetaverify authors
# All rights reserved.
#
# Use of this source code is governed by the BSD 3-clause license found in
# the LICENSE file at the root of this repository.


"""
Tests for the structural property checks.

"""

import unittest

import numpy as np

from thetaverify.model import properties
from thetaverify.model.curve import build_curve, period_matrix
from thetaverify.model.errors import DenominatorOnThetaDivisor, IndeterminateMembership
from thetaverify.model.identities import BundleTheta, SplitBundle
from thetaverify.model.primeform import CurveContext

CUBIC = [0, -1, 0, 1]
PINNED = [-2, -2, 1, -1, 0, 1]


def context_of(coefficients):
    curve = build_curve(coefficients)
    return CurveContext(curve, period_matrix(curve))


class TestProperties(unittest.TestCase):
    """
    Every property check passes on a genus 1 and a genus 2 curve.

    """

    @classmethod
    def setUpClass(cls):
        cls.contexts = [context_of(CUBIC), context_of(PINNED)]

    def test_theta_parity(self):
        for context in self.contexts:
            report = properties.check_theta_parity(context, 1, 1e-8)
            self.assertTrue(report.passed, report.to_json())
            self.assertEqual(report.details['characteristics'], 4 ** context.genus)

    def test_quasi_periodicity(self):
        for context in self.contexts:
            report = properties.check_quasi_periodicity(context, 2, 1e-8)
            self.assertTrue(report.passed, report.to_json())

    def test_abel_theorem(self):
        for context in self.contexts:
            report = properties.check_abel_theorem(context, 3)
            self.assertTrue(report.passed, report.to_json())
            self.assertEqual(len(report.details['distances']), 11)

    def test_prime_form_antisymmetry(self):
        report = properties.check_prime_form_antisymmetry(self.contexts[1], 4)
        self.assertTrue(report.passed, report.to_json())
        self.assertEqual(report.residual, 0.0)

    def test_prime_form_zero(self):
        report = properties.check_prime_form_zero(self.contexts[1], 5, pairs=4)
        self.assertTrue(report.passed, report.to_json())

    def test_szego_residue(self):
        context = self.contexts[1]
        rng = np.random.default_rng(6)
        while True:
            bundle = SplitBundle.random(context.genus, 2, rng)
            try:
                BundleTheta(context, bundle)
                break
            except (DenominatorOnThetaDivisor, IndeterminateMembership):
                continue
        report = properties.check_szego_residue(context, bundle, 6, pairs=2)
        self.assertTrue(report.passed, report.to_json())
        self.assertEqual(report.details['rank'], 2)

    def test_characteristic_counts(self):
        report = properties.check_characteristic_counts(self.contexts[1])
        self.assertTrue(report.passed)
        self.assertEqual((report.details['even'], report.details['odd']), (10, 6))
        report = properties.check_characteristic_counts(self.contexts[0])
        self.assertEqual((report.details['even'], report.details['odd']), (3, 1))

    def test_tight_tolerance_fails(self):
        report = properties.check_abel_theorem(self.contexts[1], 3, tolerance=0.0)
        self.assertFalse(report.passed)


if __name__ == '__main__':
    """
    Run the tests with specified options.

    """
    unittest.main(
        verbosity=2)
