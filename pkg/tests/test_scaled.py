# Copyright (c) 2026, the thetaverify authors
# All rights reserved.
#
# Use of this source code is governed by the BSD 3-clause license found in
# the LICENSE file at the root of this repository.


"""
Tests for the extended-range complex arithmetic.

"""

import cmath
import math
import unittest

import numpy as np

from thetaverify.model.scaled import ScaledComplex, relative_residual, scaled_det, scaled_product


class TestScaledComplex(unittest.TestCase):
    """
    Arithmetic that must agree with plain complex numbers inside the double range.

    """

    def test_normalized_mantissa(self):
        value = ScaledComplex(3 + 4j, 2.0)
        self.assertTrue(1 <= abs(value.mantissa) < 2)
        self.assertAlmostEqual(abs(value.to_complex() - (3 + 4j) * math.exp(2.0)), 0, places=12)

    def test_arithmetic_matches_complex(self):
        a, b = 1.5 - 2j, -0.25 + 0.75j
        sa, sb = ScaledComplex(a), ScaledComplex(b)
        for scaled, plain in ((sa * sb, a * b), (sa / sb, a / b), (sa + sb, a + b), (sa - sb, a - b),
                              (sa ** 3, a ** 3), (sa ** -2, a ** -2), (-sa, -a)):
            self.assertLess(abs(scaled.to_complex() - plain), 1e-13 * abs(plain))

    def test_values_beyond_double_range(self):
        huge = ScaledComplex.from_log(2000 + 0.5j)
        self.assertEqual(huge.to_complex().real, math.inf)
        ratio = huge / ScaledComplex.from_log(1999 + 0.5j)
        self.assertLess(abs(ratio.to_complex() - math.e), 1e-10)
        self.assertAlmostEqual(huge.log_abs(), 2000, places=10)
        self.assertIn('e+868', huge.decimal()[0])

    def test_zero(self):
        zero = ScaledComplex.zero()
        self.assertTrue(zero.is_zero)
        self.assertTrue((zero * ScaledComplex(5)).is_zero)
        self.assertEqual((zero + ScaledComplex(2)).to_complex(), 2)
        with self.assertRaises(ZeroDivisionError):
            ScaledComplex(1) / zero

    def test_large_power_uses_logarithm(self):
        value = ScaledComplex(1.0001j) ** 1000
        expected = cmath.exp(1000 * cmath.log(1.0001j))
        self.assertLess(abs(value.to_complex() - expected), 1e-10 * abs(expected))

    def test_to_json(self):
        mantissa_re, mantissa_im, exponent, decimal = ScaledComplex(-2.0).to_json()
        self.assertEqual((mantissa_re, mantissa_im), (-1.0, 0.0))
        self.assertAlmostEqual(exponent, math.log(2.0))
        self.assertEqual(decimal, ['-2.0', '0.0'])
        self.assertEqual(ScaledComplex(0).to_json()[3], ['0.0', '0.0'])


class TestScaledHelpers(unittest.TestCase):
    """
    Products, residuals and determinants.

    """

    def test_relative_residual(self):
        self.assertEqual(relative_residual(ScaledComplex(2), ScaledComplex(2)), 0.0)
        self.assertAlmostEqual(relative_residual(1.0, 1.0 + 1e-9), 1e-9 / (1 + 1e-9), places=15)
        self.assertEqual(relative_residual(ScaledComplex.zero(), ScaledComplex.zero()), 0.0)
        self.assertAlmostEqual(relative_residual(ScaledComplex.from_log(900), ScaledComplex.zero()), 1.0)

    def test_scaled_product(self):
        values = [ScaledComplex.from_log(400.0 + 0.1j) for _ in range(5)]
        product = scaled_product(values)
        self.assertAlmostEqual(product.log().real, 2000.0, places=9)
        self.assertAlmostEqual(cmath.phase(product.mantissa), 0.5, places=12)

    def test_scaled_det_matches_numpy(self):
        rng = np.random.default_rng(3)
        matrix = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        det = scaled_det([[ScaledComplex(v) for v in row] for row in matrix])
        expected = np.linalg.det(matrix)
        self.assertLess(abs(det.to_complex() - expected), 1e-12 * abs(expected))

    def test_scaled_det_with_huge_rows(self):
        rows = [[ScaledComplex.from_log(800), ScaledComplex.from_log(800) * 2],
                [ScaledComplex(3), ScaledComplex(4)]]
        det = scaled_det(rows)
        # exp(800) (4 - 6)
        self.assertAlmostEqual(det.log_abs(), 800 + math.log(2), places=9)
        self.assertLess(abs(abs(cmath.phase(det.mantissa)) - math.pi), 1e-12)

    def test_scaled_det_singular(self):
        self.assertLess(abs(scaled_det([[1, 2], [2, 4]]).to_complex()), 1e-12)
        self.assertTrue(scaled_det([[0, 0], [1, 1]]).is_zero)
        self.assertEqual(scaled_det([]).to_complex(), 1)


if __name__ == '__main__':
    """
    Run the tests with specified options.

    """
    unittest.main(
        verbosity=2)
