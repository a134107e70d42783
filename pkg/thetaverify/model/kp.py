# Copyright (c) 2026, the thetaverify authors
# All rights reserved.
#
# Use of this source code is governed by the BSD 3-clause license found in
# the LICENSE file at the root of this repository.

"""
Determinant identity for bundles M = O(n infinity)^r on odd hyperelliptic models.

theta_r(M(-sum y_j)) prod_{i<j} E(y_i, y_j)^r = lambda det(s_a(y_j)), where s_a
runs over a basis of sections. Each point carries its own trivialization
factor c(y) on the left, so the raw quotient F(Y) = lhs / rhs equals
lambda prod_j c(y_j). A reference configuration q_1..q_m removes the per-point
factors:

    F(Y) F(Q)^(m-1) / prod_j F(y_j, q_2, ..., q_m)

is independent of Y exactly when the identity holds.
"""

import logging
import time
from dataclasses import dataclass

import numpy as np

from thetaverify.model.curve import INFINITY
from thetaverify.model.errors import (DegreeTooSmall, DenominatorOnThetaDivisor, NonSquareBlocks,
                                      WeightLedgerMismatch)
from thetaverify.model.identities import FAIL, PASS, IdentityReport, describe_point
from thetaverify.model.jacobian import require_off_divisor, sample_regular_configuration
from thetaverify.model.primeform import TrivializedValue, trivialized_product
from thetaverify.model.scaled import ScaledComplex, scaled_det

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SectionBasis(object):
    """
    Monomials spanning H^0(O(n infinity)): x^a with 2a <= n, then x^b y with 2b + 2g + 1 <= n.

    `transform` is an optional m x m matrix applied to the monomials (row a of
    the result is sum_b transform[a][b] monomial_b).
    """

    genus: int
    degree: int
    x_powers: tuple
    y_powers: tuple
    transform: tuple = None

    @property
    def count(self):
        return len(self.x_powers) + len(self.y_powers)

    def descriptors(self):
        names = ['1' if a == 0 else ('x' if a == 1 else 'x^{}'.format(a)) for a in self.x_powers]
        names += ['y' if b == 0 else ('x y' if b == 1 else 'x^{} y'.format(b)) for b in self.y_powers]
        return names

    def with_transform(self, matrix):
        matrix = np.asarray(matrix, dtype=complex)
        assert matrix.shape == (self.count, self.count), 'Basis change must be square.'
        return SectionBasis(self.genus, self.degree, self.x_powers, self.y_powers,
                            tuple(tuple(row) for row in matrix))

    def evaluate(self, curve, point):
        """Values of the sections at a finite point (dx-weight 0)."""
        y = curve.y(point)
        values = [point.x ** a for a in self.x_powers] + [point.x ** b * y for b in self.y_powers]
        values = np.array(values, dtype=complex)
        if self.transform is not None:
            values = np.array(self.transform, dtype=complex).dot(values)
        return values


def section_basis(curve, n):
    """
    The monomial basis of sections of O(n infinity).

    :param HyperellipticCurve curve: Odd-degree model.
    :param int                n:     Pole order at infinity, at least 2g-1.
    :return SectionBasis: n - g + 1 monomials.
    """
    g = curve.genus
    if n < 2 * g - 1:
        raise DegreeTooSmall('n = {} is below 2g - 1 = {}'.format(n, 2 * g - 1))
    x_powers = tuple(a for a in range(n // 2 + 1))
    y_powers = tuple(b for b in range(n) if 2 * b + 2 * g + 1 <= n)
    basis = SectionBasis(g, n, x_powers, y_powers)
    assert basis.count == n - g + 1, 'Riemann-Roch count mismatch.'
    return basis


def kp_matrix(curve, bases, points):
    """
    The rm x rm matrix (s_i(y_j)) for M = O(n infinity)^r.

    Row (k, a) is section a of summand k; column (j, l) is component l at
    point y_j. Entries vanish unless k = l.

    :return list: Square list of lists of ScaledComplex.
    """
    degrees = {basis.degree for basis in bases}
    m = len(points)
    if len(degrees) != 1 or any(basis.count != m for basis in bases):
        raise NonSquareBlocks('All summands need the same degree n with n - g + 1 = m points')
    r = len(bases)
    values = [[basis.evaluate(curve, point) for point in points] for basis in bases]
    zero = ScaledComplex.zero()
    return [[ScaledComplex(values[k][j][a]) if k == l else zero
             for j in range(m) for l in range(r)]
            for k in range(r) for a in range(m)]


def block_determinants(curve, bases, points):
    """The r determinants det(s_a^k(y_j)) of the diagonal blocks."""
    return [scaled_det([[ScaledComplex(v) for v in basis.evaluate(curve, point)] for point in points])
            for basis in bases]


class KPQuotient(object):
    """Evaluates F(Y) = lhs / rhs for the split bundle O(n infinity)^r."""

    def __init__(self, context, r, n, bases=None):
        self.context = context
        self.r = r
        self.n = n
        self.m = n - context.genus + 1
        self.bases = bases or [section_basis(context.curve, n)] * r
        self.base_argument = -context.K - n * context.abel(INFINITY)

    def argument(self, points):
        """-K - n A(infinity) + sum A(y_j), the theta argument of every summand of M(-sum y_j)."""
        return self.base_argument + sum((self.context.abel(p) for p in points),
                                        np.zeros(self.context.genus, dtype=complex))

    def theta_side(self, points):
        """theta(M(-sum y_j)) prod_{i<j} E(y_i, y_j)^r; identical summands give an r-th power."""
        context = self.context
        value = context.theta(self.argument(points))
        pairs = trivialized_product(context.prime_form(points[i], points[j])
                                    for i in range(len(points)) for j in range(i + 1, len(points)))
        return (TrivializedValue(value) * pairs) ** self.r

    def section_side(self, points):
        return scaled_det(kp_matrix(self.context.curve, self.bases, points))

    def quotient(self, points):
        """Raw F(Y), a TrivializedValue; theta(M(-sum y_j)) must be off the divisor."""
        require_off_divisor(self.argument(points), self.context.period_data)
        return self.theta_side(points) / self.section_side(points)

    def normalized(self, points, reference):
        """F(Y) F(Q)^(m-1) / prod_j F(y_j, q_2..q_m), which carries no weight at any y_j."""
        m = self.m
        numerator = self.quotient(points) * self.quotient(reference) ** (m - 1)
        denominator = trivialized_product(self.quotient([p] + list(reference[1:])) for p in points)
        result = numerator / denominator
        if any(result.weight(p) != 0 for p in points):
            raise WeightLedgerMismatch('Gauge normalization left a weight at a sample point')
        return result.value


def check_kp_identity(context, r, n, sample_count, seed, tolerance, bases=None):
    """
    Constancy of the gauge-normalized lambda over sample_count point sets.

    :param CurveContext context:      Curve data.
    :param int          r:            Number of summands O(n infinity).
    :param int          n:            Pole order; m = n - g + 1 points per sample.
    :param int          sample_count: Independent point sets.
    :param int          seed:         Sampling seed, an int or a list of ints.
    :param float        tolerance:    Largest accepted |lambda_s / lambda_1 - 1|.
    :param list         bases:        Optional r SectionBases (default: monomials).
    :return IdentityReport: lhs is the most deviating lambda, rhs the first.
    """
    started = time.perf_counter()
    section_basis(context.curve, n)
    stream = list(seed) if isinstance(seed, (list, tuple)) else [seed]
    kp = KPQuotient(context, r, n, bases)
    m = kp.m
    gap = 1e-2 * context.curve.scale

    reference = sample_regular_configuration(context.curve, m, stream + [0],
                                             lambda points: kp.quotient(points[:m]))[:m]

    def constraint(points):
        ys = points[:m]
        if any(abs(p.x - q.x) <= gap for p in ys for q in reference):
            raise DenominatorOnThetaDivisor('Sample collides with the reference configuration')
        kp.normalized(ys, reference)

    lambdas = []
    configurations = []
    for s in range(sample_count):
        points = sample_regular_configuration(context.curve, m, stream + [s + 1], constraint)[:m]
        configurations.append(points)
        lambdas.append(kp.normalized(points, reference))

    first = lambdas[0]
    deviations = [abs((value / first).to_complex() - 1) for value in lambdas]
    worst = int(np.argmax(deviations))
    residual = deviations[worst]
    logger.debug('KP r=%d n=%d: worst lambda deviation %.3e', r, n, residual)
    return IdentityReport('kp_identity', context.curve.digest(), seed,
                          [describe_point(p) for p in configurations[worst]],
                          lambdas[worst], first, residual, tolerance,
                          PASS if residual <= tolerance else FAIL, time.perf_counter() - started,
                          {'rank': r, 'n': n, 'm': m, 'samples': sample_count,
                           'deviations': deviations,
                           'reference': [describe_point(p) for p in reference]})
