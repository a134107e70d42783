# Copyright (c) 2026, the thetaverify authors
# All rights reserved.
#
# Use of this source code is governed by the BSD 3-clause license found in
# the LICENSE file at the root of this repository.

"""
The prime form E(P, Q) and the half-differential h, trivialized against dx.

Values that are sections of powers of the canonical bundle travel as
TrivializedValue: a scaled number plus the dx-weight carried at every point it
depends on. Identities compare values only after both sides carry the same
weights.
"""

import cmath
import logging
import math
from fractions import Fraction

import numpy as np

from thetaverify.model.errors import (DiagonalEvaluation, HalfDiffVanishes,
                                      NoNonsingularOddCharacteristic, WeightLedgerMismatch)
from thetaverify.model.jacobian import abel_infinity, abel_map, riemann_vector, reference_magnitude
from thetaverify.model.scaled import ScaledComplex, as_scaled, scaled_det
from thetaverify.model.theta import characteristics, theta, theta_grad

logger = logging.getLogger(__name__)

HALF = Fraction(1, 2)
NONSINGULAR_THRESHOLD = 1e-6
VANISHING_HALF_DIFF = 1e-8


class TrivializedValue(object):
    """A ScaledComplex together with its dx-weight at every point."""

    __slots__ = ('value', 'weights')

    def __init__(self, value, weights=None):
        self.value = as_scaled(value)
        self.weights = {p: Fraction(w) for p, w in (weights or {}).items() if w != 0}

    def weight(self, point):
        return self.weights.get(point, Fraction(0))

    def _merge(self, other, sign):
        weights = dict(self.weights)
        for point, w in other.weights.items():
            weights[point] = weights.get(point, Fraction(0)) + sign * w
        return weights

    def __mul__(self, other):
        if not isinstance(other, TrivializedValue):
            return TrivializedValue(self.value * other, self.weights)
        return TrivializedValue(self.value * other.value, self._merge(other, 1))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, TrivializedValue):
            return TrivializedValue(self.value / other, self.weights)
        return TrivializedValue(self.value / other.value, self._merge(other, -1))

    def __neg__(self):
        return TrivializedValue(-self.value, self.weights)

    def __pow__(self, power):
        return TrivializedValue(self.value ** power, {p: w * power for p, w in self.weights.items()})

    def same_weights(self, other):
        points = set(self.weights) | set(other.weights)
        return all(self.weight(p) == other.weight(p) for p in points)

    def __repr__(self):
        return 'TrivializedValue({!r}, {})'.format(self.value, {repr(p): str(w) for p, w in self.weights.items()})


def require_same_weights(lhs, rhs, name):
    if not lhs.same_weights(rhs):
        raise WeightLedgerMismatch('{}: both sides carry different dx-weights'.format(name))


def trivialized_product(values):
    result = TrivializedValue(1)
    for value in values:
        result = result * value
    return result


def trivialized_det(rows):
    """
    Determinant of a matrix of TrivializedValues.

    Every permutation term must carry the same weights, which holds iff
    w_ij + w_00 = w_i0 + w_0j for all i, j; the common weight is that of the
    diagonal term.
    """
    size = len(rows)
    if size == 0:
        return TrivializedValue(1)
    for i in range(size):
        for j in range(size):
            if not (rows[i][j] * rows[0][0]).same_weights(rows[i][0] * rows[0][j]):
                raise WeightLedgerMismatch('Determinant entries ({}, {}) break the weight ledger'.format(i, j))
    diagonal = trivialized_product(rows[i][i] for i in range(size))
    value = scaled_det([[entry.value for entry in row] for row in rows])
    return TrivializedValue(value, diagonal.weights)


def odd_characteristic(period_data):
    """
    First odd characteristic, in lexicographic order, whose theta gradient at 0 is not negligible.

    :param PeriodData period_data: Periods of the curve.
    :return Characteristic: A nonsingular odd characteristic.
    """
    cache = period_data.cache('odd_characteristic')
    if 'delta' in cache:
        return cache['delta']
    typical = math.exp(reference_magnitude(period_data))
    zero = np.zeros(period_data.genus)
    for char in characteristics(period_data.genus):
        if not char.is_odd:
            continue
        gradient = theta_grad(zero, period_data.tau, char, tol=period_data.theta_tol)
        size = max(math.exp(g.log_abs()) if not g.is_zero else 0.0 for g in gradient)
        if size > NONSINGULAR_THRESHOLD * typical:
            logger.debug('Odd characteristic %s, |grad| = %.3e', char.label(), size)
            return cache.setdefault('delta', char)
    raise NoNonsingularOddCharacteristic('Every odd theta characteristic is singular at 0')


def _odd_gradient(period_data, delta):
    cache = period_data.cache('odd_gradient')
    if delta not in cache:
        gradient = theta_grad(np.zeros(period_data.genus), period_data.tau, delta, tol=period_data.theta_tol)
        cache.setdefault(delta, np.array([g.to_complex() for g in gradient]))
    return cache[delta]


def half_diff(curve, period_data, delta, point, sign_flip=1):
    """
    h(P) = sqrt(sum_i d_i theta[delta](0) omega_i(P)), weight 1/2 at P.

    The principal root is taken once per point and cached for the run.
    """
    assert not (point.is_branch or point.is_infinity), 'half_diff needs a finite regular point.'
    cache = period_data.cache('half_diff')
    key = (delta, point, sign_flip)
    if key not in cache:
        gradient = _odd_gradient(period_data, delta)
        omega = period_data.normalized_differentials(point)
        square = complex(gradient.dot(omega))
        if abs(square) < VANISHING_HALF_DIFF * np.linalg.norm(gradient) * np.linalg.norm(omega):
            raise HalfDiffVanishes('The odd theta differential vanishes at x = {}'.format(point.x))
        cache.setdefault(key, sign_flip * cmath.sqrt(square))
    return TrivializedValue(cache[key], {point: HALF})


def _ordered(p, q):
    return (p.x.real, p.x.imag, p.sheet) <= (q.x.real, q.x.imag, q.sheet)


class CurveContext(object):
    """
    Everything the identities need about one curve: periods, the Riemann
    vector, the odd characteristic and memoized Abel images and prime forms.

    `lifts` maps points to fixed Abel images that override path integration;
    a lift must be registered before the point is used.

    :param int sign_seed: When given, every half-differential is multiplied by
                          a pseudo-random sign fixed per point, which must not
                          change any verdict.
    """

    def __init__(self, curve, period_data, sign_seed=None):
        self.curve = curve
        self.period_data = period_data
        self.genus = curve.genus
        self.tau = period_data.tau
        self.theta_tol = period_data.theta_tol
        self.delta = odd_characteristic(period_data)
        self.riemann = riemann_vector(curve, period_data)
        self.K = self.riemann.vector
        self.sign_seed = sign_seed
        self.lifts = {}
        self._prime_forms = {}

    def abel(self, point):
        """Abel image; points with a registered analytic lift use it instead of a path."""
        if point in self.lifts:
            return self.lifts[point]
        if point.is_infinity:
            return abel_infinity(self.curve, self.period_data)
        return abel_map(self.curve, self.period_data, point)

    def theta(self, z, char=None):
        return theta(z, self.tau, char, tol=self.theta_tol)

    def _sign(self, point):
        if self.sign_seed is None:
            return 1
        rng = np.random.default_rng([self.sign_seed, abs(hash(point.x)) % 2 ** 32, point.sheet + 1])
        return 1 if rng.random() < 0.5 else -1

    def half_diff(self, point):
        return half_diff(self.curve, self.period_data, self.delta, point, self._sign(point))

    def prime_form(self, p, q):
        return prime_form(self, p, q)


def prime_form(context, p, q):
    """
    E(P, Q) = theta[delta](A(Q) - A(P)) / (h(P) h(Q)), weight -1/2 at P and at Q.

    Pairs are evaluated in a canonical order and the other order is the exact
    negative, so E(P, Q) = -E(Q, P) holds bit for bit.

    :param CurveContext context: Curve data.
    :param CurvePoint   p:       Finite regular point.
    :param CurvePoint   q:       Finite regular point.
    :return TrivializedValue: The prime form.
    """
    if p == q:
        return TrivializedValue(ScaledComplex.zero(), {p: -1})
    if not _ordered(p, q):
        return -prime_form(context, q, p)
    key = (p, q)
    if key not in context._prime_forms:
        argument = context.abel(q) - context.abel(p)
        numerator = context.theta(argument, context.delta)
        value = TrivializedValue(numerator) / (context.half_diff(p) * context.half_diff(q))
        context._prime_forms.setdefault(key, value)
    return context._prime_forms[key]


def prime_form_limit(context, p, offset):
    """
    theta[delta](A(Q) - A(P)) / (x(Q) - x(P)) for Q at x(P) + offset on the sheet continued from P.

    Tends to h(P)^2 as offset -> 0.
    """
    q = nearby_point(context.curve, p, offset)
    if q == p:
        raise DiagonalEvaluation('Offset too small to separate the points')
    numerator = context.theta(context.abel(q) - context.abel(p), context.delta)
    return numerator / offset


def _continued_y(curve, p, offset):
    """y at x(P) + offset on the branch through P."""
    y_p = curve.y(p)
    candidate = cmath.sqrt(complex(curve.f(p.x + offset)))
    return candidate if (candidate * y_p.conjugate()).real >= 0 else -candidate


def nearby_point(curve, p, offset):
    """The point over x(P) + offset on the branch of sqrt(f) through P."""
    return curve.point_from_y(p.x + offset, _continued_y(curve, p, offset))
