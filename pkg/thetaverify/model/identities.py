# Copyright (c) 2026, the thetaverify authors
# All rights reserved.
#
# Use of this source code is governed by the BSD 3-clause license found in
# the LICENSE file at the root of this repository.

"""
Theta ratios of split bundles, the Szego kernel and the addition-formula checks.

A split bundle M = L_1 + ... + L_r is given by twist vectors t_k; the theta
argument of L_k tensor F is e_k = -(K + t_k + f). Ratios
theta(M(D)) / theta(M) are products of the abelian ratios theta(e_k - A(D)) /
theta(e_k), which is all that is computable for non-abelian theta functions.

Both sides of the addition formula are divided by prod_{i != j} E(x_i, y_j)^rbar
before comparison; after that normalization both sides tend to 1 as every x_i
approaches y_i.
"""

import math
import time
from dataclasses import dataclass, field

import numpy as np

from thetaverify.model.errors import DiagonalEvaluation, NotImplementedStratum
from thetaverify.model.jacobian import JacobianPoint, require_off_divisor
from thetaverify.model.primeform import (TrivializedValue, nearby_point, require_same_weights,
                                         trivialized_det, trivialized_product)
from thetaverify.model.scaled import ScaledComplex, relative_residual, scaled_product

PASS = 'pass'
FAIL = 'fail'
INDETERMINATE = 'indeterminate'


@dataclass(frozen=True)
class SplitBundle(object):
    """A decomposable bundle as an ordered tuple of line-bundle summands (JacobianPoint twists)."""

    summands: tuple

    @classmethod
    def random(cls, genus, rank, rng, degree=0):
        """Random twists; at rank 1 the summand has the given degree, at higher rank every summand has degree 0."""
        degrees = [degree] if rank == 1 else [0] * rank
        twists = []
        for d in degrees:
            vec = rng.uniform(-0.5, 0.5, genus) + 1j * rng.uniform(-0.5, 0.5, genus)
            twists.append(JacobianPoint.of(vec, d))
        return cls(tuple(twists))

    @property
    def rank(self):
        return len(self.summands)

    @property
    def degree(self):
        return sum(s.degree for s in self.summands)

    @property
    def rbar(self):
        """r^2 / gcd(r, d)."""
        return self.rank ** 2 // math.gcd(self.rank, self.degree)

    def summand(self, k):
        return SplitBundle((self.summands[k],))

    def validate(self):
        if self.rank != 1 and any(s.degree != 0 for s in self.summands):
            raise NotImplementedStratum('Split bundles of rank > 1 are handled in degree 0 only')


def indecomposable_bundle(rank, degree):
    """Stable indecomposable bundles have no analytic theta expression; always raises."""
    raise NotImplementedStratum('No analytic expression is known for theta of a stable bundle '
                                'of rank {} and degree {}'.format(rank, degree))


def _half_period(char, tau):
    if char is None:
        return 0
    return tau.dot(char.a_vector()) + char.b_vector()


class BundleTheta(object):
    """Theta data of a split bundle: the arguments e_k and their checked denominators theta(e_k)."""

    def __init__(self, context, bundle, f_twist=None, eta=None):
        bundle.validate()
        self.context = context
        self.bundle = bundle
        self.eta = eta
        shift = np.zeros(context.genus) if f_twist is None else f_twist.vector
        self.arguments = [-(context.K + s.vector + shift) for s in bundle.summands]
        self.denominators = []
        offset = _half_period(eta, context.tau.tau)
        for e in self.arguments:
            value = context.theta(e, eta)
            require_off_divisor(e + offset, context.period_data, value=None if eta is not None else value)
            self.denominators.append(value)

    def summand_ratio(self, k, shift):
        """theta(e_k - shift) / theta(e_k)."""
        return self.context.theta(self.arguments[k] - shift, self.eta) / self.denominators[k]

    def ratio(self, shift):
        return scaled_product(self.summand_ratio(k, shift) for k in range(self.bundle.rank))


def theta_ratio(context, bundle, divisor, f_twist=None, eta=None):
    """
    theta(M(D)) / theta(M) for a split bundle and a degree-0 divisor.

    :param CurveContext   context: Curve data.
    :param SplitBundle    bundle:  M.
    :param object         divisor: A Divisor of degree 0, or its Abel image as a vector.
    :param JacobianPoint  f_twist: Translation by A(F); zero by default.
    :param Characteristic eta:     Characteristic of the theta function, zero by default.
    :return ScaledComplex: The ratio.
    """
    if hasattr(divisor, 'abel'):
        assert divisor.degree == 0, 'theta_ratio needs a degree-0 divisor.'
        shift = divisor.abel(context.period_data).vector
    else:
        shift = np.asarray(divisor, dtype=complex)
    if not np.any(shift):
        BundleTheta(context, bundle, f_twist, eta)
        return ScaledComplex.one()
    return BundleTheta(context, bundle, f_twist, eta).ratio(shift)


def _szego_entry(bundle_theta, k, p, q):
    context = bundle_theta.context
    if p == q:
        raise DiagonalEvaluation('The Szego kernel has a pole on the diagonal')
    shift = context.abel(p) - context.abel(q)
    return TrivializedValue(bundle_theta.summand_ratio(k, shift)) / context.prime_form(p, q)


def szego_kernel(context, bundle, p, q, f_twist=None, eta=None, bundle_theta=None):
    """
    S_M(P, Q) as an r x r matrix: diag(theta(e_k + A(Q) - A(P)) / (theta(e_k) E(P, Q))).

    Off-diagonal entries are zeros carrying the diagonal's weights.
    """
    bundle_theta = bundle_theta or BundleTheta(context, bundle, f_twist, eta)
    r = bundle.rank
    diagonal = [_szego_entry(bundle_theta, k, p, q) for k in range(r)]
    zero = TrivializedValue(ScaledComplex.zero(), diagonal[0].weights)
    return [[diagonal[k] if k == l else zero for l in range(r)] for k in range(r)]


def szego_residue(context, bundle, p, offsets, k=0):
    """(x(Q) - x(P)) S_k(P, Q) for Q at each offset from P; tends to 1."""
    bundle_theta = BundleTheta(context, bundle)
    values = []
    for offset in offsets:
        q = nearby_point(context.curve, p, offset)
        entry = _szego_entry(bundle_theta, k, p, q)
        values.append((entry.value * (q.x - p.x)).to_complex())
    return values


def describe_point(point):
    if point.is_infinity:
        return 'infinity'
    return {'x': [point.x.real, point.x.imag], 'sheet': point.sheet}


@dataclass
class IdentityReport(object):
    """Outcome of one identity evaluation."""

    identity: str
    curve_digest: str
    seed: object
    samples: list
    lhs: ScaledComplex
    rhs: ScaledComplex
    residual: float
    tolerance: float
    verdict: str
    wall_time: float = 0.0
    details: dict = field(default_factory=dict)
    error: str = None

    @classmethod
    def compare(cls, identity, context, seed, samples, lhs, rhs, tolerance, started, details=None):
        residual = relative_residual(lhs, rhs)
        verdict = PASS if residual <= tolerance else FAIL
        return cls(identity, context.curve.digest(), seed, [describe_point(p) for p in samples],
                   lhs, rhs, residual, tolerance, verdict, time.perf_counter() - started, details or {})

    @property
    def passed(self):
        return self.verdict == PASS

    def to_json(self):
        document = {
            'identity': self.identity,
            'curve_digest': self.curve_digest,
            'seed': self.seed,
            'samples': self.samples,
            'lhs': self.lhs.to_json() if self.lhs is not None else None,
            'rhs': self.rhs.to_json() if self.rhs is not None else None,
            'residual': self.residual,
            'tolerance': self.tolerance,
            'verdict': self.verdict,
            'wall_time': self.wall_time,
        }
        if self.details:
            document['details'] = self.details
        if self.error:
            document['error'] = self.error
        return document


def split_samples(samples):
    assert len(samples) % 2 == 0 and samples, 'Expected 2m sample points.'
    m = len(samples) // 2
    return list(samples[:m]), list(samples[m:])


def total_shift(context, xs, ys):
    return sum((context.abel(x) - context.abel(y) for x, y in zip(xs, ys)),
               np.zeros(context.genus, dtype=complex))


def pair_products(context, xs, ys, rbar):
    """prod_{i<j} (E(x_i, x_j) E(y_j, y_i))^rbar."""
    m = len(xs)
    factors = [(context.prime_form(xs[i], xs[j]) * context.prime_form(ys[j], ys[i])) ** rbar
               for i in range(m) for j in range(i + 1, m)]
    return trivialized_product(factors)


def _left_side(context, bundle_theta, xs, ys):
    rbar = bundle_theta.bundle.rbar
    ratio = bundle_theta.ratio(total_shift(context, xs, ys))
    return TrivializedValue(ratio) * pair_products(context, xs, ys, rbar)


def fay_normalizer(context, xs, ys, rbar):
    m = len(xs)
    return trivialized_product(context.prime_form(xs[i], ys[j]) ** rbar
                               for i in range(m) for j in range(m) if i != j)


def cross_product(context, xs, ys, rbar):
    m = len(xs)
    return trivialized_product(context.prime_form(xs[i], ys[j]) ** rbar for i in range(m) for j in range(m))


def summand_determinants(context, bundle_theta, xs, ys):
    """det[theta(e_k - A(x_i) + A(y_j)) / (theta(e_k) E(x_i, y_j))] for every summand k."""
    m = len(xs)
    results = []
    for k in range(bundle_theta.bundle.rank):
        rows = [[_szego_entry(bundle_theta, k, xs[i], ys[j]) for j in range(m)] for i in range(m)]
        results.append(trivialized_det(rows))
    return results


def block_szego_determinant(context, bundle_theta, xs, ys):
    """det of the rm x rm matrix of r x r Szego blocks S_M(x_i, y_j)."""
    m = len(xs)
    r = bundle_theta.bundle.rank
    blocks = [[szego_kernel(context, bundle_theta.bundle, xs[i], ys[j], bundle_theta=bundle_theta)
               for j in range(m)] for i in range(m)]
    rows = [[blocks[i][j][k][l] for j in range(m) for l in range(r)] for i in range(m) for k in range(r)]
    return trivialized_det(rows)


def _finish(identity, context, bundle_theta, samples, lhs, rhs, tolerance, started, seed, normalize=True):
    require_same_weights(lhs, rhs, identity)
    if normalize:
        xs, ys = split_samples(samples)
        norm = fay_normalizer(context, xs, ys, bundle_theta.bundle.rbar)
        lhs_value, rhs_value = lhs.value / norm.value, rhs.value / norm.value
    else:
        lhs_value, rhs_value = lhs.value, rhs.value
    details = {'rank': bundle_theta.bundle.rank, 'm': len(samples) // 2}
    return IdentityReport.compare(identity, context, seed, samples, lhs_value, rhs_value, tolerance, started, details)


def check_addition_formula(context, bundle, samples, tolerance, f_twist=None, eta=None, seed=None):
    """
    theta(M(sum x_i - y_i))/theta(M) prod_{i<j} (E(x_i,x_j) E(y_j,y_i))^rbar
      = prod_{i,j} E(x_i,y_j)^rbar prod_k det[theta(e_k - A(x_i) + A(y_j)) / (theta(e_k) E(x_i,y_j))].

    For rank one the product over k is the single determinant of the
    addition formula; for split rank r it is the determinant of the
    block-diagonal rm x rm matrix.

    :param CurveContext context:   Curve data.
    :param SplitBundle  bundle:    M.
    :param list         samples:   x_1..x_m, y_1..y_m.
    :param float        tolerance: Largest accepted relative residual.
    :return IdentityReport: The comparison.
    """
    started = time.perf_counter()
    bundle_theta = BundleTheta(context, bundle, f_twist, eta)
    xs, ys = split_samples(samples)
    rbar = bundle.rbar
    lhs = _left_side(context, bundle_theta, xs, ys)
    rhs = cross_product(context, xs, ys, rbar) * trivialized_product(
        summand_determinants(context, bundle_theta, xs, ys))
    return _finish('addition_formula', context, bundle_theta, samples, lhs, rhs, tolerance, started, seed)


def check_szego_identity(context, bundle, samples, tolerance, f_twist=None, eta=None, seed=None):
    """Left side of the addition formula against prod E(x_i,y_j)^rbar det S_M(x, y)."""
    started = time.perf_counter()
    bundle_theta = BundleTheta(context, bundle, f_twist, eta)
    xs, ys = split_samples(samples)
    lhs = _left_side(context, bundle_theta, xs, ys)
    rhs = cross_product(context, xs, ys, bundle.rbar) * block_szego_determinant(context, bundle_theta, xs, ys)
    return _finish('szego_identity', context, bundle_theta, samples, lhs, rhs, tolerance, started, seed)


def theta_side_determinant(context, bundle_theta, xs, ys):
    """det[theta(M(x_i - y_j)) / (theta(M) E(x_i, y_j)^rbar)], built from full-bundle theta ratios."""
    m = len(xs)
    rbar = bundle_theta.bundle.rbar
    abel_x = [context.abel(x) for x in xs]
    abel_y = [context.abel(y) for y in ys]
    rows = []
    for i in range(m):
        row = []
        for j in range(m):
            if xs[i] == ys[j]:
                raise DiagonalEvaluation('x_{} coincides with y_{}'.format(i, j))
            ratio = bundle_theta.ratio(abel_x[i] - abel_y[j])
            row.append(TrivializedValue(ratio) / context.prime_form(xs[i], ys[j]) ** rbar)
        rows.append(row)
    return trivialized_det(rows)


def check_det_equivalence(context, bundle, samples, tolerance, f_twist=None, eta=None, seed=None):
    """
    Theta-side determinants against the block determinant det S_M(x, y).

    At rank one the left side is det[theta(M(x_i - y_j)) / (theta(M) E(x_i, y_j))].
    For a split bundle it is the product over summands of the same
    determinant for each L_k, each evaluated from its own theta ratios. The
    entrywise reading det[theta(M(x_i - y_j)) / (theta(M) E(x_i, y_j)^rbar)]
    differs from det S_M once r > 1 and m > 1; its residual is kept in
    details['entrywise_residual'].
    """
    started = time.perf_counter()
    bundle_theta = BundleTheta(context, bundle, f_twist, eta)
    xs, ys = split_samples(samples)
    rhs = block_szego_determinant(context, bundle_theta, xs, ys)
    if bundle.rank == 1:
        lhs = theta_side_determinant(context, bundle_theta, xs, ys)
        return _finish('det_equivalence', context, bundle_theta, samples, lhs, rhs, tolerance, started, seed,
                       normalize=False)
    lhs = trivialized_product(
        theta_side_determinant(context, BundleTheta(context, bundle.summand(k), f_twist, eta), xs, ys)
        for k in range(bundle.rank))
    report = _finish('det_equivalence', context, bundle_theta, samples, lhs, rhs, tolerance, started, seed,
                     normalize=False)
    entrywise = theta_side_determinant(context, bundle_theta, xs, ys)
    report.details['entrywise_residual'] = relative_residual(entrywise.value, rhs.value)
    return report
