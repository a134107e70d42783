# Copyright (c) 2026, the thetaverify authors
# All rights reserved.
#
# Use of this source code is governed by the BSD 3-clause license found in
# the LICENSE file at the root of this repository.

"""
Unramified double covers of hyperelliptic curves.

For f = f1 f2 with f1 = c (x - alpha)(x - beta) and deg f2 = 2g - 1, the curve
z^2 = f1(x), w^2 = f2(x) covers y^2 = f(x) (y = z w) without ramification and
has genus 2g - 1. The conic z^2 = f1 is parametrized by u^2 = (x - alpha)/(x - beta):

    x = (alpha - beta u^2)/(1 - u^2),   z = sqrt(c) (alpha - beta) u / (1 - u^2),

and W = w (1 - u^2)^g satisfies W^2 = F(u) = f2(x(u)) (1 - u^2)^(2g). Sending
the root u = 1 to infinity with u = 1 + 1/v gives the odd model V^2 = G(v),
V = W v^(2g), on which all cover computations run. The deck involution
(x, z, w) -> (x, -z, -w) is v -> -v/(2v + 1), V -> -V/(2v + 1)^(2g).
"""

import cmath
import logging
import time
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as P

from thetaverify.model.curve import build_curve, period_matrix
from thetaverify.model.errors import (DenominatorOnThetaDivisor, HalfDiffVanishes, InconsistentCover,
                                      NotEvenPartition, PathDegenerate, SamplingExhausted,
                                      UnsupportedSplit)
from thetaverify.model.identities import (FAIL, PASS, BundleTheta, IdentityReport, SplitBundle, cross_product,
                                          describe_point, fay_normalizer, pair_products,
                                          split_samples, summand_determinants)
from thetaverify.model.jacobian import (JacobianPoint, lattice_components, lattice_distance, nearest_lattice_point,
                                        require_off_divisor, sample_points)
from thetaverify.model.primeform import (CurveContext, TrivializedValue, require_same_weights,
                                         trivialized_product)
from thetaverify.model.scaled import ScaledComplex
from thetaverify.model.theta import shift_log_factor, theta_with_grad

logger = logging.getLogger(__name__)

FIT_TOLERANCE = 1e-7
TORSION_TOLERANCE = 1e-7
DECK_TOLERANCE = 1e-6
MAX_REJECTIONS = 1000


@dataclass(frozen=True)
class TorsionBundle(object):
    """The 2-torsion class L = A(alpha) - A(beta) defining the cover, with its factorization."""

    L: JacobianPoint
    f1: tuple
    f2: tuple


def _polynomial_from_pairs(coeffs):
    return np.array([complex(c) for c in coeffs], dtype=complex)


def _cover_polynomial(f2, alpha, beta, genus):
    """Ascending coefficients of G(v) for the odd model of the cover."""
    top = 2 * genus - 1
    numerator = np.array([alpha, 0, -beta], dtype=complex)
    denominator = np.array([1, 0, -1], dtype=complex)
    p = np.zeros(1, dtype=complex)
    for j, coefficient in enumerate(f2):
        term = coefficient * P.polymul(P.polypow(numerator, j), P.polypow(denominator, top - j))
        p = P.polyadd(p, term)
    f = P.polymul(p, denominator)
    degree = 4 * genus
    f = np.concatenate([f, np.zeros(degree + 1 - len(f))])[:degree + 1]

    g = np.zeros(degree + 1, dtype=complex)
    for k in range(degree + 1):
        shifted = np.concatenate([np.zeros(degree - k), P.polypow(np.array([1, 1], dtype=complex), k)])
        g = P.polyadd(g, f[k] * shifted)
    g = np.concatenate([g, np.zeros(degree + 1 - len(g))])
    assert abs(g[degree]) <= 1e-9 * max(1.0, np.max(np.abs(g))), 'u = 1 must be a root of F.'
    return g[:degree]


def _fit(inputs, outputs):
    """Least-squares matrix X with outputs ~ X inputs (columns are samples), and the relative residual."""
    solution, _, _, _ = np.linalg.lstsq(inputs.T, outputs.T, rcond=None)
    matrix = solution.T
    residual = np.max(np.abs(matrix.dot(inputs) - outputs)) / max(1e-300, np.max(np.abs(outputs)))
    return matrix, residual


class DoubleCover(object):
    """
    The cover together with everything the identity checks need.

    :ivar array R:           g x g~ norm matrix, A(gamma P) = R A~(P) + const.
    :ivar array S:           g~ x g pullback matrix, A~(P) + A~(sigma P) = S A(gamma P) + c0.
    :ivar array deck_matrix: g~ x g~ action of sigma on normalized cover differentials.
    :ivar array kappa:       A~(sigma b~_1).
    :ivar array quadratic:   g x g matrix Q of the theta gauge exp(l z + z Q z / 2).
    """

    def __init__(self, base_context, f1, f2, seed=0):
        self.base_context = base_context
        self.base = base_context.curve
        self.f1 = f1
        self.f2 = f2
        self.genus = self.base.genus
        roots = sorted(P.polyroots(f1), key=lambda r: (r.real, r.imag))
        self.beta, self.alpha = complex(roots[0]), complex(roots[1])
        self.leading = complex(f1[-1])
        self.sqrt_leading = cmath.sqrt(self.leading)

        base_pd = base_context.period_data
        self.curve = build_curve(_cover_polynomial(f2, self.alpha, self.beta, self.genus))
        self.cover_genus = self.curve.genus
        self.period_data = period_matrix(self.curve, base_pd.tol, base_pd.theta_tol)
        self.context = CurveContext(self.curve, self.period_data)

        self.torsion = self._torsion()
        self._fit_matrices(seed)
        self.kappa = self.context.abel(self.deck(self.curve.base_point))
        base_lift = self.lift(self.base.base_point)
        self.register_deck_lift(base_lift)
        self.c0 = self.context.abel(base_lift) + self.context.abel(self.deck(base_lift))
        self.quadratic = self._quadratic_gauge()

    # Coordinates.

    def _u(self, v):
        return 1 + 1 / v

    def project(self, point):
        """gamma: cover point (v, V) -> base point (x, y = z w)."""
        v = point.x
        if abs(v) <= 1e-12 or abs(2 * v + 1) <= 1e-12:
            raise PathDegenerate('Cover point over a base branch point or infinity: v = {}'.format(v))
        u = self._u(v)
        x = (self.alpha - self.beta * u * u) / (1 - u * u)
        z = self.sqrt_leading * (self.alpha - self.beta) * u / (1 - u * u)
        w = self.curve.y(point) / v ** (2 * self.genus) / (1 - u * u) ** self.genus
        return self.base.point_from_y(x, z * w)

    def lift(self, base_point):
        """The lift of a base point with u the principal root of (x - alpha)/(x - beta)."""
        x = base_point.x
        g = self.genus
        if abs(x - self.beta) <= 1e-12 * self.base.scale:
            root = cmath.sqrt(complex(P.polyval(0, self.curve.f_coeffs)))
            return self.curve.point_from_y(0j, root)
        u = cmath.sqrt((x - self.alpha) / (x - self.beta))
        v = 1 / (u - 1)
        z = self.sqrt_leading * (self.alpha - self.beta) * u / (1 - u * u)
        if abs(z) <= 1e-14 * self.base.scale:
            w = cmath.sqrt(complex(P.polyval(x, self.f2)))
        else:
            w = self.base.y(base_point) / z
        V = w * (1 - u * u) ** g * v ** (2 * g)
        if base_point.is_branch and abs(V) <= 1e-10 * self.curve.scale ** (2 * g):
            return self._nearest_branch(v)
        return self.curve.point_from_y(v, V)

    def _nearest_branch(self, v):
        nearest = min(self.curve.branch_points, key=lambda b: abs(b - v))
        assert abs(nearest - v) <= 1e-8 * self.curve.scale, 'Expected a cover branch point near v = {}'.format(v)
        return self.curve.point(nearest)

    def deck(self, point):
        """sigma(v, V) = (-v/(2v+1), -V/(2v+1)^(2g))."""
        v = point.x
        denominator = 2 * v + 1
        image = -v / denominator
        if point.is_branch:
            return self._nearest_branch(image)
        V = -self.curve.y(point) / denominator ** (2 * self.genus)
        return self.curve.point_from_y(image, V)

    def dx_dv(self, point):
        v = point.x
        u = self._u(v)
        return 2 * u * (self.alpha - self.beta) / (1 - u * u) ** 2 * (-1 / (v * v))

    def deck_derivative(self, point):
        """d(sigma v)/dv."""
        return -1 / (2 * point.x + 1) ** 2

    def pulled_back_differentials(self, point):
        """Normalized base differentials at gamma P, against dv."""
        return self.base_context.period_data.normalized_differentials(self.project(point)) * self.dx_dv(point)

    def register_deck_lift(self, point):
        """
        Integrate A~(sigma P) on the cover and register the lattice translate equal to deck_matrix A~(P) + kappa.

        That translate is the integral along the sigma-image of the path to P.
        """
        image = self.deck(point)
        if image in self.context.lifts:
            return image
        integrated = self.context.abel(image)
        offset = self.deck_matrix.dot(self.context.abel(point)) + self.kappa - integrated
        if lattice_distance(offset, self.period_data.tau) > DECK_TOLERANCE:
            raise InconsistentCover('A~(sigma P) is off deck_matrix A~(P) + kappa by {:.3e} modulo periods'
                                    .format(lattice_distance(offset, self.period_data.tau)))
        m, n = nearest_lattice_point(offset, self.period_data.tau.tau)
        self.context.lifts[image] = integrated + m + self.period_data.tau.tau.dot(n)
        return image

    def pullback_abel(self, xs, ys):
        """A~(gamma* Z) = sum A~(x~_i) + A~(sigma x~_i) - A~(y~_i) - A~(sigma y~_i)."""
        total = np.zeros(self.cover_genus, dtype=complex)
        for x, y in zip(xs, ys):
            total += self.context.abel(x) + self.context.abel(self.register_deck_lift(x))
            total -= self.context.abel(y) + self.context.abel(self.register_deck_lift(y))
        return total

    # Construction steps.

    def _torsion(self):
        base = self.base_context
        alpha_point = self.base.point(self.alpha)
        beta_point = self.base.point(self.beta)
        assert alpha_point.is_branch and beta_point.is_branch, 'Roots of f1 must be branch points.'
        L = base.abel(alpha_point) - base.abel(beta_point)
        tau = base.period_data.tau
        if lattice_distance(2 * L, tau) > TORSION_TOLERANCE:
            raise InconsistentCover('A(alpha) - A(beta) is not 2-torsion')
        if lattice_distance(L, tau) < TORSION_TOLERANCE:
            raise InconsistentCover('The torsion class defining the cover is trivial')
        return TorsionBundle(JacobianPoint.of(L, 0), tuple(self.f1), tuple(self.f2))

    def regular_cover_point(self, point):
        """Raise PathDegenerate unless gamma P is a regular base point."""
        image = self.project(point)
        if self.base.distance_to_branch_points(image.x) <= 1e-2 * self.base.scale:
            raise PathDegenerate('Cover point projects too close to a base branch point')
        return image

    def _fit_matrices(self, seed):
        rng = np.random.default_rng([seed, 7])
        count = 3 * self.cover_genus + 6
        points = []
        for _ in range(MAX_REJECTIONS):
            if len(points) == count:
                break
            candidate = sample_points(self.curve, rng, 1, existing=points)[0]
            try:
                self.regular_cover_point(candidate)
                self.regular_cover_point(self.deck(candidate))
            except PathDegenerate:
                continue
            points.append(candidate)
        if len(points) < count:
            raise SamplingExhausted('Not enough regular cover points to fit the pullback matrices')

        normalized = self.period_data.normalized_differentials
        cover = np.array([normalized(p) for p in points]).T
        cover_deck = np.array([normalized(self.deck(p)) * self.deck_derivative(p) for p in points]).T
        pulled = np.array([self.pulled_back_differentials(p) for p in points]).T

        self.R, r_residual = _fit(cover, pulled)
        self.S, s_residual = _fit(pulled, cover + cover_deck)
        self.deck_matrix, d_residual = _fit(cover, cover_deck)
        self.fit_residuals = {'R': r_residual, 'S': s_residual, 'deck': d_residual}
        identity = np.eye(self.cover_genus)
        self.consistency = {
            'SR - (1 + sigma)': float(np.max(np.abs(self.S.dot(self.R) - identity - self.deck_matrix))),
            'R sigma - R': float(np.max(np.abs(self.R.dot(self.deck_matrix) - self.R))),
        }
        logger.debug('Cover fits %s, consistency %s', self.fit_residuals, self.consistency)
        worst = max(list(self.fit_residuals.values()) + list(self.consistency.values()))
        if worst > FIT_TOLERANCE:
            raise InconsistentCover('Cover differential relations hold only to {:.3e}'.format(worst))

    def _quadratic_gauge(self):
        """Q = -2 pi i N~^T S, with S e_k = m~_k + tau~ n~_k."""
        tau = self.period_data.tau.tau
        columns = []
        for k in range(self.genus):
            real, imag = lattice_components(self.S[:, k], tau)
            rounded = np.round(imag)
            if np.max(np.abs(imag - rounded)) > 1e-6 or np.max(np.abs(real - np.round(real))) > 1e-6:
                raise InconsistentCover('Pullback of an a-period is not a cover lattice vector')
            columns.append(rounded)
        n_tilde = np.array(columns).T
        quadratic = -2j * np.pi * n_tilde.T.dot(self.S)
        return (quadratic + quadratic.T) / 2

    def deck_eigenvalues(self):
        return np.sort_complex(np.linalg.eigvals(self.deck_matrix))


def build_double_cover(base_context, factor_split, seed=0):
    """
    The unramified double cover attached to f = f1 f2.

    :param CurveContext base_context: Base curve data.
    :param tuple        factor_split: (f1, f2) ascending coefficient lists.
    :return DoubleCover: The cover with its periods and pullback data.
    """
    f1 = _polynomial_from_pairs(factor_split[0])
    f2 = _polynomial_from_pairs(factor_split[1])
    f1 = np.trim_zeros(f1, 'b')
    f2 = np.trim_zeros(f2, 'b')
    base = base_context.curve
    product = P.polymul(f1, f2)
    if len(product) != len(base.f_coeffs) or np.max(np.abs(product - base.f_coeffs)) > 1e-12 * max(
            1.0, np.max(np.abs(base.f_coeffs))):
        raise NotEvenPartition('f1 * f2 does not reproduce the curve polynomial')
    degree = len(f1) - 1
    if degree % 2 == 1 or degree == 0:
        raise NotEvenPartition('f1 must have positive even degree, got {}'.format(degree))
    if degree != 2:
        raise UnsupportedSplit('Only quadratic f1 is supported, got degree {}'.format(degree))
    cover = DoubleCover(base_context, f1, f2, seed)
    logger.debug('Cover of genus %d with deck eigenvalues %s', cover.cover_genus, cover.deck_eigenvalues())
    return cover


def sample_cover_points(cover, count, seed, constraints=None):
    """count cover points whose images are regular and pairwise separated on the base."""
    rng = np.random.default_rng(seed)
    gap = 1e-2 * cover.base.scale
    for attempt in range(MAX_REJECTIONS):
        points = sample_points(cover.curve, rng, count)
        try:
            images = [cover.regular_cover_point(p) for p in points]
            for i, p in enumerate(images):
                if any(abs(p.x - q.x) <= gap for q in images[i + 1:]):
                    raise PathDegenerate('Base images of two samples coincide')
            if constraints is not None:
                constraints(points)
            return points
        except (PathDegenerate, DenominatorOnThetaDivisor, HalfDiffVanishes) as error:
            logger.debug('Rejected cover sample %d: %s', attempt, error)
    raise SamplingExhausted('No regular cover configuration after {} attempts'.format(MAX_REJECTIONS))


class DirectImageGauge(object):
    """
    theta~(e~ + S z) = exp(c + l z + z Q z / 2) theta(e + z) theta(e - L + z)
    for e = -(K + t) and e~ = -(K~ + S t + (g-1) c0).
    """

    def __init__(self, cover, twist):
        self.cover = cover
        base = cover.base_context
        t = twist.vector
        self.e = -(base.K + t)
        self.e_torsion = self.e - cover.torsion.L.vector
        self.cover_twist = JacobianPoint.of(cover.S.dot(t) + (cover.genus - 1) * cover.c0, 0)
        self.e_cover = -(cover.context.K + self.cover_twist.vector)

        values = []
        for argument, context in ((self.e, base), (self.e_torsion, base), (self.e_cover, cover.context)):
            value, gradient = theta_with_grad(argument, context.tau, tol=context.theta_tol)
            require_off_divisor(argument, context.period_data, value=value)
            values.append((value, np.array([(g / value).to_complex() for g in gradient])))
        (self.theta_e, log_e), (self.theta_torsion, log_torsion), (self.theta_cover, log_cover) = values
        self.linear = cover.S.T.dot(log_cover) - log_e - log_torsion

    def base_product(self, a):
        """theta(e - a) theta(e - L - a) / (theta(e) theta(e - L))."""
        base = self.cover.base_context
        return (base.theta(self.e - a) / self.theta_e) * (base.theta(self.e_torsion - a) / self.theta_torsion)

    def factor(self, a):
        """Phi(-a) / Phi(0)."""
        return ScaledComplex.from_log(-self.linear.dot(a) + 0.5 * a.dot(self.cover.quadratic).dot(a))

    def cover_ratio(self, shift):
        """theta~(e~ - shift) / theta~(e~) for a cover vector shift."""
        return self.cover.context.theta(self.e_cover - shift) / self.theta_cover

    def predicted_ratio(self, a, image):
        """
        theta~(e~ - image) / theta~(e~) from base data, for image = S a modulo the cover lattice.

        :return tuple: (the prediction, distance of image - S a from the lattice vector it was rounded to).
        """
        tau = self.cover.period_data.tau.tau
        pulled = self.cover.S.dot(a)
        offset = image - pulled
        m, n = nearest_lattice_point(offset, tau)
        distance = float(np.max(np.abs(offset - m - tau.dot(n))))
        translation = ScaledComplex.from_log(shift_log_factor(self.e_cover - pulled, tau, -n, -m))
        return self.base_product(a) * self.factor(a) * translation, distance

    def cover_bundle(self):
        return SplitBundle((self.cover_twist,))


def check_prime_form_pullback(cover, samples, tolerance, seed=None):
    """
    rho(P, Q) = E(gamma P, gamma Q) / (E~(P, Q) E~(P, sigma Q)) is constant up to per-point factors.

    samples are P_0..P_k, Q_0..Q_k; the pair (P_0, Q_0) is the reference and
    the statistic is max_s |rho(P_s,Q_s) rho(P_0,Q_0) / (rho(P_s,Q_0) rho(P_0,Q_s)) - 1|.
    The base prime form takes R (A~(Q) - A~(P)) as its argument.
    """
    started = time.perf_counter()
    ps, qs = split_samples(samples)
    assert len(ps) >= 2, 'The pullback check needs a reference pair and at least one more.'
    base = cover.base_context
    context = cover.context

    def rho(p, q):
        sigma_q = cover.register_deck_lift(q)
        gp, gq = cover.project(p), cover.project(q)
        argument = cover.R.dot(context.abel(q) - context.abel(p))
        base_form = TrivializedValue(base.theta(argument, base.delta)) / (base.half_diff(gp) * base.half_diff(gq))
        return base_form / (context.prime_form(p, q) * context.prime_form(p, sigma_q))

    reference = rho(ps[0], qs[0])
    crosses = []
    for p, q in zip(ps[1:], qs[1:]):
        cross = rho(p, q) * reference / (rho(p, qs[0]) * rho(ps[0], q))
        require_same_weights(cross, TrivializedValue(1), 'prime_form_pullback')
        crosses.append(cross.value)
    deviations = [abs(value.to_complex() - 1) for value in crosses]
    worst = int(np.argmax(deviations))
    residual = deviations[worst]
    return IdentityReport('prime_form_pullback', context.curve.digest(), seed,
                          [describe_point(p) for p in samples], crosses[worst], ScaledComplex.one(),
                          residual, tolerance, PASS if residual <= tolerance else FAIL,
                          time.perf_counter() - started, {'pairs': len(crosses), 'deviations': deviations})


def check_direct_image(cover, twist, samples, tolerance, seed=None):
    """
    theta(N(Z)) theta(N L(Z)) / (theta(N) theta(N L)) against theta~(gamma*N (gamma* Z)) / theta~(gamma*N).

    Z = sum gamma x~_i - gamma y~_i is integrated on the base and gamma* Z on
    the cover; the base side carries the exponential gauge between the two
    theta trivializations and the quasi-periodicity factor of the lattice
    vector separating A~(gamma* Z) from S A(Z).

    :param DoubleCover   cover:   The cover.
    :param JacobianPoint twist:   t with N = -(K + t) as theta argument.
    :param list          samples: Cover points x~_1..x~_m, y~_1..y~_m.
    :return IdentityReport: The comparison.
    """
    started = time.perf_counter()
    xs, ys = split_samples(samples)
    base = cover.base_context
    gauge = DirectImageGauge(cover, twist)
    a = sum((base.abel(cover.project(x)) - base.abel(cover.project(y)) for x, y in zip(xs, ys)),
            np.zeros(cover.genus, dtype=complex))
    image = cover.pullback_abel(xs, ys)
    lhs, distance = gauge.predicted_ratio(a, image)
    rhs = gauge.cover_ratio(image)
    details = {'m': len(xs), 'base_product': gauge.base_product(a).to_json(), 'lattice_offset': distance}
    return IdentityReport.compare('direct_image', cover.context, seed, samples, lhs, rhs, tolerance, started,
                                  details)


def check_inverse_image(cover, twist, samples, tolerance, seed=None):
    """
    Addition formula on the cover for gamma*N and the 2m points x~_i, sigma x~_i
    against y~_i, sigma y~_i, with its theta ratio replaced by the base product
    theta(N(Z)) theta(N L(Z)) / (theta(N) theta(N L)) times the gauge.
    """
    started = time.perf_counter()
    xs, ys = split_samples(samples)
    context = cover.context
    gauge = DirectImageGauge(cover, twist)
    big_x = xs + [cover.register_deck_lift(x) for x in xs]
    big_y = ys + [cover.register_deck_lift(y) for y in ys]

    difference = sum((context.abel(x) - context.abel(y) for x, y in zip(xs, ys)),
                     np.zeros(cover.cover_genus, dtype=complex))
    a = cover.R.dot(difference)
    ratio, _ = gauge.predicted_ratio(a, cover.pullback_abel(xs, ys))

    bundle_theta = BundleTheta(context, gauge.cover_bundle())
    lhs = TrivializedValue(ratio) * pair_products(context, big_x, big_y, 1)
    rhs = cross_product(context, big_x, big_y, 1) * trivialized_product(
        summand_determinants(context, bundle_theta, big_x, big_y))
    require_same_weights(lhs, rhs, 'inverse_image')
    norm = fay_normalizer(context, big_x, big_y, 1)
    return IdentityReport.compare('inverse_image', context, seed, samples, lhs.value / norm.value,
                                  rhs.value / norm.value, tolerance, started, {'m': len(xs)})


def pushforward_degree(genus, cover_genus, n, d_tilde, r_tilde):
    """deg gamma_* M~ = d~ - r~ (g~ - 1 - n (g - 1))."""
    return d_tilde - r_tilde * (cover_genus - 1 - n * (genus - 1))


def check_pushforward_degree(cover, d_tilde, r_tilde, n=2, cover_genus=None):
    """
    The degree formula for the pushforward along an unramified cover.

    Unramified means g~ = n (g - 1) + 1, so the pushforward keeps the degree
    d~. When d~ is even and r~ = 1 the bundle may be taken as gamma* N with
    deg N = d~/2, and deg N + deg N L must give the same number.
    """
    g = cover.genus
    g_tilde = cover.cover_genus if cover_genus is None else cover_genus
    if g_tilde != n * (g - 1) + 1:
        return False
    degree = pushforward_degree(g, g_tilde, n, d_tilde, r_tilde)
    if degree != d_tilde:
        return False
    if r_tilde == 1 and d_tilde % n == 0:
        summand = d_tilde // n
        return degree == sum(summand for _ in range(n))
    return True
