# Copyright (c) 2026, the thetaverify authors
# All rights reserved.
#
# Use of this source code is governed by the BSD 3-clause license found in
# the LICENSE file at the root of this repository.

"""
Abel-Jacobi map, divisors, the Riemann vector and theta-divisor membership.

The Abel map is based at the finite branch point b_1. Every path starts with a
straight segment in the x-plane, detours around intermediate branch points on
small semicircles and is integrated with adaptive Gauss-Kronrod quadrature
(scipy's quad_vec) on the sheet obtained by continuation. Because b_1 is a
branch point, the lift of the path is fixed only up to the involution; the end
sheet is matched to the target point at the very end.
"""

import cmath
import enum
import itertools
import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from thetaverify.model.curve import (BRANCH_CLEARANCE, INFINITY, CurvePoint, continue_branch,
                                     continue_root, signed_root)
from thetaverify.model.errors import (DenominatorOnThetaDivisor, HalfDiffVanishes,
                                      IndeterminateMembership, PathDegenerate,
                                      PathTooCloseToBranchPoint, QuadratureNotConverged,
                                      RiemannVectorAmbiguous, SamplingExhausted)
from thetaverify.model.theta import Characteristic, characteristics, normalized_magnitude, theta

logger = logging.getLogger(__name__)

DETOUR_RADIUS = 1e-3
INFINITY_RADIUS = 1e3
ENDPOINT_TRIM = 1e-3
LATTICE_TOLERANCE = 1e-7
VANISHING_THRESHOLD = 1e-6
INDETERMINATE_THRESHOLD = 1e-4
GENERIC_THRESHOLD = 1e-3
REFERENCE_SAMPLES = 32
MAX_REJECTIONS = 1000


# Lattice arithmetic.

def lattice_components(v, tau):
    """Real u, w with v = u + tau w."""
    tau = getattr(tau, 'tau', tau)
    v = np.asarray(v, dtype=complex)
    w = np.linalg.solve(tau.imag, v.imag)
    return v.real - tau.real.dot(w), w


def nearest_lattice_point(v, tau):
    """Integer vectors m, n with m + tau n nearest v; meant for v within a small distance of the lattice."""
    u, w = lattice_components(v, tau)
    return np.round(u), np.round(w)


def lattice_reduce(v, tau):
    """Representative of v modulo Z^g + tau Z^g with components in [-1/2, 1/2)."""
    u, w = lattice_components(v, tau)
    tau = getattr(tau, 'tau', tau)
    u = u - np.floor(u + 0.5)
    w = w - np.floor(w + 0.5)
    return u + tau.dot(w)


def lattice_distance(v, tau):
    """
    Euclidean distance from v to the nearest lattice vector.

    The rounded components are refined over their neighbours, which matters
    when tau is far from reduced.
    """
    tau_matrix = getattr(tau, 'tau', tau)
    v = np.asarray(v, dtype=complex)
    u, w = lattice_components(v, tau_matrix)
    g = len(v)
    best = math.inf
    for dn in itertools.product((-1, 0, 1), repeat=g):
        n = np.round(w) + np.array(dn)
        shifted = v - tau_matrix.dot(n)
        m = np.round(shifted.real)
        best = min(best, float(np.linalg.norm(shifted - m)))
    return best


@dataclass(frozen=True)
class JacobianPoint(object):
    """A divisor class as a vector of C^g, with the degree of the divisor it came from."""

    vec: tuple
    degree: int = 0

    @classmethod
    def of(cls, vec, degree=0):
        return cls(tuple(complex(v) for v in np.asarray(vec, dtype=complex).ravel()), int(degree))

    @classmethod
    def zero(cls, genus, degree=0):
        return cls.of(np.zeros(genus), degree)

    @property
    def vector(self):
        return np.array(self.vec, dtype=complex)

    def __add__(self, other):
        return JacobianPoint.of(self.vector + other.vector, self.degree + other.degree)

    def __sub__(self, other):
        return JacobianPoint.of(self.vector - other.vector, self.degree - other.degree)

    def __neg__(self):
        return JacobianPoint.of(-self.vector, -self.degree)

    def scaled(self, factor):
        return JacobianPoint.of(factor * self.vector, factor * self.degree)

    def equivalent(self, other, tau, tolerance=LATTICE_TOLERANCE):
        """Same class modulo the period lattice."""
        return self.degree == other.degree and lattice_distance(self.vector - other.vector, tau) < tolerance


class Divisor(object):
    """A finite formal sum of curve points; equal points are merged."""

    def __init__(self, terms=()):
        self.terms = {}
        for point, multiplicity in terms:
            self.terms[point] = self.terms.get(point, 0) + int(multiplicity)
        self.terms = {p: m for p, m in self.terms.items() if m != 0}

    @property
    def degree(self):
        return sum(self.terms.values())

    def __add__(self, other):
        return Divisor(list(self.terms.items()) + list(other.terms.items()))

    def __neg__(self):
        return Divisor([(p, -m) for p, m in self.terms.items()])

    def __sub__(self, other):
        return self + (-other)

    def __iter__(self):
        return iter(self.terms.items())

    def __len__(self):
        return len(self.terms)

    def abel(self, period_data):
        """Sum of multiplicity times Abel image; infinity handled by abel_infinity."""
        total = np.zeros(period_data.genus, dtype=complex)
        for point, multiplicity in self.terms.items():
            if point.is_infinity:
                total += multiplicity * abel_infinity(period_data.curve, period_data)
            else:
                total += multiplicity * abel_map(period_data.curve, period_data, point)
        return JacobianPoint.of(total, self.degree)


def divisor_of_x_minus(curve, x0):
    """div(x - x0) = P + P' - 2 infinity."""
    point = curve.point(x0)
    if point.is_branch:
        return Divisor([(point, 2), (INFINITY, -2)])
    return Divisor([(point, 1), (point.conjugate(), 1), (INFINITY, -2)])


def divisor_of_y(curve):
    """div(y) = b_1 + ... + b_2g+1 - (2g+1) infinity."""
    terms = [(curve.branch_point(k), 1) for k in range(1, curve.degree + 1)]
    return Divisor(terms + [(INFINITY, -curve.degree)])


# Paths.

class _Segment(object):

    def __init__(self, head, tail):
        self.head = head
        self.tail = tail

    def x(self, s):
        # Smoothstep parametrization: vanishing speed at both ends tames branch-point endpoints.
        return self.head + (self.tail - self.head) * s * s * (3 - 2 * s)

    def dx(self, s):
        return (self.tail - self.head) * 6 * s * (1 - s)


class _Arc(object):

    def __init__(self, centre, radius, start_angle, sweep):
        self.centre = centre
        self.radius = radius
        self.start_angle = start_angle
        self.sweep = sweep

    def x(self, s):
        return self.centre + self.radius * cmath.exp(1j * (self.start_angle + self.sweep * s))

    def dx(self, s):
        return 1j * self.sweep * self.radius * cmath.exp(1j * (self.start_angle + self.sweep * s))


def _detour_pieces(curve, head, tail, radius):
    """Segment head -> tail with semicircular detours around branch points it passes."""
    length = abs(tail - head)
    if length == 0:
        return []
    direction = (tail - head) / length
    crossings = []
    for b in curve.branch_points:
        if abs(b - head) <= radius or abs(b - tail) <= radius:
            continue
        relative = (b - head) * direction.conjugate()
        along, across = relative.real, relative.imag
        if radius < along < length - radius and abs(across) < radius:
            crossings.append((along, b, across))
    crossings.sort()

    pieces = []
    cursor = head
    for along, b, across in crossings:
        half_chord = math.sqrt(radius * radius - across * across)
        entry = head + direction * (along - half_chord)
        exit_ = head + direction * (along + half_chord)
        side = 1.0 if across <= 0 else -1.0
        start_angle = cmath.phase(entry - b)
        wrapped = cmath.phase((exit_ - b) / (entry - b))
        sweep = wrapped
        for candidate in (wrapped, wrapped - math.copysign(2 * math.pi, wrapped or 1.0)):
            middle = b + radius * cmath.exp(1j * (start_angle + candidate / 2)) - head
            if side * (middle * direction.conjugate()).imag > 0:
                sweep = candidate
                break
        pieces.append(_Segment(cursor, entry))
        pieces.append(_Arc(b, radius, start_angle, sweep))
        cursor = exit_
    pieces.append(_Segment(cursor, tail))
    return pieces


@dataclass
class PathRecord(object):
    """Integral of x^k dx/y along a path from b_1, on the lift that ends at y_end."""

    target: complex
    pieces: list
    integral: np.ndarray
    y_end: complex
    detours: int = field(default=0)


def _integrate_piece(curve, piece, start_value, trim_start, trim_end, tol):
    """Continue y along a piece and integrate x^k dx/y on that lift."""
    powers = np.arange(curve.genus)
    near = [b for b in curve.branch_points
            if min(abs(b - piece.x(0.0)), abs(b - piece.x(1.0))) > 1e-12 * curve.scale]
    start = ENDPOINT_TRIM if trim_start else 0.0
    end = 1.0 - ENDPOINT_TRIM if trim_end else 1.0
    if start_value is None:
        start_value = cmath.sqrt(complex(curve.f(piece.x(start))))
    s_nodes, roots = continue_branch(curve, piece.x, start_value, start, end, avoid=near)

    def integrand(s):
        x = piece.x(s)
        y = signed_root(curve.f(x), s, s_nodes, roots)
        value = x ** powers * piece.dx(s) / y
        return np.concatenate([value.real, value.imag])

    result, _, info = integrate.quad_vec(integrand, 0.0, 1.0, epsabs=tol, epsrel=tol,
                                         norm='max', limit=4000, full_output=True)
    if info.status == 1:
        raise QuadratureNotConverged('Abel path quadrature hit the subdivision limit')
    g = curve.genus
    return result[:g] + 1j * result[g:], roots[-1]


def _path_record(curve, target_x, tol):
    radius = DETOUR_RADIUS * curve.scale
    head = curve.branch_points[0]
    pieces = _detour_pieces(curve, head, target_x, radius)
    ends_on_branch = curve.distance_to_branch_points(target_x) <= 1e-12 * curve.scale
    total = np.zeros(curve.genus, dtype=complex)
    value = None
    for index, piece in enumerate(pieces):
        last = index == len(pieces) - 1
        integral, value = _integrate_piece(curve, piece, value, trim_start=index == 0,
                                           trim_end=last and ends_on_branch, tol=tol)
        total += integral
    detours = sum(1 for piece in pieces if isinstance(piece, _Arc))
    return PathRecord(target_x, pieces, total, value, detours)


def abel_map(curve, period_data, point, tol=1e-11, use_cache=True):
    """
    Normalized Abel image of a finite point, based at b_1.

    :param HyperellipticCurve curve:       The curve.
    :param PeriodData         period_data: Its periods.
    :param CurvePoint         point:       A finite point.
    :param float              tol:         Path quadrature tolerance.
    :param bool               use_cache:   Reuse the recorded path for this x.
    :return array: A vector of C^g.
    """
    assert not point.is_infinity, 'Use abel_infinity for the point at infinity.'
    if point.is_branch and abs(point.x - curve.branch_points[0]) <= 1e-14 * curve.scale:
        return np.zeros(curve.genus, dtype=complex)
    if not point.is_branch and curve.distance_to_branch_points(point.x) <= BRANCH_CLEARANCE * curve.scale:
        raise PathDegenerate('Point {} is within {:.1e} of a branch point'.format(
            point.x, BRANCH_CLEARANCE * curve.scale))

    paths = period_data.cache('abel_paths')
    key = (point.x, tol)
    record = paths.get(key) if use_cache else None
    if record is None:
        try:
            record = _path_record(curve, point.x, tol)
        except PathTooCloseToBranchPoint as error:
            raise PathDegenerate(str(error))
        if use_cache:
            record = paths.setdefault(key, record)

    integral = record.integral
    if not point.is_branch:
        target_y = curve.y(point)
        if (record.y_end * target_y.conjugate()).real < 0:
            integral = -integral
    return period_data.normalization.dot(integral)


def abel_infinity(curve, period_data, tol=1e-11, radius_factor=INFINITY_RADIUS):
    """
    Normalized Abel image of the point at infinity.

    A straight segment runs left from b_1 to X_0 = b_1 - radius_factor * scale;
    the tail beyond X_0 is integrated in t with x = b_1 - R_0 / t^2, where the
    integrand x^k dx/y is bounded at t = 0 on the odd model.
    """
    cache = period_data.cache('abel_infinity')
    key = (tol, radius_factor)
    if key in cache:
        return cache[key]

    g = curve.genus
    head = curve.branch_points[0]
    reach = radius_factor * curve.scale
    near, value = _integrate_piece(curve, _Segment(head, head - reach), None, True, False, tol)

    coeffs = curve.f_coeffs
    powers = np.arange(g)
    degree = curve.degree

    def w_of(t):
        return head * t * t - reach

    def radicand(s):
        # f(x) t^(4g+2) written in w = x t^2 so it stays bounded as t -> 0.
        t = 1.0 - s
        w = w_of(t)
        return sum(coeffs[j] * w ** j * t ** (2 * (degree - j)) for j in range(degree + 1))

    offsets = head - np.array(curve.branch_points, dtype=complex)

    def factors(s):
        # radicand = leading * prod_k (w - b_k t^2).
        t = 1.0 - s
        return offsets * t * t - reach

    s_nodes, roots = continue_root(radicand, value, 0.0, 1.0, factors=factors)

    def integrand(s):
        t = 1.0 - s
        root = signed_root(radicand(s), s, s_nodes, roots)
        value = -2 * reach * w_of(t) ** powers * t ** (2 * g - 2 - 2 * powers) / root
        return np.concatenate([value.real, value.imag])

    tail, _, info = integrate.quad_vec(integrand, 0.0, 1.0, epsabs=tol, epsrel=tol,
                                       norm='max', limit=4000, full_output=True)
    if info.status == 1:
        raise QuadratureNotConverged('Tail quadrature towards infinity hit the subdivision limit')
    total = near + tail[:g] + 1j * tail[g:]
    return cache.setdefault(key, period_data.normalization.dot(total))


# Theta divisor.

class Membership(enum.Enum):
    ON = 'on'
    OFF = 'off'
    INDETERMINATE = 'indeterminate'


def reference_magnitude(period_data):
    """Median normalized log|theta| over REFERENCE_SAMPLES seeded points of the torus."""
    cache = period_data.cache('theta_reference')
    if 'median' in cache:
        return cache['median']
    rm = period_data.tau
    rng = np.random.default_rng(20260101)
    logs = []
    for _ in range(REFERENCE_SAMPLES):
        z = rng.random(rm.genus) + rm.tau.dot(rng.random(rm.genus))
        logs.append(normalized_magnitude(theta(z, rm, tol=period_data.theta_tol), z, rm))
    return cache.setdefault('median', float(np.median(logs)))


def relative_theta_magnitude(e, period_data, char=None, value=None):
    """|theta(e)| normalized by the lattice-invariant Gaussian factor, relative to the typical size."""
    e = np.asarray(e, dtype=complex)
    if value is None:
        value = theta(e, period_data.tau, char, tol=period_data.theta_tol)
    if value.is_zero:
        return 0.0
    return math.exp(normalized_magnitude(value, e, period_data.tau) - reference_magnitude(period_data))


def membership(e, period_data, value=None):
    """Tri-state theta-divisor membership with the dead band [VANISHING_THRESHOLD, INDETERMINATE_THRESHOLD]."""
    size = relative_theta_magnitude(e, period_data, value=value)
    if size < VANISHING_THRESHOLD:
        return Membership.ON
    if size > INDETERMINATE_THRESHOLD:
        return Membership.OFF
    return Membership.INDETERMINATE


def is_on_theta_divisor(e, period_data):
    verdict = membership(e, period_data)
    if verdict is Membership.INDETERMINATE:
        raise IndeterminateMembership('theta(e) lies in the dead band; resample')
    return verdict is Membership.ON


def require_off_divisor(e, period_data, value=None):
    """Raise DenominatorOnThetaDivisor unless theta(e) is safely nonzero."""
    if membership(e, period_data, value=value) is not Membership.OFF:
        raise DenominatorOnThetaDivisor('theta vanishes or nearly vanishes at a denominator argument')


# Sampling.

def sample_points(curve, rng, count, separation=1e-2, existing=()):
    """
    Random finite points on random sheets, pairwise at least separation * scale apart
    in x and as far from every branch point.
    """
    spread = curve.scale
    centre = np.mean(curve.branch_points)
    gap = separation * curve.scale
    chosen = list(existing)
    points = []
    rejections = 0
    while len(points) < count:
        x = complex(centre + spread * complex(rng.uniform(-1, 1), rng.uniform(-1, 1)))
        sheet = 1 if rng.random() < 0.5 else -1
        if (curve.distance_to_branch_points(x) <= gap
                or any(abs(x - p.x) <= gap for p in chosen)):
            rejections += 1
            if rejections > MAX_REJECTIONS:
                raise SamplingExhausted('Could not place {} separated points'.format(count))
            continue
        point = CurvePoint(x, sheet, False)
        chosen.append(point)
        points.append(point)
    return points


def sample_regular_configuration(curve, m, rng_seed, constraints=None, separation=1e-2):
    """
    2m regular points x_1..x_m, y_1..y_m, deterministic in rng_seed.

    :param callable constraints: Called with the candidate list; raising
                                 DenominatorOnThetaDivisor, IndeterminateMembership,
                                 HalfDiffVanishes or PathDegenerate rejects it.
    :return list: 2m CurvePoints.
    """
    rng = np.random.default_rng(rng_seed)
    for attempt in range(MAX_REJECTIONS):
        candidate = sample_points(curve, rng, 2 * m, separation)
        if constraints is None:
            return candidate
        try:
            constraints(candidate)
            return candidate
        except (DenominatorOnThetaDivisor, IndeterminateMembership, HalfDiffVanishes, PathDegenerate) as error:
            logger.debug('Rejected configuration %d: %s', attempt, error)
    raise SamplingExhausted('No regular configuration after {} attempts'.format(MAX_REJECTIONS))


# Riemann vector.

@dataclass(frozen=True)
class RiemannVector(object):
    """K as a half period tau a + b, with the characteristic that produced it."""

    K: tuple
    characteristic: Characteristic

    @property
    def vector(self):
        return np.array(self.K, dtype=complex)


def _half_period(char, tau):
    return tau.dot(char.a_vector()) + char.b_vector()


def riemann_vector(curve, period_data, subsets=5, seed=0):
    """
    The half period K with theta(A(D) + K) = 0 for effective D of degree g-1.

    Candidates are the 2^2g half periods. A candidate survives if theta
    vanishes at A(D) + K for D made of g-1 branch points and for D made of
    g-1 random points, and does not vanish at g random points.
    """
    cache = period_data.cache('riemann_vector')
    if (subsets, seed) in cache:
        return cache[(subsets, seed)]
    g = curve.genus
    tau = period_data.tau.tau
    rng = np.random.default_rng(seed)

    finite = [curve.branch_point(k) for k in range(1, curve.degree + 1)]
    branch_subsets = list(itertools.combinations(finite, g - 1))
    order = rng.permutation(len(branch_subsets))
    tested = [list(branch_subsets[i]) for i in order[:max(subsets, 1)]]
    tested += [sample_points(curve, rng, g - 1) for _ in range(2)]
    generic = [sample_points(curve, rng, g) for _ in range(2)]

    def image(points):
        return sum((abel_map(curve, period_data, p) for p in points), np.zeros(g, dtype=complex))

    vanishing = [image(points) for points in tested]
    nonvanishing = [image(points) for points in generic]

    survivors = []
    for char in characteristics(g):
        K = _half_period(char, tau)
        if not all(relative_theta_magnitude(v + K, period_data) < VANISHING_THRESHOLD for v in vanishing):
            continue
        if not any(relative_theta_magnitude(v + K, period_data) > GENERIC_THRESHOLD for v in nonvanishing):
            continue
        survivors.append((char, K))

    if len(survivors) != 1:
        raise RiemannVectorAmbiguous('{} half periods satisfy the vanishing test'.format(len(survivors)))
    char, K = survivors[0]
    logger.debug('Riemann vector is the half period of %s', char.label())
    return cache.setdefault((subsets, seed), RiemannVector(tuple(complex(v) for v in K), char))
