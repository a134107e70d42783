# Copyright (c) 2026, the thetaverify authors
# All rights reserved.
#
# Use of this source code is governed by the BSD 3-clause license found in
# the LICENSE file at the root of this repository.

"""
Hyperelliptic curves y^2 = f(x) of odd degree 2g+1, their holomorphic
differentials x^k dx/y and their period matrices.

Branch points are sorted by (Re, Im) into b_1 .. b_{2g+1}. The global branch
Y(x) of sqrt(f) used to label sheets has its cuts on the ray running left from
b_1 and on the segments [b_2, b_3], [b_4, b_5], ..., [b_2g, b_2g+1]; a_i is the
cycle around the i-th segment and b_i the cycle around b_1 .. b_2i.
"""

import cmath
import hashlib
import logging
import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import chebyshev
from numpy.polynomial import polynomial as P

from thetaverify.model.errors import (EvaluationAtBranchPoint, IllConditionedAPeriods,
                                      NotSquarefree, PathTooCloseToBranchPoint,
                                      QuadratureNotConverged, WrongDegree)
from thetaverify.model.theta import RiemannMatrix

logger = logging.getLogger(__name__)

SQUAREFREE_THRESHOLD = 1e-9
NEWTON_RESIDUAL = 1e-12
MAX_QUADRATURE_NODES = 2 ** 16
MAX_CONDITION_NUMBER = 1e10
BRANCH_CLEARANCE = 1e-6
FACTOR_STEP = 0.25


@dataclass(frozen=True)
class CurvePoint(object):
    """
    A point of a hyperelliptic curve.

    sheet selects y = sheet * Y(x) for the curve's global branch Y. The point
    at infinity has x = None.
    """

    x: complex
    sheet: int = 1
    is_branch: bool = False

    @property
    def is_infinity(self):
        return self.x is None

    def conjugate(self):
        """Image under the hyperelliptic involution (x, y) -> (x, -y)."""
        if self.is_branch or self.is_infinity:
            return self
        return CurvePoint(self.x, -self.sheet, False)


INFINITY = CurvePoint(None, 1, True)


def _principal_sqrt(values):
    return np.sqrt(np.asarray(values, dtype=complex))


def _segment_root(x, p, q):
    """(x - p) sqrt((x - q)/(x - p)): a square root of (x-p)(x-q) cut exactly along [p, q]."""
    x = np.asarray(x, dtype=complex)
    return (x - p) * _principal_sqrt((x - q) / (x - p))


def _right_ray_root(w):
    """i sqrt(-w): a square root of w cut along the ray [0, +inf)."""
    return 1j * _principal_sqrt(-np.asarray(w, dtype=complex))


class HyperellipticCurve(object):
    """A genus-g curve y^2 = f(x), deg f = 2g+1, with its branch data."""

    def __init__(self, f_coeffs, branch_points):
        self.f_coeffs = np.array(f_coeffs, dtype=complex)
        self.degree = len(self.f_coeffs) - 1
        self.genus = (self.degree - 1) // 2
        self.leading = self.f_coeffs[-1]
        self.branch_points = list(branch_points)
        self.scale = max(abs(b) for b in self.branch_points) + 1.0
        self.base_point = CurvePoint(self.branch_points[0], 1, True)
        self._sqrt_leading = cmath.sqrt(self.leading)
        b = self.branch_points
        self.cuts = [(b[2 * i - 1], b[2 * i]) for i in range(1, self.genus + 1)]
        self.gaps = [(b[2 * j - 2], b[2 * j - 1]) for j in range(1, self.genus + 1)]

    def __repr__(self):
        return 'HyperellipticCurve(genus={}, f={})'.format(self.genus, list(self.f_coeffs))

    def digest(self):
        """Stable short hash of the coefficients, used to tag reports."""
        text = ';'.join('{!r},{!r}'.format(c.real, c.imag) for c in self.f_coeffs)
        return hashlib.sha256(text.encode('ascii')).hexdigest()[:16]

    def f(self, x):
        return P.polyval(np.asarray(x, dtype=complex), self.f_coeffs)

    def global_branch(self, x):
        """Y(x) with cuts (-inf, b_1] and [b_2i, b_2i+1]."""
        x = np.asarray(x, dtype=complex)
        value = self._sqrt_leading * _principal_sqrt(x - self.branch_points[0])
        for p, q in self.cuts:
            value = value * _segment_root(x, p, q)
        return value

    def cut_cofactor(self, x, i):
        """Y(x) / S_i(x) for cut i (0-based); analytic across that cut."""
        x = np.asarray(x, dtype=complex)
        value = self._sqrt_leading * _principal_sqrt(x - self.branch_points[0])
        for j, (p, q) in enumerate(self.cuts):
            if j != i:
                value = value * _segment_root(x, p, q)
        return value

    def gap_branch(self, x, skip=None):
        """
        A second square root of f with cuts on [b_2j-1, b_2j] and on the ray right of b_2g+1.

        With skip = j the j-th gap factor is left out, giving a function
        analytic across that gap.
        """
        x = np.asarray(x, dtype=complex)
        value = self._sqrt_leading * _right_ray_root(x - self.branch_points[-1])
        for j, (p, q) in enumerate(self.gaps):
            if j != skip:
                value = value * _segment_root(x, p, q)
        return value

    def y(self, point):
        if point.is_infinity:
            raise EvaluationAtBranchPoint('y is infinite at the point at infinity')
        if point.is_branch:
            return 0j
        return point.sheet * complex(self.global_branch(point.x))

    def point(self, x, sheet=1):
        """The curve point over x on the given sheet; branch points are recognized."""
        x = complex(x)
        for b in self.branch_points:
            if abs(x - b) <= 1e-14 * self.scale:
                return CurvePoint(b, 1, True)
        return CurvePoint(x, 1 if sheet >= 0 else -1, False)

    def point_from_y(self, x, y):
        """The curve point (x, y) for a given square root y of f(x)."""
        point = self.point(x)
        if point.is_branch:
            return point
        reference = complex(self.global_branch(x))
        sheet = 1 if (y * reference.conjugate()).real >= 0 else -1
        assert abs(y - sheet * reference) <= 1e-6 * (1 + abs(y)), 'y is not a square root of f(x).'
        return CurvePoint(point.x, sheet, False)

    def branch_point(self, k):
        """b_k, 1-based as in the cut description."""
        return CurvePoint(self.branch_points[k - 1], 1, True)

    def distance_to_branch_points(self, x):
        return min(abs(x - b) for b in self.branch_points)


def build_curve(f_coeffs):
    """
    Build a HyperellipticCurve from ascending coefficients of f.

    Roots come from numpy's companion-matrix root finder and are polished by
    Newton iteration.

    :param list f_coeffs: 2g+2 complex coefficients, f_coeffs[k] multiplying x^k.
    :return HyperellipticCurve: The curve.
    """
    coeffs = np.array([complex(c) for c in f_coeffs], dtype=complex)
    if len(coeffs) < 4 or coeffs[-1] == 0:
        raise WrongDegree('f must have exact degree 2g+1 >= 3 with nonzero leading coefficient')
    degree = len(coeffs) - 1
    if degree % 2 == 0:
        raise WrongDegree('Only odd-degree models are supported, got degree {}'.format(degree))

    roots = P.polyroots(coeffs)
    derivative = P.polyder(coeffs)
    scale = max(abs(r) for r in roots) + 1.0
    polished = []
    for root in roots:
        for _ in range(50):
            slope = P.polyval(root, derivative)
            if slope == 0:
                break
            step = P.polyval(root, coeffs) / slope
            root = root - step
            if abs(step) <= 1e-16 * scale:
                break
        polished.append(complex(root))

    closest = min(abs(p - q) for i, p in enumerate(polished) for q in polished[i + 1:])
    if closest <= SQUAREFREE_THRESHOLD * scale:
        raise NotSquarefree('Roots of f cluster within {:.3e}'.format(closest))
    residual = max(abs(P.polyval(r, coeffs)) for r in polished) / max(abs(coeffs))
    if residual > NEWTON_RESIDUAL * scale ** degree:
        raise NotSquarefree('Newton polishing left a root residual of {:.3e}; f is numerically degenerate'
                            .format(residual))

    polished.sort(key=lambda r: (r.real, r.imag))
    return HyperellipticCurve(coeffs, polished)


class DifferentialBasis(object):
    """The basis x^k dx/y, k = 0..g-1, evaluated against the trivialization dx."""

    def __init__(self, curve):
        self.curve = curve
        self.exponents = list(range(curve.genus))

    def descriptors(self):
        return ['dx/y' if k == 0 else ('x dx/y' if k == 1 else 'x^{} dx/y'.format(k)) for k in self.exponents]

    def evaluate(self, point):
        """Coefficients x^k / y at a finite non-branch point."""
        if point.is_branch or point.is_infinity:
            raise EvaluationAtBranchPoint('Differentials are not trivialized by dx at {}'.format(point))
        y = self.curve.y(point)
        if abs(y) <= 1e-14 * self.curve.scale:
            raise EvaluationAtBranchPoint('y vanishes at {}'.format(point))
        return np.array([point.x ** k for k in self.exponents], dtype=complex) / y


def differential_basis(curve):
    return DifferentialBasis(curve)


class PeriodData(object):
    """
    a- and b-periods of the basis x^k dx/y, the normalized Riemann matrix and the normalization.

    `caches` holds run-scoped memo tables (Abel paths, half-differential
    signs, theta magnitude references); entries are only ever inserted with
    setdefault.
    """

    def __init__(self, curve, a_periods, b_periods, tol, nodes, theta_tol=1e-12):
        self.curve = curve
        self.a_periods = a_periods
        self.b_periods = b_periods
        self.tol = tol
        self.theta_tol = theta_tol
        self.nodes = nodes
        self.normalization = np.linalg.inv(a_periods)
        self.tau = RiemannMatrix(np.linalg.solve(a_periods, b_periods), symmetry_tolerance=max(1e-9, 10 * tol))
        self.genus = curve.genus
        self.caches = {}

    def normalized_differentials(self, point):
        """omega_i(P) against dx for the normalized basis."""
        return self.normalization.dot(differential_basis(self.curve).evaluate(point))

    def cache(self, name):
        return self.caches.setdefault(name, {})


def _chebyshev_integrals(curve, nodes):
    """Unnormalized a-periods and the gap integrals used for the b-periods."""
    g = curve.genus
    t, _ = chebyshev.chebgauss(nodes)
    weight = math.pi / nodes
    powers = np.arange(g)

    a_periods = np.zeros((g, g), dtype=complex)
    for i, (p, q) in enumerate(curve.cuts):
        x = (p + q) / 2 + (q - p) / 2 * t
        integrand = x[None, :] ** powers[:, None] / curve.cut_cofactor(x, i)[None, :]
        a_periods[:, i] = 2j * weight * integrand.sum(axis=1)

    gap_integrals = np.zeros((g, g), dtype=complex)
    for j, (p, q) in enumerate(curve.gaps):
        x = (p + q) / 2 + (q - p) / 2 * t
        integrand = x[None, :] ** powers[:, None] / curve.gap_branch(x, skip=j)[None, :]
        gap_integrals[:, j] = 2j * weight * integrand.sum(axis=1)
    return a_periods, gap_integrals


def _b_periods(curve, gap_integrals):
    """
    b_i is the loop around b_1 .. b_2i on the sheet of the gap branch that
    agrees with the right-hand boundary value of Y on cut i.
    """
    g = curve.genus
    b_periods = np.zeros((g, g), dtype=complex)
    for i, (p, q) in enumerate(curve.cuts):
        middle = (p + q) / 2
        half = (q - p) / 2
        right_value = -1j * half * complex(curve.cut_cofactor(middle, i))
        ratio = right_value / complex(curve.gap_branch(middle))
        sign = 1.0 if ratio.real > 0 else -1.0
        assert abs(ratio - sign) < 1e-6, 'Branches disagree beyond a sign on cut {}'.format(i + 1)
        b_periods[:, i] = sign * gap_integrals[:, :i + 1].sum(axis=1)
    return b_periods


def period_matrix(curve, tol=1e-12, theta_tol=1e-12):
    """
    Periods of x^k dx/y and the normalized Riemann matrix.

    Gauss-Chebyshev quadrature on every cut and gap; the node count doubles
    until consecutive estimates agree to tol.

    :param HyperellipticCurve curve: The curve.
    :param float              tol:   Quadrature tolerance in [1e-14, 1e-6].
    :param float              theta_tol: Truncation tolerance used by every theta evaluation on this curve.
    :return PeriodData: Periods, tau and the normalization matrix.
    """
    assert 1e-14 <= tol <= 1e-6, 'Quadrature tolerance out of range: {}'.format(tol)
    nodes = 16
    previous = _chebyshev_integrals(curve, nodes)
    while True:
        nodes *= 2
        if nodes > MAX_QUADRATURE_NODES:
            raise QuadratureNotConverged(
                'Period quadrature did not converge with {} nodes'.format(MAX_QUADRATURE_NODES))
        current = _chebyshev_integrals(curve, nodes)
        size = max(1.0, np.max(np.abs(current[0])), np.max(np.abs(current[1])))
        change = max(np.max(np.abs(current[0] - previous[0])), np.max(np.abs(current[1] - previous[1])))
        previous = current
        if change < tol * size:
            break
    a_periods, gap_integrals = previous
    logger.debug('Periods converged with %d Chebyshev nodes', nodes)

    condition = np.linalg.cond(a_periods)
    if condition > MAX_CONDITION_NUMBER:
        raise IllConditionedAPeriods('cond(A) = {:.3e}'.format(condition))

    b_periods = _b_periods(curve, gap_integrals)
    tau = np.linalg.solve(a_periods, b_periods)
    eigenvalues = np.linalg.eigvalsh((tau.imag + tau.imag.T) / 2)
    if eigenvalues[-1] < 0:
        logger.debug('b-cycles came out with reversed orientation; flipping them')
        b_periods = -b_periods
    return PeriodData(curve, a_periods, b_periods, tol, nodes, theta_tol)


def continue_root(radicand, start_value, start=0.0, end=1.0, guard=None, initial_steps=64, factors=None):
    """
    Analytic continuation of sqrt(radicand(s)) from s = start to s = end.

    With `factors`, radicand(s) is a constant times the product of factors(s)
    and a step is accepted only when every factor moves by at most
    FACTOR_STEP of its size; the root then follows the product of principal
    square roots of the factor ratios, which is exact for such steps.
    Without it, a step is accepted when the radicand turns by at most pi/4
    over each half of the step. Steps never exceed 1/16 of the interval.

    :param callable radicand:    s -> complex, nonvanishing on the open interval.
    :param complex  start_value: The root at s = start.
    :param callable guard:       Called with every proposed s; may raise to abort.
    :param callable factors:     s -> array whose product is radicand(s) up to a constant.
    :return tuple: (s_nodes, root_nodes) arrays.
    """
    s_nodes = [start]
    roots = [complex(start_value)]
    s = start
    previous = complex(radicand(start))
    previous_factors = None if factors is None else np.asarray(factors(start), dtype=complex)
    largest = (end - start) / 16
    step = (end - start) / initial_steps
    while s < end:
        if step < 1e-14:
            raise PathTooCloseToBranchPoint('Continuation step underflow at s = {}'.format(s))
        step = min(step, end - s)
        s_next = end if step == end - s else s + step
        if guard is not None:
            guard(s_next)
        current = complex(radicand(s_next))
        if factors is not None:
            current_factors = np.asarray(factors(s_next), dtype=complex)
            ratios = current_factors / previous_factors
            if np.max(np.abs(ratios - 1)) > FACTOR_STEP:
                step /= 2
                continue
            predicted = roots[-1] * np.prod(np.sqrt(ratios))
            previous_factors = current_factors
        else:
            middle = complex(radicand(s + step / 2))
            if 0 in (previous, middle, current) or max(abs(cmath.phase(middle / previous)),
                                                       abs(cmath.phase(current / middle))) > math.pi / 4:
                step /= 2
                continue
            predicted = roots[-1]
        candidate = cmath.sqrt(current)
        if (candidate * predicted.conjugate()).real < 0:
            candidate = -candidate
        s_nodes.append(s_next)
        roots.append(candidate)
        s, previous = s_next, current
        step = min(step * 1.5, largest)
    return np.array(s_nodes), np.array(roots)


def signed_root(radicand_value, s, s_nodes, roots):
    """sqrt(radicand_value) with the sign of the continuation table at the node nearest to s."""
    candidate = cmath.sqrt(complex(radicand_value))
    index = int(np.searchsorted(s_nodes, s))
    if index == len(s_nodes) or (index > 0 and s - s_nodes[index - 1] < s_nodes[index] - s):
        index -= 1
    if (candidate * roots[index].conjugate()).real < 0:
        candidate = -candidate
    return candidate


def continue_branch(curve, path, start_value, start=0.0, end=1.0, avoid=()):
    """
    Continue y = sqrt(f(x)) along x = path(s), keeping BRANCH_CLEARANCE from the points in `avoid`.

    :return tuple: (s_nodes, y_nodes) arrays.
    """
    clearance = BRANCH_CLEARANCE * curve.scale
    branch_points = np.array(curve.branch_points, dtype=complex)

    def guard(s):
        x = complex(path(s))
        for b in avoid:
            if abs(x - b) <= clearance:
                raise PathTooCloseToBranchPoint('Path passes within {:.1e} of branch point {}'.format(abs(x - b), b))

    def factors(s):
        return complex(path(s)) - branch_points

    return continue_root(lambda s: curve.f(path(s)), start_value, start, end, guard, factors=factors)


def continue_sheet(curve, path, start_sheet):
    """
    Sheet reached by continuing y = start_sheet * Y(x) along a polyline.

    :param list path:        Vertices x_0, ..., x_n of the polyline.
    :param int  start_sheet: +1 or -1 at x_0.
    :return int: The sheet at x_n.
    """
    vertices = [complex(x) for x in path]
    value = start_sheet * complex(curve.global_branch(vertices[0]))
    for head, tail in zip(vertices[:-1], vertices[1:]):
        def segment(s, head=head, tail=tail):
            return head + (tail - head) * s
        _, values = continue_branch(curve, segment, value, avoid=curve.branch_points)
        value = values[-1]
    reference = complex(curve.global_branch(vertices[-1]))
    return 1 if (value * reference.conjugate()).real > 0 else -1
