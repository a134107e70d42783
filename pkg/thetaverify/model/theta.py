# Copyright (c) 2026, the thetaverify authors
# All rights reserved.
#
# Use of this source code is governed by the BSD 3-clause license found in
# the LICENSE file at the root of this repository.

"""
Riemann theta functions with half-integer characteristics.

theta[a;b](z, tau) = sum over n in Z^g of
    exp(i pi (n+a)^T tau (n+a) + 2 pi i (n+a)^T (z+b))

The argument is first reduced modulo the period lattice, the exact
quasi-periodicity factor going into the exponent of the ScaledComplex result.
The remaining sum is centred on the dominant lattice point and truncated to the
ellipsoid ||T(n + a + c)|| <= R, with T the upper Cholesky factor of
pi Im(tau), c = Im(tau)^-1 Im(z_reduced) and R taken from the Gaussian tail
bound of Deconinck, Heil, Bobenko, van Hoeij and Schmies.
"""

import functools
import itertools
import logging
import math
from dataclasses import dataclass

import mpmath
import numpy as np
from scipy.optimize import brentq
from scipy.special import gamma, gammaincc

from thetaverify.model.errors import InvalidTau, RadiusOverflow
from thetaverify.model.scaled import ScaledComplex

logger = logging.getLogger(__name__)

MAX_LATTICE_POINTS = 1e8
RADIUS_MARGIN = 0.5
SYMMETRY_TOLERANCE = 1e-9


@dataclass(frozen=True)
class Characteristic(object):
    """A half-integer characteristic [a; b], both vectors reduced into {0, 1/2}^g."""

    a: tuple
    b: tuple

    def __post_init__(self):
        assert len(self.a) == len(self.b), 'Characteristic halves must have equal length.'
        for value in self.a + self.b:
            assert value in (0.0, 0.5), 'Characteristic entries must be 0 or 1/2.'

    @property
    def genus(self):
        return len(self.a)

    @property
    def parity(self):
        """0 for even, 1 for odd: 4 a.b mod 2."""
        return int(round(4 * sum(x * y for x, y in zip(self.a, self.b)))) % 2

    @property
    def is_odd(self):
        return self.parity == 1

    def a_vector(self):
        return np.array(self.a, dtype=float)

    def b_vector(self):
        return np.array(self.b, dtype=float)

    def label(self):
        def half(value):
            return '1/2' if value else '0'
        return '[{}; {}]'.format(' '.join(half(x) for x in self.a), ' '.join(half(x) for x in self.b))

    @classmethod
    def zero(cls, genus):
        return cls((0.0,) * genus, (0.0,) * genus)


def characteristics(genus):
    """All 2^(2g) half-integer characteristics in lexicographic order of (a, b)."""
    halves = list(itertools.product((0.0, 0.5), repeat=genus))
    return [Characteristic(a, b) for a in halves for b in halves]


class RiemannMatrix(object):
    """
    A validated Riemann matrix together with the data every theta evaluation needs.

    Instances are immutable; the truncation radius per tolerance is memoized.
    """

    def __init__(self, tau, symmetry_tolerance=SYMMETRY_TOLERANCE):
        """
        :param array tau:                g x g complex matrix.
        :param float symmetry_tolerance: Allowed max-norm of tau - tau^T.
        """
        tau = np.array(tau, dtype=complex)
        if tau.ndim == 0:
            tau = tau.reshape(1, 1)
        if tau.ndim != 2 or tau.shape[0] != tau.shape[1]:
            raise InvalidTau('tau must be a square matrix, got shape {}'.format(tau.shape))
        asymmetry = np.max(np.abs(tau - tau.T))
        if asymmetry > symmetry_tolerance:
            raise InvalidTau('tau is not symmetric (asymmetry {:.3e})'.format(asymmetry))
        tau = (tau + tau.T) / 2
        imag = tau.imag
        smallest = np.linalg.eigvalsh(imag)[0]
        if not smallest > 0:
            raise InvalidTau('Im(tau) is not positive definite (smallest eigenvalue {:.3e})'.format(smallest))

        self.tau = tau
        self.genus = tau.shape[0]
        self.imag = imag
        self.imag_inverse = np.linalg.inv(imag)
        # pi Im(tau) = T^T T with T upper triangular.
        self.cholesky = np.linalg.cholesky(math.pi * imag).T
        self.shortest_vector = _shortest_vector(self.cholesky)
        self._radii = {}

    def radius(self, tol):
        """Truncation radius R for tolerance tol (memoized)."""
        if tol not in self._radii:
            self._radii[tol] = theta_radius(self, tol)
        return self._radii[tol]

    def point_estimate(self, radius):
        """Volume estimate of the number of lattice points within the truncation ellipsoid."""
        g = self.genus
        ball = math.pi ** (g / 2.0) / math.gamma(g / 2.0 + 1)
        return ball * radius ** g / abs(np.prod(np.diag(self.cholesky)))

    def digest(self):
        """Short stable rendering of tau for reports."""
        return [[[round(v.real, 10), round(v.imag, 10)] for v in row] for row in self.tau]


def as_riemann_matrix(tau):
    if isinstance(tau, RiemannMatrix):
        return tau
    return RiemannMatrix(tau)


def lattice_points(cholesky, center, radius):
    """
    Integer points n with ||T (n + center)|| <= radius, T upper triangular.

    Coordinates are bounded one at a time from the last, as in the
    Fincke-Pohst enumeration. The result is sorted lexicographically.

    :return array: k x g integer array.
    """
    g = cholesky.shape[0]
    center = np.asarray(center, dtype=float)
    found = []
    current = [0] * g

    def descend(i, remaining):
        offset = sum(cholesky[i, j] * (current[j] + center[j]) for j in range(i + 1, g))
        root = math.sqrt(max(remaining, 0.0))
        diag = cholesky[i, i]
        low = int(math.ceil((-offset - root) / diag - center[i]))
        high = int(math.floor((-offset + root) / diag - center[i]))
        for k in range(low, high + 1):
            current[i] = k
            rest = remaining - (diag * (k + center[i]) + offset) ** 2
            if rest < 0:
                continue
            if i == 0:
                found.append(tuple(current))
            else:
                descend(i - 1, rest)
        current[i] = 0

    descend(g - 1, radius * radius)
    if not found:
        return np.zeros((0, g), dtype=int)
    points = np.array(found, dtype=int)
    order = np.lexsort(points.T[::-1])
    return points[order]


def _shortest_vector(cholesky):
    g = cholesky.shape[0]
    bound = min(np.linalg.norm(cholesky[:, i]) for i in range(g))
    points = lattice_points(cholesky, np.zeros(g), bound * (1 + 1e-12))
    lengths = [np.linalg.norm(cholesky.dot(p)) for p in points if np.any(p)]
    return min(lengths) if lengths else bound


def theta_radius(tau, tol):
    """
    Truncation radius for tolerance tol.

    Solves (g/2) (2/rho)^g Gamma(g/2, (R - rho/2)^2) = tol for R, rho being the
    shortest vector of the lattice T Z^g, and adds RADIUS_MARGIN.
    """
    rm = as_riemann_matrix(tau)
    g = rm.genus
    rho = rm.shortest_vector
    half = g / 2.0

    def excess(radius):
        tail = gammaincc(half, (radius - rho / 2.0) ** 2) * gamma(half)
        return half * (2.0 / rho) ** g * tail - tol

    low = rho / 2.0
    if excess(low) <= 0:
        root = low
    else:
        high = low + 1.0
        while excess(high) > 0:
            high *= 2.0
        root = brentq(excess, low, high, xtol=1e-10)
    radius = max(root, math.sqrt(g) / 2.0) + RADIUS_MARGIN

    estimate = rm.point_estimate(radius)
    if estimate > MAX_LATTICE_POINTS:
        raise RadiusOverflow('Radius {:.3f} needs about {:.3e} lattice points'.format(radius, estimate))
    logger.debug('Theta radius %.4f for tol %.1e (about %.0f points)', radius, tol, estimate)
    return radius


def reduce_argument(z, tau, char=None):
    """
    Split z = z_r + tau N + M with integer N, M and Im(z_r) in the fundamental box.

    :return tuple: (z_r, log_factor, N, M) where theta[char](z) = exp(log_factor) theta[char](z_r).
    """
    rm = as_riemann_matrix(tau)
    char = char or Characteristic.zero(rm.genus)
    z = np.asarray(z, dtype=complex).reshape(rm.genus)
    n_shift = np.round(rm.imag_inverse.dot(z.imag))
    shifted = z - rm.tau.dot(n_shift)
    m_shift = np.round(shifted.real)
    reduced = shifted - m_shift
    log_factor = (-1j * math.pi * n_shift.dot(rm.tau).dot(n_shift)
                  - 2j * math.pi * n_shift.dot(reduced + char.b_vector())
                  + 2j * math.pi * char.a_vector().dot(m_shift))
    return reduced, log_factor, n_shift.astype(int), m_shift.astype(int)


def shift_log_factor(z, tau, n, m=None, char=None):
    """log(theta[char](z + tau n + m) / theta[char](z)), exact."""
    rm = as_riemann_matrix(tau)
    char = char or Characteristic.zero(rm.genus)
    z = np.asarray(z, dtype=complex).reshape(rm.genus)
    n = np.asarray(n, dtype=float)
    m = np.zeros(rm.genus) if m is None else np.asarray(m, dtype=float)
    return (-1j * math.pi * n.dot(rm.tau).dot(n)
            - 2j * math.pi * n.dot(z + char.b_vector())
            + 2j * math.pi * char.a_vector().dot(m))


def _centred_sum(z, rm, char, tol, with_gradient):
    reduced, log_factor, n_shift, _ = reduce_argument(z, rm, char)
    a = char.a_vector()
    b = char.b_vector()
    centre = rm.imag_inverse.dot(reduced.imag)
    peak = math.pi * centre.dot(rm.imag).dot(centre)

    radius = rm.radius(tol) + (1.0 if with_gradient else 0.0)
    points = lattice_points(rm.cholesky, a + centre, radius)
    shifted = points + a
    exponents = (1j * math.pi * np.einsum('ni,ij,nj->n', shifted, rm.tau, shifted)
                 + 2j * math.pi * shifted.dot(reduced + b)
                 - peak)
    terms = np.exp(exponents)
    total = terms.sum()
    factor = ScaledComplex.from_log(log_factor + peak)
    value = ScaledComplex(total) * factor
    if not with_gradient:
        return value, None

    weighted = 2j * math.pi * shifted.T.dot(terms)
    gradient = [ScaledComplex(weighted[k] - 2j * math.pi * n_shift[k] * total) * factor
                for k in range(rm.genus)]
    return value, gradient


def theta(z, tau, char=None, tol=1e-12):
    """
    theta[char](z, tau) as a ScaledComplex.

    :param array          z:    Point of C^g.
    :param RiemannMatrix  tau:  Riemann matrix (a raw array is validated first).
    :param Characteristic char: Half-integer characteristic, zero by default.
    :param float          tol:  Truncation tolerance relative to the leading term, in [1e-14, 1e-4].
    """
    assert 1e-14 <= tol <= 1e-4, 'Theta tolerance out of range: {}'.format(tol)
    rm = as_riemann_matrix(tau)
    value, _ = _centred_sum(z, rm, char or Characteristic.zero(rm.genus), tol, False)
    return value


def theta_grad(z, tau, char=None, tol=1e-12):
    """Gradient of theta[char] at z: a list of g ScaledComplex, summed with one extra unit of radius."""
    assert 1e-14 <= tol <= 1e-4, 'Theta tolerance out of range: {}'.format(tol)
    rm = as_riemann_matrix(tau)
    _, gradient = _centred_sum(z, rm, char or Characteristic.zero(rm.genus), tol, True)
    return gradient


def theta_with_grad(z, tau, char=None, tol=1e-12):
    """Value and gradient from one lattice enumeration."""
    rm = as_riemann_matrix(tau)
    return _centred_sum(z, rm, char or Characteristic.zero(rm.genus), tol, True)


def normalized_magnitude(value, z, tau):
    """
    log of |theta(z)| exp(-pi y^T Im(tau)^-1 y), y = Im z.

    This is invariant under lattice shifts of z, so magnitudes at different
    points of the torus can be compared.
    """
    rm = as_riemann_matrix(tau)
    y = np.asarray(z, dtype=complex).reshape(rm.genus).imag
    return value.log_abs() - math.pi * y.dot(rm.imag_inverse).dot(y)


@functools.lru_cache(maxsize=64)
def _reference_box(genus, box):
    return list(itertools.product(range(-box, box + 1), repeat=genus))


def theta_reference(z, tau, char=None, box=12, dps=30):
    """
    Brute-force box sum at extended precision with mpmath.

    Meant for oracles and spot checks: no reduction, no truncation control
    beyond the box size |n_i| <= box.

    :return mpmath.mpc: The theta value.
    """
    tau = np.atleast_2d(np.asarray(tau, dtype=complex))
    g = tau.shape[0]
    z = np.asarray(z, dtype=complex).reshape(g)
    char = char or Characteristic.zero(g)
    with mpmath.workdps(dps):
        tau_mp = [[mpmath.mpc(tau[i, j].real, tau[i, j].imag) for j in range(g)] for i in range(g)]
        z_mp = [mpmath.mpc(v.real, v.imag) for v in z]
        a = [mpmath.mpf(v) for v in char.a]
        b = [mpmath.mpf(v) for v in char.b]
        total = mpmath.mpc(0)
        for n in _reference_box(g, box):
            v = [n[i] + a[i] for i in range(g)]
            quad = mpmath.fsum(v[i] * tau_mp[i][j] * v[j] for i in range(g) for j in range(g))
            lin = mpmath.fsum(v[i] * (z_mp[i] + b[i]) for i in range(g))
            total += mpmath.exp(1j * mpmath.pi * quad + 2j * mpmath.pi * lin)
        return +total
