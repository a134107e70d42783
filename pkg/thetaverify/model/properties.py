# Copyright (c) 2026, the thetaverify authors
# All rights reserved.
#
# Use of this source code is governed by the BSD 3-clause license found in
# the LICENSE file at the root of this repository.


"""
Structural properties every curve must satisfy before any identity is worth checking.

Each check returns an IdentityReport so the properties suite shares the
report schema of the identity suites.
"""

import time

import numpy as np

from thetaverify.model.identities import FAIL, PASS, IdentityReport, describe_point, szego_residue
from thetaverify.model.jacobian import (divisor_of_x_minus, divisor_of_y, lattice_distance,
                                        sample_points)
from thetaverify.model.primeform import prime_form_limit
from thetaverify.model.scaled import ScaledComplex, relative_residual
from thetaverify.model.theta import characteristics, shift_log_factor

ABEL_TOLERANCE = 1e-6
LIMIT_DRIFT = 0.02


def _report(identity, context, seed, samples, residual, tolerance, started, details, lhs=None, rhs=None):
    return IdentityReport(identity, context.curve.digest(), seed, [describe_point(p) for p in samples],
                          lhs, rhs, residual, tolerance, PASS if residual <= tolerance else FAIL,
                          time.perf_counter() - started, details)


def _random_argument(rng, genus):
    return rng.uniform(-0.5, 0.5, genus) + 1j * rng.uniform(-0.5, 0.5, genus)


def check_theta_parity(context, seed, tolerance, count=4):
    """theta[c](-z) = (-1)^parity(c) theta[c](z) for every characteristic."""
    started = time.perf_counter()
    rng = np.random.default_rng([seed, 101])
    worst = (0.0, None, None)
    for _ in range(count):
        z = _random_argument(rng, context.genus)
        for char in characteristics(context.genus):
            lhs = context.theta(-z, char)
            rhs = context.theta(z, char)
            if char.is_odd:
                rhs = -rhs
            residual = relative_residual(lhs, rhs)
            if residual >= worst[0]:
                worst = (residual, lhs, rhs)
    residual, lhs, rhs = worst
    return _report('theta_parity', context, seed, [], residual, tolerance, started,
                   {'arguments': count, 'characteristics': 4 ** context.genus}, lhs, rhs)


def check_quasi_periodicity(context, seed, tolerance, count=4):
    """theta(z + tau n + m) = exp(-pi i n tau n - 2 pi i n z) theta(z)."""
    started = time.perf_counter()
    rng = np.random.default_rng([seed, 102])
    tau = context.tau.tau
    worst = (0.0, None, None)
    for _ in range(count):
        z = _random_argument(rng, context.genus)
        n = rng.integers(-2, 3, context.genus)
        m = rng.integers(-2, 3, context.genus)
        lhs = context.theta(z + tau.dot(n) + m)
        rhs = ScaledComplex.from_log(shift_log_factor(z, tau, n, m)) * context.theta(z)
        residual = relative_residual(lhs, rhs)
        if residual >= worst[0]:
            worst = (residual, lhs, rhs)
    residual, lhs, rhs = worst
    return _report('quasi_periodicity', context, seed, [], residual, tolerance, started,
                   {'shifts': count}, lhs, rhs)


def check_abel_theorem(context, seed, count=10, tolerance=ABEL_TOLERANCE):
    """div(x - x0) for count random x0, and div(y), map to lattice points."""
    started = time.perf_counter()
    rng = np.random.default_rng([seed, 103])
    curve = context.curve
    pd = context.period_data
    tau = context.tau.tau
    points = sample_points(curve, rng, count)
    distances = [lattice_distance(divisor_of_x_minus(curve, p.x).abel(pd).vector, tau) for p in points]
    distances.append(lattice_distance(divisor_of_y(curve).abel(pd).vector, tau))
    return _report('abel_theorem', context, seed, points, max(distances), tolerance, started,
                   {'distances': distances})


def check_prime_form_antisymmetry(context, seed, pairs=10):
    """E(P, Q) = -E(Q, P) with no tolerance."""
    started = time.perf_counter()
    rng = np.random.default_rng([seed, 104])
    points = sample_points(context.curve, rng, 2 * pairs)
    residual = 0.0
    for p, q in zip(points[:pairs], points[pairs:]):
        residual = max(residual, relative_residual(context.prime_form(p, q).value,
                                                   -context.prime_form(q, p).value))
    return _report('prime_form_antisymmetry', context, seed, points, residual, 0.0, started, {'pairs': pairs})


def check_prime_form_zero(context, seed, pairs=10, offsets=(1e-3, 1e-4), tolerance=LIMIT_DRIFT):
    """theta[delta](A(Q) - A(P)) / (x(Q) - x(P)) settles as Q -> P: the zero on the diagonal is simple."""
    started = time.perf_counter()
    rng = np.random.default_rng([seed, 105])
    points = sample_points(context.curve, rng, pairs)
    drifts = []
    for p in points:
        coarse, fine = (prime_form_limit(context, p, offset) for offset in offsets)
        drifts.append(abs((coarse / fine).to_complex() - 1))
    return _report('prime_form_zero', context, seed, points, max(drifts), tolerance, started,
                   {'offsets': list(offsets), 'drifts': drifts})


def check_szego_residue(context, bundle, seed, pairs=4, offsets=(1e-3, 1e-4), tolerance=LIMIT_DRIFT):
    """(x(Q) - x(P)) S_M(P, Q) -> 1 for every summand."""
    started = time.perf_counter()
    rng = np.random.default_rng([seed, 106])
    points = sample_points(context.curve, rng, pairs)
    deviations = []
    for p in points:
        for k in range(bundle.rank):
            deviations.extend(abs(value - 1) for value in szego_residue(context, bundle, p, offsets, k))
    return _report('szego_residue', context, seed, points, max(deviations), tolerance, started,
                   {'offsets': list(offsets), 'rank': bundle.rank})


def check_characteristic_counts(context, seed=None):
    """2^(g-1) (2^g + 1) even and 2^(g-1) (2^g - 1) odd characteristics."""
    started = time.perf_counter()
    g = context.genus
    chars = characteristics(g)
    odd = sum(1 for c in chars if c.is_odd)
    expected = (2 ** (g - 1) * (2 ** g + 1), 2 ** (g - 1) * (2 ** g - 1))
    found = (len(chars) - odd, odd)
    return _report('characteristic_counts', context, seed, [], 0.0 if found == expected else 1.0, 0.0, started,
                   {'even': found[0], 'odd': found[1]})
