# Copyright (c) 2026, the thetaverify authors
# All rights reserved.
#
# Use of this source code is governed by the BSD 3-clause license found in
# the LICENSE file at the root of this repository.


"""
This module receives user input from __main__.py and runs the verification suites of a run configuration.

"""

import dataclasses
import json
import logging
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from thetaverify import thetaverify_version
from thetaverify.model import properties
from thetaverify.model.covering import (DirectImageGauge, build_double_cover, check_direct_image,
                                        check_inverse_image, check_prime_form_pullback,
                                        check_pushforward_degree, sample_cover_points)
from thetaverify.model.curve import build_curve, period_matrix
from thetaverify.model.errors import (ConfigError, DenominatorOnThetaDivisor, IndeterminateMembership,
                                      SamplingExhausted, ThetaVerifyError)
from thetaverify.model.identities import (FAIL, INDETERMINATE, PASS, BundleTheta, IdentityReport,
                                          SplitBundle, check_addition_formula, check_det_equivalence,
                                          check_szego_identity, indecomposable_bundle)
from thetaverify.model.jacobian import JacobianPoint, sample_regular_configuration
from thetaverify.model.kp import check_kp_identity
from thetaverify.model.primeform import CurveContext
from thetaverify.model.run_config import SUITES, RunConfig
from thetaverify.model.theta import theta_radius

logger = logging.getLogger(__name__)

EXIT_PASS = 0
EXIT_FAILURE = 1
EXIT_ERROR = 2

MAX_REJECTIONS = 1000

PLANS = {
    'fay': 'addition formula, rank {r}, {m} point pairs, {samples} samples',
    'szego': 'Szego determinant identity, rank {r}, {m} point pairs, {samples} samples',
    'detcmp': 'determinant equivalence, rank {r}, {m} point pairs, {samples} samples',
    'kp': 'KP lambda constancy, rank {r}, pole order {n}, {samples} samples',
    'covering': 'double cover pullback, direct and inverse image, degree formula, {samples} samples',
    'properties': 'theta parity, quasi-periodicity, Abel theorem, prime form, Szego residue',
}


def aggregate(identity, reports):
    """One report per suite entry: the worst sample, with every residual listed in details."""
    worst = max(reports, key=lambda report: report.residual)
    details = dict(worst.details)
    details['samples_run'] = len(reports)
    details['residuals'] = [report.residual for report in reports]
    verdict = PASS if all(report.passed for report in reports) else FAIL
    return dataclasses.replace(worst, identity=identity, verdict=verdict, details=details,
                               wall_time=sum(report.wall_time for report in reports))


def error_report(identity, context, seed, tolerance, error, started):
    verdict = INDETERMINATE if isinstance(error, (SamplingExhausted, IndeterminateMembership)) else FAIL
    digest = context.curve.digest() if context is not None else None
    return IdentityReport(identity, digest, seed, [], None, None, None, tolerance, verdict,
                          time.perf_counter() - started, {}, '{}: {}'.format(type(error).__name__, error))


class PerformCommand(object):
    """Runs the verification harness for the `verify`, `describe` and `version` commands."""

    def log(self, args, msg):
        """Print log to stdout unless user has specified --quiet."""
        if args.quiet:
            pass
        else:
            print(msg)

    def load_config(self, args):
        """Read the configuration file and apply the command-line overrides."""
        config = RunConfig.from_file(args.config)
        return config.override(seed=args.seed, tol=args.tol, suites=args.suites, output=args.output)

    def build(self, config):
        curve = build_curve(config.curve)
        period_data = period_matrix(curve, config.quad_tol, config.theta_tol)
        return CurveContext(curve, period_data)

    # Commands.

    def verify(self, args):
        """Run every configured suite and write the report; returns the exit code."""
        config = None
        try:
            config = self.load_config(args)
            if not config.suites:
                self.log(args, 'nothing to run')
                self.write_report(args, config, self.document(config, None, []))
                return EXIT_PASS
            context = self.build(config)
        except ThetaVerifyError as error:
            self.log(args, 'Error: {}'.format(error))
            self.write_report(args, config, self.document(config, None, [], error))
            return EXIT_ERROR

        self.log(args, 'Curve of genus {} ({})'.format(context.genus, context.curve.digest()))
        entries = []
        for suite in config.suites:
            reports = getattr(self, '_run_' + suite)(context, config)
            for report in reports:
                residual = 'n/a' if report.residual is None else '{:.3e}'.format(report.residual)
                self.log(args, '{:<12} {:<26} {:<14} residual {}'.format(suite, report.identity, report.verdict,
                                                                      residual))
                entries.append((suite, report))

        document = self.document(config, context, entries)
        self.write_report(args, config, document)
        summary = document['summary']
        self.log(args, 'pass {pass}, fail {fail}, indeterminate {indeterminate}'.format(**summary))
        return EXIT_PASS if summary['fail'] == 0 and summary['indeterminate'] == 0 else EXIT_FAILURE

    def describe(self, args):
        """Print one plan line per suite; computes periods but evaluates no identity."""
        try:
            config = self.load_config(args)
            if not config.suites:
                self.log(args, 'nothing to run')
                return EXIT_PASS
            curve = build_curve(config.curve)
            tau = period_matrix(curve, config.quad_tol, config.theta_tol).tau
            radius = theta_radius(tau, config.theta_tol)
        except ThetaVerifyError as error:
            self.log(args, 'Error: {}'.format(error))
            return EXIT_ERROR

        estimate = tau.point_estimate(radius)
        n = config.n if config.n is not None else curve.genus - 1 + config.m
        for suite in config.suites:
            plan = PLANS[suite].format(r=config.r, m=config.m, n=n, samples=config.sample_count)
            self.log(args, '{}: {}; genus {}, theta radius {:.3f} (~{:.0f} lattice points)'.format(
                suite, plan, curve.genus, radius, estimate))
        return EXIT_PASS

    def version(self, args):
        self.log(args, 'thetaverify version: {}'.format(thetaverify_version.THETAVERIFY_VERSION))
        return EXIT_PASS

    # Reports.

    def document(self, config, context, entries, error=None):
        counts = {PASS: 0, FAIL: 0, INDETERMINATE: 0}
        suites = []
        for suite, report in entries:
            counts[report.verdict] += 1
            entry = report.to_json()
            entry['suite'] = suite
            suites.append(entry)
        document = {
            'version': thetaverify_version.THETAVERIFY_VERSION,
            'config_echo': config.echo() if config is not None else None,
            'curve': None if context is None else {'genus': context.genus,
                                                   'tau_digest': context.tau.digest()},
            'suites': suites,
            'summary': {'pass': counts[PASS], 'fail': counts[FAIL], 'indeterminate': counts[INDETERMINATE]},
        }
        if error is not None:
            document['error'] = {'type': type(error).__name__, 'message': str(error)}
            if isinstance(error, ConfigError):
                document['error']['field'] = error.field
        return document

    def write_report(self, args, config, document):
        path = args.output or (config.output if config is not None else None)
        if not path:
            return
        with open(path, 'w') as report_file:
            json.dump(document, report_file, indent=2, sort_keys=True)
            report_file.write('\n')

    # Suites.

    def _map(self, config, function, count):
        """Run function over sample indices, on config.workers threads when more than one."""
        if config.workers > 1:
            with ThreadPoolExecutor(max_workers=config.workers) as pool:
                return list(pool.map(function, range(count)))
        return [function(s) for s in range(count)]

    def _guarded(self, identity, context, config, tolerance, run):
        started = time.perf_counter()
        try:
            return run()
        except ThetaVerifyError as error:
            logger.debug('%s stopped: %s', identity, error)
            return [error_report(identity, context, config.seed, tolerance, error, started)]

    def _bundle(self, context, config, rng):
        if config.bundle == 'stable':
            indecomposable_bundle(config.r, config.degree)
        for attempt in range(MAX_REJECTIONS):
            bundle = SplitBundle.random(context.genus, config.r, rng, config.degree)
            try:
                BundleTheta(context, bundle)
                return bundle
            except (DenominatorOnThetaDivisor, IndeterminateMembership) as error:
                logger.debug('Rejected bundle %d: %s', attempt, error)
        raise SamplingExhausted('No bundle off the theta divisor after {} attempts'.format(MAX_REJECTIONS))

    def _regular(self, context):
        def constraint(points):
            for point in points:
                context.abel(point)
                context.half_diff(point)
        return constraint

    def _fay_family(self, suite, identity, check, context, config):
        index = SUITES.index(suite)

        def run():
            bundle = self._bundle(context, config, np.random.default_rng([config.seed, index]))

            def sample(s):
                seed = [config.seed, index, s]
                points = sample_regular_configuration(context.curve, config.m, seed, self._regular(context))
                return check(context, bundle, points, config.identity_tol, seed=seed)

            return [aggregate(identity, self._map(config, sample, config.sample_count))]

        return self._guarded(identity, context, config, config.identity_tol, run)

    def _run_fay(self, context, config):
        return self._fay_family('fay', 'addition_formula', check_addition_formula, context, config)

    def _run_szego(self, context, config):
        return self._fay_family('szego', 'szego_identity', check_szego_identity, context, config)

    def _run_detcmp(self, context, config):
        return self._fay_family('detcmp', 'det_equivalence', check_det_equivalence, context, config)

    def _run_kp(self, context, config):
        n = config.n if config.n is not None else context.genus - 1 + config.m

        def run():
            return [check_kp_identity(context, config.r, n, config.sample_count,
                                      [config.seed, SUITES.index('kp')], config.kp_tol)]

        return self._guarded('kp_identity', context, config, config.kp_tol, run)

    def _run_covering(self, context, config):
        index = SUITES.index('covering')
        tolerance = config.cover_tol
        state = {}

        def cover():
            if 'cover' not in state:
                state['cover'] = build_double_cover(context, (config.cover_f1, config.cover_f2), config.seed)
            return state['cover']

        def constraint(points):
            for point in points:
                cover().context.half_diff(point)
                cover().context.half_diff(cover().register_deck_lift(point))

        def twist():
            rng = np.random.default_rng([config.seed, index, 3, 0])
            for attempt in range(MAX_REJECTIONS):
                vec = rng.uniform(-0.5, 0.5, context.genus) + 1j * rng.uniform(-0.5, 0.5, context.genus)
                candidate = JacobianPoint.of(vec, 0)
                try:
                    DirectImageGauge(cover(), candidate)
                    return candidate
                except (DenominatorOnThetaDivisor, IndeterminateMembership) as error:
                    logger.debug('Rejected twist %d: %s', attempt, error)
            raise SamplingExhausted('No twist off both theta divisors after {} attempts'.format(MAX_REJECTIONS))

        def pullback():
            seed = [config.seed, index, 0, 0]
            points = sample_cover_points(cover(), 2 * (config.sample_count + 1), seed, constraint)
            return [check_prime_form_pullback(cover(), points, tolerance, seed=seed)]

        def images(identity, check, stream):
            def run():
                t = twist()

                def sample(s):
                    seed = [config.seed, index, stream, s]
                    points = sample_cover_points(cover(), 2 * config.m, seed, constraint)
                    return check(cover(), t, points, tolerance, seed=seed)

                return [aggregate(identity, [sample(s) for s in range(config.sample_count)])]
            return run

        def degrees():
            started = time.perf_counter()
            reports = []
            for d_tilde in (0, 3):
                holds = check_pushforward_degree(cover(), d_tilde, 1)
                reports.append(IdentityReport('pushforward_degree', cover().curve.digest(), None, [], None, None,
                                              0.0 if holds else 1.0, 0.0, PASS if holds else FAIL,
                                              time.perf_counter() - started,
                                              {'d_tilde': d_tilde, 'r_tilde': 1, 'cover_genus': cover().cover_genus}))
            return [aggregate('pushforward_degree', reports)]

        entries = []
        entries += self._guarded('prime_form_pullback', context, config, tolerance, pullback)
        entries += self._guarded('direct_image', context, config, tolerance,
                                 images('direct_image', check_direct_image, 1))
        entries += self._guarded('inverse_image', context, config, tolerance,
                                 images('inverse_image', check_inverse_image, 2))
        entries += self._guarded('pushforward_degree', context, config, 0.0, degrees)
        return entries

    def _run_properties(self, context, config):
        seed = config.seed
        tolerance = config.identity_tol
        checks = [
            ('theta_parity', lambda: properties.check_theta_parity(context, seed, tolerance)),
            ('quasi_periodicity', lambda: properties.check_quasi_periodicity(context, seed, tolerance)),
            ('abel_theorem', lambda: properties.check_abel_theorem(context, seed)),
            ('prime_form_antisymmetry', lambda: properties.check_prime_form_antisymmetry(context, seed)),
            ('prime_form_zero', lambda: properties.check_prime_form_zero(context, seed)),
            ('szego_residue', lambda: properties.check_szego_residue(
                context, self._bundle(context, config, np.random.default_rng([seed, SUITES.index('properties')])),
                seed)),
            ('characteristic_counts', lambda: properties.check_characteristic_counts(context, seed)),
        ]
        entries = []
        for identity, check in checks:
            entries += self._guarded(identity, context, config, tolerance, lambda: [check()])
        return entries
