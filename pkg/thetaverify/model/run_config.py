# Copyright (c) 2026, the thetaverify authors
# All rights reserved.
#
# Use of this source code is governed by the BSD 3-clause license found in
# the LICENSE file at the root of this repository.


"""
Run configuration for the verification harness.

A configuration is a JSON object or flat `key = value` lines with `#` comments,
where values that parse as JSON are taken as JSON and anything else as a plain
string. Polynomials are ascending lists of [re, im] decimal strings:

    curve = [["-1", "0"], ["0", "0"], ["0", "0"], ["0", "0"], ["0", "0"], ["1", "0"]]
    suites = fay, szego
    seed = 7
"""

import json

from thetaverify.model.errors import ConfigError

SUITES = ('fay', 'szego', 'detcmp', 'kp', 'covering', 'properties')
BUNDLE_KINDS = ('split', 'stable')

DEFAULTS = {
    'cover_f1': None,
    'cover_f2': None,
    'suites': ['properties'],
    'r': 1,
    'm': 2,
    'n': None,
    'degree': 0,
    'bundle': 'split',
    'sample_count': 10,
    'theta_tol': 1e-12,
    'quad_tol': 1e-12,
    'identity_tol': 1e-8,
    'kp_tol': 1e-6,
    'cover_tol': 1e-6,
    'workers': 1,
    'output': None,
}

RANGES = {
    'theta_tol': (1e-14, 1e-4),
    'quad_tol': (1e-14, 1e-6),
}


def parse_polynomial(field, value):
    """[[re, im], ...] of decimal strings (or numbers) -> list of complex."""
    if isinstance(value, str):
        try:
            value = json.loads(value)
        except ValueError:
            raise ConfigError(field, 'expected a JSON list of [re, im] pairs')
    if not isinstance(value, list) or not value:
        raise ConfigError(field, 'expected a non-empty list of [re, im] pairs')
    coefficients = []
    for index, pair in enumerate(value):
        if not isinstance(pair, (list, tuple)) or len(pair) != 2:
            raise ConfigError(field, 'coefficient {} is not an [re, im] pair'.format(index))
        try:
            parts = [float(part) for part in pair]
        except (TypeError, ValueError):
            raise ConfigError(field, 'coefficient {} is not a decimal pair: {!r}'.format(index, pair))
        coefficients.append(complex(parts[0], parts[1]))
    return coefficients


def _parse_flat(text):
    values = {}
    for number, line in enumerate(text.splitlines(), 1):
        line = line.split('#', 1)[0].strip()
        if not line:
            continue
        if '=' not in line:
            raise ConfigError('line {}'.format(number), 'expected key = value')
        key, raw = (part.strip() for part in line.split('=', 1))
        try:
            values[key] = json.loads(raw)
        except ValueError:
            values[key] = raw
    return values


def parse_text(text):
    """A dict of raw values from JSON or flat text."""
    stripped = text.strip()
    if stripped.startswith('{'):
        try:
            values = json.loads(stripped)
        except ValueError as error:
            raise ConfigError('config', 'invalid JSON: {}'.format(error))
        if not isinstance(values, dict):
            raise ConfigError('config', 'expected a JSON object')
        return values
    return _parse_flat(text)


def parse_suites(value):
    if isinstance(value, str):
        value = [name.strip() for name in value.split(',') if name.strip()]
    if not isinstance(value, list):
        raise ConfigError('suites', 'expected a list or a comma separated string')
    for name in value:
        if name not in SUITES:
            raise ConfigError('suites', 'unknown suite {!r}; choose from {}'.format(name, ', '.join(SUITES)))
    return list(value)


class RunConfig(object):
    """A validated run configuration."""

    def __init__(self, values):
        unknown = sorted(set(values) - set(DEFAULTS) - {'curve', 'seed'})
        if unknown:
            raise ConfigError(unknown[0], 'unknown key')
        if 'curve' not in values:
            raise ConfigError('curve', 'mandatory')
        if 'seed' not in values:
            raise ConfigError('seed', 'mandatory; runs are never seeded from the clock')

        merged = dict(DEFAULTS)
        merged.update(values)
        self.curve = parse_polynomial('curve', merged['curve'])
        self.cover_f1 = None if merged['cover_f1'] is None else parse_polynomial('cover_f1', merged['cover_f1'])
        self.cover_f2 = None if merged['cover_f2'] is None else parse_polynomial('cover_f2', merged['cover_f2'])
        self.suites = parse_suites(merged['suites'])
        self.seed = self._integer(merged, 'seed', 0)
        self.r = self._integer(merged, 'r', 1)
        self.m = self._integer(merged, 'm', 1)
        self.n = None if merged['n'] is None else self._integer(merged, 'n', 1)
        self.degree = self._integer(merged, 'degree', None)
        self.sample_count = self._integer(merged, 'sample_count', 1)
        self.workers = self._integer(merged, 'workers', 1)
        self.theta_tol = self._tolerance(merged, 'theta_tol')
        self.quad_tol = self._tolerance(merged, 'quad_tol')
        self.identity_tol = self._tolerance(merged, 'identity_tol')
        self.kp_tol = self._tolerance(merged, 'kp_tol')
        self.cover_tol = self._tolerance(merged, 'cover_tol')
        self.bundle = merged['bundle']
        if self.bundle not in BUNDLE_KINDS:
            raise ConfigError('bundle', 'expected one of {}'.format(', '.join(BUNDLE_KINDS)))
        self.output = merged['output']
        if self.output is not None and not isinstance(self.output, str):
            raise ConfigError('output', 'expected a path')
        self._check_cover()

    @classmethod
    def from_text(cls, text):
        return cls(parse_text(text))

    @classmethod
    def from_file(cls, path):
        try:
            with open(path) as config_file:
                text = config_file.read()
        except (IOError, OSError) as error:
            raise ConfigError('config', 'cannot read {}: {}'.format(path, error))
        return cls.from_text(text)

    @staticmethod
    def _integer(values, key, minimum):
        value = values[key]
        if isinstance(value, str):
            try:
                value = int(value.strip())
            except ValueError:
                pass
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(key, 'expected an integer, got {!r}'.format(values[key]))
        if minimum is not None and value < minimum:
            raise ConfigError(key, 'must be at least {}'.format(minimum))
        return value

    @staticmethod
    def _tolerance(values, key):
        try:
            value = float(values[key])
        except (TypeError, ValueError):
            raise ConfigError(key, 'expected a number, got {!r}'.format(values[key]))
        low, high = RANGES.get(key, (0.0, float('inf')))
        if not (value > 0 and low <= value <= high):
            raise ConfigError(key, '{} is outside [{}, {}]'.format(value, low, high))
        return value

    def _check_cover(self):
        if (self.cover_f1 is None) != (self.cover_f2 is None):
            raise ConfigError('cover_f1' if self.cover_f1 is None else 'cover_f2',
                              'cover_f1 and cover_f2 must be given together')
        if 'covering' in self.suites and self.cover_f1 is None:
            raise ConfigError('cover_f1', 'the covering suite needs cover_f1 and cover_f2')

    def override(self, seed=None, tol=None, suites=None, output=None):
        """Apply command-line overrides in place."""
        if seed is not None:
            self.seed = self._integer({'seed': seed}, 'seed', 0)
        if tol is not None:
            self.identity_tol = self._tolerance({'identity_tol': tol}, 'identity_tol')
        if suites is not None:
            self.suites = parse_suites(suites)
            self._check_cover()
        if output is not None:
            self.output = output
        return self

    def echo(self):
        """The normalized configuration, as written into reports; the output path is not part of it."""
        def pairs(coefficients):
            if coefficients is None:
                return None
            return [[repr(c.real), repr(c.imag)] for c in coefficients]

        return {
            'curve': pairs(self.curve),
            'cover_f1': pairs(self.cover_f1),
            'cover_f2': pairs(self.cover_f2),
            'suites': list(self.suites),
            'r': self.r,
            'm': self.m,
            'n': self.n,
            'degree': self.degree,
            'bundle': self.bundle,
            'sample_count': self.sample_count,
            'seed': self.seed,
            'theta_tol': self.theta_tol,
            'quad_tol': self.quad_tol,
            'identity_tol': self.identity_tol,
            'kp_tol': self.kp_tol,
            'cover_tol': self.cover_tol,
            'workers': self.workers,
        }
