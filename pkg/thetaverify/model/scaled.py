# Copyright (c) 2026, the thetaverify authors
# All rights reserved.
#
# Use of this source code is governed by the BSD 3-clause license found in
# the LICENSE file at the root of this repository.

"""
Overflow-safe complex numbers.

A ScaledComplex stores value = mantissa * exp(exponent) with a complex mantissa
of modulus in [1, 2) (or exactly zero) and a real exponent on the natural-log
scale. Theta quotients routinely leave the double range, so every theta value,
prime form and determinant in the model travels in this form and only the
final residuals are brought back to ordinary floats.
"""

import cmath
import math

import mpmath
import numpy as np

LN2 = math.log(2.0)


class ScaledComplex(object):
    """An extended-range complex scalar, mantissa * exp(exponent)."""

    __slots__ = ('mantissa', 'exponent')

    def __init__(self, mantissa, exponent=0.0):
        """
        Build a normalized value.

        :param complex mantissa: Any finite complex number.
        :param float   exponent: Natural-log scale exponent added to the mantissa's own size.
        """
        mantissa = complex(mantissa)
        exponent = float(exponent)
        if mantissa == 0 or not math.isfinite(exponent) and exponent < 0:
            self.mantissa = 0j
            self.exponent = 0.0
            return
        assert cmath.isfinite(mantissa), 'Mantissa must be finite.'
        assert math.isfinite(exponent), 'Exponent must be finite.'

        _, binary_exp = math.frexp(abs(mantissa))
        shift = binary_exp - 1
        self.mantissa = complex(math.ldexp(mantissa.real, -shift), math.ldexp(mantissa.imag, -shift))
        self.exponent = exponent + shift * LN2

    @classmethod
    def from_log(cls, log_value):
        """Return exp(log_value) for a complex logarithm, without materializing it."""
        log_value = complex(log_value)
        if not math.isfinite(log_value.real):
            assert log_value.real < 0, 'Logarithm overflows to +inf.'
            return cls(0)
        return cls(cmath.exp(1j * log_value.imag), log_value.real)

    @classmethod
    def zero(cls):
        return cls(0)

    @classmethod
    def one(cls):
        return cls(1)

    @property
    def is_zero(self):
        return self.mantissa == 0

    def log(self):
        """Principal complex logarithm."""
        if self.is_zero:
            return complex(-math.inf, 0.0)
        return cmath.log(self.mantissa) + self.exponent

    def log_abs(self):
        if self.is_zero:
            return -math.inf
        return math.log(abs(self.mantissa)) + self.exponent

    def to_complex(self):
        """Ordinary complex value; overflows to inf or underflows to 0 outside the double range."""
        if self.is_zero:
            return 0j
        if self.exponent > 709.0:
            return complex(math.copysign(math.inf, self.mantissa.real) if self.mantissa.real else 0.0,
                           math.copysign(math.inf, self.mantissa.imag) if self.mantissa.imag else 0.0)
        return self.mantissa * math.exp(self.exponent)

    def conjugate(self):
        return ScaledComplex(self.mantissa.conjugate(), self.exponent)

    def __neg__(self):
        return ScaledComplex(-self.mantissa, self.exponent)

    def __mul__(self, other):
        other = as_scaled(other)
        return ScaledComplex(self.mantissa * other.mantissa, self.exponent + other.exponent)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = as_scaled(other)
        if other.is_zero:
            raise ZeroDivisionError('Division by a scaled zero.')
        return ScaledComplex(self.mantissa / other.mantissa, self.exponent - other.exponent)

    def __rtruediv__(self, other):
        return as_scaled(other) / self

    def __add__(self, other):
        other = as_scaled(other)
        if self.is_zero:
            return other
        if other.is_zero:
            return self
        top = max(self.exponent, other.exponent)
        total = (self.mantissa * math.exp(self.exponent - top)
                 + other.mantissa * math.exp(other.exponent - top))
        return ScaledComplex(total, top)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-as_scaled(other))

    def __rsub__(self, other):
        return as_scaled(other) - self

    def __pow__(self, power):
        assert int(power) == power, 'Only integer powers are supported.'
        power = int(power)
        if power == 0:
            return ScaledComplex(1)
        if self.is_zero:
            if power < 0:
                raise ZeroDivisionError('Negative power of a scaled zero.')
            return ScaledComplex(0)
        if abs(power) <= 64:
            return ScaledComplex(self.mantissa ** power, self.exponent * power)
        return ScaledComplex.from_log(power * self.log())

    def __repr__(self):
        return 'ScaledComplex({!r}, {!r})'.format(self.mantissa, self.exponent)

    def __str__(self):
        return '({} + {}j)'.format(*self.decimal())

    def decimal(self, digits=15):
        """[real, imag] decimal strings that survive exponents outside the double range."""
        if self.is_zero:
            return ['0.0', '0.0']
        value = mpmath.mpc(self.mantissa.real, self.mantissa.imag) * mpmath.exp(self.exponent)
        return [mpmath.nstr(value.real, digits), mpmath.nstr(value.imag, digits)]

    def to_json(self):
        """[mantissa.real, mantissa.imag, exponent, decimal] as used by the report."""
        return [self.mantissa.real, self.mantissa.imag, self.exponent, self.decimal()]


def as_scaled(value):
    if isinstance(value, ScaledComplex):
        return value
    return ScaledComplex(value)


def scaled_product(values):
    result = ScaledComplex(1)
    for value in values:
        result = result * value
    return result


def relative_residual(lhs, rhs):
    """|lhs - rhs| / max(|lhs|, |rhs|), computed without leaving scaled form."""
    lhs = as_scaled(lhs)
    rhs = as_scaled(rhs)
    if lhs.is_zero and rhs.is_zero:
        return 0.0
    scale = max(lhs.log_abs(), rhs.log_abs())
    return math.exp((lhs - rhs).log_abs() - scale)


def scaled_det(rows):
    """
    Determinant of a square matrix of ScaledComplex entries.

    The largest exponent of every row is factored out first, so the remaining
    complex matrix has entries of modulus below 2; numpy's LU with partial
    pivoting (slogdet) does the rest.

    :param list rows: Square list of lists of ScaledComplex (or plain numbers).
    :return ScaledComplex: The determinant.
    """
    size = len(rows)
    if size == 0:
        return ScaledComplex(1)
    matrix = np.zeros((size, size), dtype=complex)
    row_exponents = []
    for i, row in enumerate(rows):
        assert len(row) == size, 'Matrix must be square.'
        row = [as_scaled(entry) for entry in row]
        live = [entry.exponent for entry in row if not entry.is_zero]
        if not live:
            return ScaledComplex(0)
        top = max(live)
        row_exponents.append(top)
        for j, entry in enumerate(row):
            if not entry.is_zero:
                matrix[i, j] = entry.mantissa * math.exp(entry.exponent - top)

    sign, log_abs = np.linalg.slogdet(matrix)
    if sign == 0:
        return ScaledComplex(0)
    return ScaledComplex.from_log(cmath.log(sign) + log_abs + sum(row_exponents))
