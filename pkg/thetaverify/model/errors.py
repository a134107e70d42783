# Copyright (c) 2026, the thetaverify authors
# All rights reserved.
#
# Use of this source code is governed by the BSD 3-clause license found in
# the LICENSE file at the root of this repository.

"""
Exceptions raised by the thetaverify model.

Everything derives from ThetaVerifyError so the command-line layer can turn any
model failure into a report entry and an exit code.
"""


class ThetaVerifyError(Exception):
    """Base class of every error raised by thetaverify."""


# Configuration.

class ConfigError(ThetaVerifyError):
    """The run configuration is malformed. `field` names the offending key."""

    def __init__(self, field, message):
        super(ConfigError, self).__init__('{}: {}'.format(field, message))
        self.field = field


# Curves and periods.

class CurveError(ThetaVerifyError):
    pass


class WrongDegree(CurveError):
    pass


class NotSquarefree(CurveError):
    pass


class EvaluationAtBranchPoint(CurveError):
    pass


class PathTooCloseToBranchPoint(CurveError):
    pass


class NumericalError(ThetaVerifyError):
    pass


class QuadratureNotConverged(NumericalError):
    pass


class IllConditionedAPeriods(NumericalError):
    pass


class InvalidTau(NumericalError):
    pass


class RadiusOverflow(NumericalError):
    pass


class InconsistentCover(NumericalError):
    """Differentials of a double cover do not satisfy the pullback relations to the expected accuracy."""


# Jacobian and prime form.

class JacobianError(ThetaVerifyError):
    pass


class PathDegenerate(JacobianError):
    pass


class RiemannVectorAmbiguous(JacobianError):
    pass


class IndeterminateMembership(JacobianError):
    pass


class SamplingExhausted(JacobianError):
    pass


class NoNonsingularOddCharacteristic(JacobianError):
    pass


class HalfDiffVanishes(JacobianError):
    pass


# Identities.

class IdentityError(ThetaVerifyError):
    pass


class DenominatorOnThetaDivisor(IdentityError):
    """A theta value in a denominator lies on or near the theta divisor; resample."""


class DiagonalEvaluation(IdentityError):
    pass


class WeightLedgerMismatch(IdentityError):
    """Both sides of an identity carry different half-differential weights."""


class DegreeTooSmall(IdentityError):
    pass


class NonSquareBlocks(IdentityError):
    pass


class NotEvenPartition(IdentityError):
    pass


class UnsupportedSplit(NotEvenPartition):
    """The factor split is even but not of the (quadratic, odd) shape handled here."""


class NotImplementedStratum(IdentityError, NotImplementedError):
    """Requested bundle lies outside the split stratum; no analytic expression is known."""
