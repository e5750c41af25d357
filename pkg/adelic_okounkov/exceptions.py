# This file is part of AdelicOkounkov.
# Code licensed under the GNU General Public License v3 or later.

"""
Various exceptions for working with adelic_okounkov.

Classes:

    * ``AdelicOkounkovError``

        * ``LatticeError``

            * ``UnboundedBodyError``
            * ``InstanceTooLargeError``
            * ``HullRankError``
            * ``DimensionMismatchError``

        * ``ModelError``

            * ``ModelFormatError``
            * ``NonConcaveWeightError``
            * ``DegreeError``
            * ``UnsupportedOperationError``
            * ``NotNefError``

        * ``SectionError``

            * ``ZeroSectionError``
            * ``InadmissibleSectionError``

        * ``FlagError``

            * ``FaceMismatchError``
            * ``BadPrimeError``

        * ``VerificationError``

            * ``AsymmetricSetError``
            * ``NotSurjectiveError``
            * ``DomainExitError``
            * ``InfeasibleGridError``

        * ``ConfigError``

            * ``InvalidLevelRangeError``
            * ``InvalidFaceError``
            * ``InvalidToleranceError``

.. image:: classes_exceptions.svg
    :width: 100%
"""


class AdelicOkounkovError(Exception):
    """Base class of every error raised by ``adelic_okounkov``."""


class LatticeError(AdelicOkounkovError):
    """Bad input for an exact lattice computation."""


class UnboundedBodyError(LatticeError):
    """Counting was requested on an unbounded CL-subset."""


class InstanceTooLargeError(LatticeError):
    """Exact enumeration would visit too many candidate points."""


class HullRankError(LatticeError):
    """Exact facet enumeration requested in too high a rank."""


class DimensionMismatchError(LatticeError):
    """Vectors or bodies of different ambient rank were combined."""


class ModelError(AdelicOkounkovError):
    """Bad diagonal model."""


class ModelFormatError(ModelError):

    """
    Malformed model file.

    ``field`` names the offending entry as a dotted path, ``line`` and
    ``column`` locate JSON syntax errors.
    """

    def __init__(self, message, field=None, line=None, column=None):
        super(ModelFormatError, self).__init__(message)
        self.field = field
        self.line = line
        self.column = column

    def __str__(self):
        message = super(ModelFormatError, self).__str__()
        if self.line is not None:
            return "line {}, column {}: {}".format(self.line, self.column,
                                                   message)
        if self.field is not None:
            return "{}: {}".format(self.field, message)
        return message


class NonConcaveWeightError(ModelError):
    """Weight function is not a minimum of affine functions."""


class DegreeError(ModelError):
    """Degree out of the supported range."""


class UnsupportedOperationError(ModelError):
    """Model operation that is not exact on the given data."""


class NotNefError(ModelError):
    """Operation requires a nef model."""


class SectionError(AdelicOkounkovError):
    """Bad section."""


class ZeroSectionError(SectionError):
    """The zero section has no valuation."""


class InadmissibleSectionError(SectionError):
    """Section does not fit the model's degree or face."""


class FlagError(AdelicOkounkovError):
    """Bad flag."""


class FaceMismatchError(FlagError):
    """Flag and section or face live on different faces."""


class BadPrimeError(FlagError):
    """Flag prime is not prime or carries a nontrivial weight."""


class VerificationError(AdelicOkounkovError):
    """Check inputs outside the check's hypotheses."""


class AsymmetricSetError(VerificationError):
    """Set is not closed under negation."""


class NotSurjectiveError(VerificationError):
    """Lattice map is not surjective."""


class DomainExitError(VerificationError):
    """Twisted model left the domain where the estimate is defined."""


class InfeasibleGridError(VerificationError):
    """Grid for the concave program is empty."""


class ConfigError(AdelicOkounkovError):
    """Bad run configuration."""


class InvalidLevelRangeError(ConfigError):
    """Invalid range of levels m."""


class InvalidFaceError(ConfigError):
    """Invalid coordinate face."""


class InvalidToleranceError(ConfigError):
    """Invalid tolerance."""
