"""Exception types shared across the package."""


class PermlatError(Exception):
    """Base class for all package errors."""


class NotAPGroup(PermlatError):
    """The generated group order has a prime factor other than p."""


class CapExceeded(PermlatError):
    """A configured size bound (group order, subgroup count) was exceeded."""


class InvalidTable(PermlatError):
    """A multiplication table fails the group axioms."""


class NotNormal(PermlatError):
    """Operation requires a normal subgroup."""


class NotNested(PermlatError):
    """Operation requires nested subgroups M <= N."""


class BadModulus(PermlatError):
    """Modulus is not a prime power."""


class MixedRing(PermlatError):
    """Modules over different rings cannot be combined."""


class NotIdempotent(PermlatError):
    """Input endomorphism is not idempotent mod p."""


class NoConvergence(PermlatError):
    """Idempotent lifting failed to stabilize (internal error)."""


class CertificationFailed(PermlatError):
    """Indecomposability certification was inconclusive (internal error)."""


class CrossCheckMismatch(PermlatError):
    """Theorem verdict disagrees with direct recognition (implementation bug)."""


class RestrictionNotPermutation(PermlatError):
    """Operation requires the restriction to be a permutation module."""


class TargetNotPermutation(PermlatError):
    """Operation requires a recognized permutation module as target."""


class TrivialGroup(PermlatError):
    """Operation requires a nontrivial group."""


class ParseError(PermlatError):
    """Malformed input file."""


class ValidationError(PermlatError):
    """Input module fails validation (action law, invertibility)."""


class SubgroupResolutionError(PermlatError):
    """A subgroup specification does not resolve to a subgroup."""


class ParameterError(PermlatError):
    """Invalid generator parameters."""


class PrecisionLoss(UserWarning):
    """Reducing a finite module below its own torsion exponent."""
