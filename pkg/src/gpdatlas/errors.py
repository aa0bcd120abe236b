"""Exception types raised across the package."""


class GpdAtlasError(Exception):
    """Base class for all package errors."""


class NotAGroup(GpdAtlasError):
    pass


class NotABijection(GpdAtlasError):
    pass


class GroupTooLarge(GpdAtlasError):
    pass


class NotASubgroup(GpdAtlasError):
    pass


class NotAnAction(GpdAtlasError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class EmptyObjectSet(GpdAtlasError):
    pass


class ObjectNotFound(GpdAtlasError):
    pass


class InvalidAtlas(GpdAtlasError):
    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class NotIrreducible(GpdAtlasError):
    pass


class EmptyComplex(GpdAtlasError):
    pass


class ComplexTooLarge(GpdAtlasError):
    pass


class NormalizationFailure(GpdAtlasError):
    pass


class BasePointNotFound(GpdAtlasError):
    pass


class TreeMismatch(GpdAtlasError):
    pass


class PhiNotDiscrete(GpdAtlasError):
    pass


class SpecError(GpdAtlasError):
    """Malformed atlas specification file."""
