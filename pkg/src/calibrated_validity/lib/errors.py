"""Exceptions raised by the validation library
"""


class ValidityError(Exception):
    """Base class for all errors raised by calibrated_validity
    """


class InvalidDataError(ValidityError, ValueError):
    """Data or dissimilarities that break the data model, e.g. non-finite
    values or an asymmetric matrix
    """


class DimensionError(ValidityError, ValueError):
    """Two objects that should describe the same n objects do not
    """


class ContractError(ValidityError, ValueError):
    """A precondition of an operation was violated by the caller
    """


class ConfigError(ValidityError, ValueError):
    """A run configuration field is missing, unknown or out of range
    """


class ResampleError(ValidityError, RuntimeError):
    """A resampling or rejection loop hit its retry cap
    """
