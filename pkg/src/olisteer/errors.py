"""Shared exception types."""


class ContractViolation(ValueError):
    """An operation was called with inputs violating its preconditions."""


class InsufficientPairsError(ContractViolation):
    """Fewer than two items were supplied where a pair set is required."""


class DegenerateLayoutError(ContractViolation):
    """All supplied positions coincide; the expressed distances carry no information."""


class InsufficientAnchorsError(ContractViolation):
    """Rigid alignment needs at least two anchor points."""


class UnknownItemError(KeyError):
    """Referenced item id is not part of the session dataset."""


class UnknownDatasetError(KeyError):
    """Dataset reference could not be resolved."""


class DatasetFormatError(ValueError):
    """A feature file or manifest failed validation."""


class ChecksumMismatchError(DatasetFormatError):
    """Matrix file bytes do not match the manifest checksum."""
