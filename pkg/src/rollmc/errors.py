"""Exception types shared across the package."""


class RollmcError(Exception):
    """Base class for package errors."""


class ContractViolationError(RollmcError):
    """An operation was invoked outside its documented preconditions."""


class DegenerateWeightsError(RollmcError):
    """Reweighting produced an all-zero (or non-finite) weight vector."""


class RestoreError(RollmcError):
    """A persisted database or checkpoint could not be restored."""


class ConfigError(RollmcError):
    """A run configuration file or value is invalid."""


class PhaseBudgetError(RollmcError):
    """The sampler exhausted its tick budget without reaching the accuracy."""
