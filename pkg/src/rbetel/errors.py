"""Exception types shared across the package."""


class InputError(ValueError):
    """Malformed numeric input (non-finite values, wrong shapes, infeasible states)."""


class ConfigurationError(ValueError):
    """Inconsistent model, prior or run configuration."""


class ChainError(RuntimeError):
    """The sampler could not produce a valid chain."""


class DegenerateScaleWarning(UserWarning):
    """A robust scale estimate collapsed to zero."""
