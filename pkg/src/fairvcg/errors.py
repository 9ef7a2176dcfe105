"""Exception types shared across the package."""


class ConfigError(ValueError):
    """Raised when a configuration value is out of its documented range."""


class ContractViolation(ValueError):
    """Raised when a caller hands an operation data that breaks its preconditions."""
