class InvalidInputError(ValueError):
    """Raised for non-finite or out-of-range arguments."""


class ConstraintError(ValueError):
    """Raised when a ConstraintSpec is inconsistent."""


class ConfigError(ValueError):
    """Raised for invalid optimizer or experiment configuration."""
