"""Exceptions raised by eigenbath."""


class DomainError(ValueError):
    """An input lies outside the domain of an operation."""


class ResourceError(RuntimeError):
    """A request exceeds the resource guard (e.g. too many spins)."""


class ConfigError(ValueError):
    """A run configuration is invalid."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field
