"""Exception types raised across the package."""


class InvalidParameterError(ValueError):
    """A numeric or structural argument is outside its admissible range."""


class EdgeListParseError(ValueError):
    """Malformed edge-list input; ``lineno`` is 1-based."""

    def __init__(self, message, lineno=None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


class EmptyGraphError(ValueError):
    pass


class ConfigError(ValueError):
    """Sweep configuration could not be parsed or validated."""

    def __init__(self, message, field=None):
        self.field = field
        if field is not None:
            message = f"{field}: {message}"
        super().__init__(message)


class NonTerminationError(RuntimeError):
    pass
