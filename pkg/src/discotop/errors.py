"""Exception types shared across the toolkit."""


class DiscoTopError(Exception):
    """Base class for all toolkit errors."""


class InvalidArgument(DiscoTopError, ValueError):
    pass


class MalformedComplex(DiscoTopError, ValueError):
    pass


class InvalidConfiguration(DiscoTopError, ValueError):
    pass


class NotInjective(DiscoTopError, ValueError):
    """Raised when a sampled function identifies two points of a compared pair."""

    def __init__(self, message, pair=None):
        super().__init__(message)
        self.pair = pair


class NotAlmostRInjective(DiscoTopError, ValueError):
    """Raised when a configuration is collapsed to the zero tuple."""

    def __init__(self, message, configuration=None):
        super().__init__(message)
        self.configuration = configuration


class InapplicableTheorem(DiscoTopError, ValueError):
    """Raised by the bound oracle when a theorem precondition fails."""

    def __init__(self, message, condition=None):
        super().__init__(message)
        self.condition = condition


class ConstructionFailed(DiscoTopError, RuntimeError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness
