class HycoaError(Exception):
    """Base class for errors raised by the workbench."""


class UnboundNominal(HycoaError):
    pass


class NotPure(HycoaError):
    pass


class ResourceBound(HycoaError):
    """A configured search limit was hit before an answer was found.

    Never a refutation: callers must keep it apart from unsatisfiability.
    """


class ConfigError(HycoaError):
    pass


class UnboundedOperator(HycoaError):
    pass
