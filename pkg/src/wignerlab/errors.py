"""Exception types shared across the package."""


class WignerlabError(Exception):
    """Base class for all errors raised by this package."""


class ConfigurationError(WignerlabError):
    """Invalid user-supplied parameters (mesh sizes, quadrature, config files)."""


class ContractError(WignerlabError):
    """A library call violated an API precondition (shape or mesh mismatch)."""


class ResourceError(WignerlabError):
    """An operation would exceed a guarded resource limit."""


class SolverError(WignerlabError):
    """The linear solver failed or produced an unacceptable residual."""
