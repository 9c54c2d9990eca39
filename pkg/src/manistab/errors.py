"""Exception hierarchy.

Every error raised on purpose by the library derives from ``ManistabError``
so callers (and the CLI) can tell our failures apart from programming bugs.
"""


class ManistabError(Exception):
    """Base class for all library errors."""


class ConfigurationError(ManistabError):
    """An option, flag or parameter value is not supported."""


class ParseError(ManistabError):
    """An input file could not be parsed."""

    def __init__(self, message, path=None, line=None):
        where = ""
        if path is not None:
            where = f"{path}:{line}: " if line is not None else f"{path}: "
        super().__init__(where + message)
        self.path = path
        self.line = line


class DataError(ManistabError):
    """Numeric input is malformed (non-finite entries, wrong shape)."""


class ContractError(ManistabError):
    """Arguments are individually valid but do not fit together."""


class DomainError(ManistabError):
    """A formula is evaluated outside the domain where it is defined."""


class PreconditionError(ManistabError):
    """A theorem precondition does not hold (e.g. epsilon >= alpha)."""


class InvariantError(ManistabError):
    """An internal invariant was breached. Indicates a bug."""
