"""Exception hierarchy shared by the library and the CLI."""


class NetshieldError(Exception):
    """Base class; ``exit_code`` is what the CLI returns for it."""

    exit_code = 5


class InputError(NetshieldError, ValueError):
    exit_code = 2


class InstanceSyntaxError(InputError):
    """The instance file is not well-formed (bad JSON, wrong field types)."""


class InstanceSemanticError(InputError):
    """The instance file parses but describes an invalid instance."""


class DomainError(NetshieldError, ValueError):
    """A quantity was requested outside the domain where it is defined."""

    exit_code = 2


class PreconditionError(NetshieldError):
    exit_code = 3


class DisconnectedError(PreconditionError):
    """G(empty, .) is disconnected; the exact solver does not handle it."""


class SizeError(PreconditionError):
    """The instance is too large for exhaustive enumeration."""


class GenerationError(PreconditionError):
    """The random generator could not meet its constraints."""


class MismatchError(NetshieldError):
    exit_code = 4


class InternalError(NetshieldError, AssertionError):
    """A reconstructed strategy disagrees with its table value."""

    exit_code = 5
