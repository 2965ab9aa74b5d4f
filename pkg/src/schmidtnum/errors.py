"""Exception hierarchy shared by the library and the command line."""


class SchmidtError(Exception):
    """Base class for every error raised by :mod:`schmidtnum`."""


class InputError(SchmidtError, ValueError):
    """Malformed arguments: dimension mismatch, bad permutation, bad parameter."""


class CapacityError(SchmidtError):
    """Ambient dimension beyond the configured maximum."""


class RegistryError(SchmidtError, KeyError):
    """Unknown constructor name."""


class PreconditionError(SchmidtError):
    """An operation was called outside the regime where its result is meaningful."""
