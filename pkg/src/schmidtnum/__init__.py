"""Certified Schmidt-number bounds for bipartite and multipartite states."""

from .certify import Budget, SnBound, bsn_bounds, sn_bounds
from .errors import CapacityError, InputError, PreconditionError, RegistryError, SchmidtError
from .tensor_core import Bipartition, DensityOp, Operator, PureState

__version__ = "0.1.0"

__all__ = [
    "Bipartition",
    "Budget",
    "CapacityError",
    "DensityOp",
    "InputError",
    "Operator",
    "PreconditionError",
    "PureState",
    "RegistryError",
    "SchmidtError",
    "SnBound",
    "bsn_bounds",
    "sn_bounds",
]
