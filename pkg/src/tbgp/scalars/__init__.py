"""Scalar types sharing one arithmetic contract.

Generic model code uses ``+ - * /``, ``**`` with a real exponent and the
functions exported here; it then runs unchanged on ``float``, :class:`Dual`
(nestable), :class:`TapeScalar`, :class:`PceScalar` and :class:`OpCounter`.
"""

from ._math import cos, div, exp, is_real, isinf, log, pow, sin, sqrt, value_of
from .dual import Dual, derivative_matrix
from .opcount import OpCounter, OpCounts
from .pce import PceDomainError, PceScalar, galerkin_divide, galerkin_product, multiplication_matrix
from .tape import AdjointTape, TapeRecord, TapeScalar, tape_gradient

__all__ = [
    "AdjointTape",
    "Dual",
    "OpCounter",
    "OpCounts",
    "PceDomainError",
    "PceScalar",
    "TapeRecord",
    "TapeScalar",
    "cos",
    "derivative_matrix",
    "div",
    "exp",
    "galerkin_divide",
    "galerkin_product",
    "is_real",
    "isinf",
    "log",
    "multiplication_matrix",
    "pow",
    "sin",
    "sqrt",
    "tape_gradient",
    "value_of",
]
