"""Graph-based assembly: fields, evaluators, the field manager and seed/extract."""

from .assembler import Assembler
from .evaluation import (
    ALL_EVALUATION_TYPES,
    DETERMINISTIC_TYPES,
    EvaluationType,
    NonFiniteError,
    SeedError,
    Workset,
    extract,
    scalar_zero,
    seed,
)
from .fields import DUMMY, SCALAR, DataLayout, FieldTag, MdField, UnboundFieldError, vector_layout
from .gather import Gather, Scatter
from .manager import (
    AssemblyError,
    ContiguousArena,
    CycleError,
    DuplicateProducerError,
    Evaluator,
    EvaluatorError,
    FieldManager,
    FunctionEvaluator,
    GraphCompiledError,
    SimpleAllocator,
    UnmetDependencyError,
)

__all__ = [
    "ALL_EVALUATION_TYPES",
    "Assembler",
    "AssemblyError",
    "ContiguousArena",
    "CycleError",
    "DETERMINISTIC_TYPES",
    "DUMMY",
    "DataLayout",
    "DuplicateProducerError",
    "EvaluationType",
    "Evaluator",
    "EvaluatorError",
    "FieldManager",
    "FieldTag",
    "FunctionEvaluator",
    "Gather",
    "GraphCompiledError",
    "MdField",
    "NonFiniteError",
    "SCALAR",
    "Scatter",
    "SeedError",
    "SimpleAllocator",
    "UnboundFieldError",
    "UnmetDependencyError",
    "Workset",
    "extract",
    "scalar_zero",
    "seed",
    "vector_layout",
]
