"""Model contract and the CSTR models."""

from .base import DaeModel, FunctionModel, register_leaves, register_outputs
from .cstr import (
    CSTR_EDGES,
    FULL_PARAMS,
    CstrFullModel,
    CstrNondimModel,
    build_cstr_graph,
    count_steady_states,
    multiplicity_scan,
    multiplicity_window,
    reduced_steady_residual,
)

__all__ = [
    "CSTR_EDGES",
    "FULL_PARAMS",
    "CstrFullModel",
    "CstrNondimModel",
    "DaeModel",
    "FunctionModel",
    "build_cstr_graph",
    "count_steady_states",
    "multiplicity_scan",
    "multiplicity_window",
    "reduced_steady_residual",
    "register_leaves",
    "register_outputs",
]
