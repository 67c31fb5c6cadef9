"""Steady-state sensitivities of responses with respect to parameters."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..assembly import EvaluationType
from ..linalg import SingularMatrixError, lu_factor, lu_solve, lu_solve_transpose
from .newton import as_assembler


@dataclass
class SensitivityResult:
    ds_dp: np.ndarray
    dx_dp: np.ndarray | None
    solves: int
    transpose_solves: int


def _products(model, x, p, params):
    asm = as_assembler(model)
    params = tuple(range(asm.m)) if params is None else tuple(params)
    r = asm.evaluate(EvaluationType.JACOBIAN, asm.workset(x, p))
    fp, gp = asm.param_derivatives(x, p, params)
    F = lu_factor(r["f_jac"])
    if F.singular:
        raise SingularMatrixError("singular Jacobian at the steady state (fold?)")
    return F, r["g_jac"], fp, gp


def forward_sensitivity(model, x, p, params=None) -> SensitivityResult:
    """``dx/dp = -J^{-1} df/dp`` (one solve per parameter), ``ds/dp = g_x dx/dp + g_p``."""
    F, gx, fp, gp = _products(model, x, p, params)
    dx = -lu_solve(F, fp)
    return SensitivityResult(gx @ dx + gp, dx, F.solves, F.transpose_solves)


def adjoint_sensitivity(model, x, p, params=None) -> SensitivityResult:
    """``ds/dp = g_p - (J^{-T} g_x^T)^T df/dp`` (one transpose solve per response)."""
    F, gx, fp, gp = _products(model, x, p, params)
    lam = lu_solve_transpose(F, gx.T)
    return SensitivityResult(gp - lam.T @ fp, None, F.solves, F.transpose_solves)
