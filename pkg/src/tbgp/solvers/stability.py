"""Linear stability of steady states."""

from __future__ import annotations

import numpy as np

from ..linalg import ComplexEigenvalues, generalized_eigenvalues
from .newton import as_assembler


def stability_eigenvalues(model, x, p) -> ComplexEigenvalues:
    """Spectrum of ``lam M z + J z = 0`` with ``M = df/dxdot``, ``J = df/dx`` at ``xdot = 0``."""
    asm = as_assembler(model)
    M = asm.mass_matrix(x, p)
    _, J = asm.jacobian(x, p)
    return generalized_eigenvalues(J, M)


def is_stable(model, x, p) -> bool:
    return stability_eigenvalues(model, x, p).stable


def min_abs_eigenvalue(J) -> float:
    J = np.asarray(J, dtype=float)
    return float(np.min(np.abs(np.linalg.eigvals(J)))) if J.size else 0.0
