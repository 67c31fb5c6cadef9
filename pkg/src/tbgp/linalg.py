"""Small dense linear algebra used by every solver.

Vectors and matrices are plain ``numpy`` arrays (row-major, float64).  The
LU factorization is written out here so that the singularity test and the
solve counters behave exactly as the solvers expect; eigenvalues of the
reduced standard problem are delegated to LAPACK.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np

SINGULAR_RTOL = 1e-14


class SingularMatrixError(ArithmeticError):
    """Raised when a factorization is numerically singular."""


class EigenvalueError(ArithmeticError):
    pass


@dataclass
class LuFactorization:
    """Packed ``PA = LU`` factors with partial pivoting.

    ``lu`` holds the unit-lower factor below the diagonal and ``U`` on and
    above it.  ``perm[i]`` is the original row that ended up in row ``i``.
    ``solves`` counts every solve performed with this factorization, in
    either orientation.
    """

    lu: np.ndarray
    perm: np.ndarray
    singular: bool
    solves: int = field(default=0)
    transpose_solves: int = field(default=0)

    @property
    def n(self) -> int:
        return self.lu.shape[0]


def as_matrix(A) -> np.ndarray:
    A = np.asarray(A, dtype=float)
    if A.ndim != 2:
        raise ValueError(f"expected a 2-d matrix, got shape {A.shape}")
    return A


def lu_factor(A) -> LuFactorization:
    A = as_matrix(A)
    n, m = A.shape
    if n != m:
        raise ValueError(f"lu_factor needs a square matrix, got {n}x{m}")
    lu = A.copy()
    perm = np.arange(n)
    scale = np.max(np.abs(A)) if A.size else 0.0
    tol = SINGULAR_RTOL * scale
    singular = n > 0 and scale == 0.0
    for k in range(n):
        p = k + int(np.argmax(np.abs(lu[k:, k])))
        if p != k:
            lu[[k, p]] = lu[[p, k]]
            perm[[k, p]] = perm[[p, k]]
        pivot = lu[k, k]
        if abs(pivot) <= tol or pivot == 0.0:
            singular = True
            continue
        lu[k + 1:, k] /= pivot
        lu[k + 1:, k + 1:] -= np.outer(lu[k + 1:, k], lu[k, k + 1:])
    return LuFactorization(lu=lu, perm=perm, singular=bool(singular))


def _check(F: LuFactorization, b) -> np.ndarray:
    if F.singular:
        raise SingularMatrixError("cannot solve with a singular factorization")
    b = np.asarray(b, dtype=float)
    if b.shape[0] != F.n:
        raise ValueError(f"right-hand side has length {b.shape[0]}, expected {F.n}")
    return b


def _forward_unit_lower(L, y):
    for i in range(1, L.shape[0]):
        y[i] -= L[i, :i] @ y[:i]
    return y


def _backward_upper(U, y):
    n = U.shape[0]
    for i in range(n - 1, -1, -1):
        y[i] = (y[i] - U[i, i + 1:] @ y[i + 1:]) / U[i, i]
    return y


def lu_solve(F: LuFactorization, b) -> np.ndarray:
    """Solve ``A x = b``; ``b`` may be a vector or an (n, k) block."""
    b = _check(F, b)
    y = b[F.perm].astype(float, copy=True)
    y = _forward_unit_lower(F.lu, y)
    x = _backward_upper(F.lu, y)
    F.solves += 1 if b.ndim == 1 else b.shape[1]
    return x


def lu_solve_transpose(F: LuFactorization, b) -> np.ndarray:
    """Solve ``A^T x = b`` reusing the factors of ``A``."""
    b = _check(F, b)
    # A^T = U^T L^T P, so solve U^T z = b, L^T w = z, x = P^T w
    z = b.astype(float, copy=True)
    U, n = F.lu, F.n
    for i in range(n):
        z[i] = (z[i] - U[:i, i] @ z[:i]) / U[i, i]
    for i in range(n - 2, -1, -1):
        z[i] -= F.lu[i + 1:, i] @ z[i + 1:]
    x = np.empty_like(z)
    x[F.perm] = z
    F.transpose_solves += 1 if b.ndim == 1 else b.shape[1]
    return x


def solve(A, b) -> np.ndarray:
    return lu_solve(lu_factor(A), b)


@dataclass(frozen=True)
class ComplexEigenvalues:
    """Eigenvalues as a complex array; conjugate pairs are exact."""

    values: np.ndarray

    @property
    def real(self) -> np.ndarray:
        return self.values.real

    @property
    def imag(self) -> np.ndarray:
        return self.values.imag

    @property
    def stable(self) -> bool:
        return bool(np.all(self.values.real < 0.0))

    def pairs(self) -> list[tuple[float, float]]:
        return [(float(v.real), float(v.imag)) for v in self.values]

    def __len__(self) -> int:
        return len(self.values)


def _pair_conjugates(w: np.ndarray, tol: float) -> np.ndarray:
    w = np.asarray(w, dtype=complex)
    out = w.copy()
    used = np.zeros(len(w), dtype=bool)
    for i in np.argsort(-w.imag, kind="stable"):
        if used[i]:
            continue
        used[i] = True
        if abs(w[i].imag) <= tol * max(1.0, abs(w[i])):
            out[i] = complex(w[i].real, 0.0)
            continue
        cand = [j for j in range(len(w)) if not used[j]]
        j = min(cand, key=lambda j: abs(w[j] - np.conj(w[i])))
        used[j] = True
        re = 0.5 * (w[i].real + w[j].real)
        im = 0.5 * (abs(w[i].imag) + abs(w[j].imag))
        out[i] = complex(re, im)
        out[j] = complex(re, -im)
    return out


def generalized_eigenvalues(J, M) -> ComplexEigenvalues:
    """Eigenvalues ``lam`` with ``lam M z + J z = 0``.

    The pencil is reduced to the standard problem for ``-M^{-1} J`` and the
    spectrum of that matrix is computed by LAPACK (Hessenberg reduction plus
    shifted QR).  Conjugate pairs are made exactly symmetric afterwards.
    """
    J = as_matrix(J)
    M = as_matrix(M)
    if J.shape != M.shape or J.shape[0] != J.shape[1]:
        raise ValueError(f"J and M must be square and equal in size, got {J.shape} and {M.shape}")
    F = lu_factor(M)
    if F.singular:
        raise SingularMatrixError("mass matrix M is singular")
    A = -lu_solve(F, J) if J.shape[0] else np.zeros((0, 0))
    try:
        w = np.linalg.eigvals(A)
    except np.linalg.LinAlgError as exc:
        raise EigenvalueError(f"QR iteration did not converge: {exc}") from exc
    return ComplexEigenvalues(_pair_conjugates(w, 1e-12))


def matrix_to_csv(A) -> str:
    """Row per line, comma separated, 17 significant digits."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    buf = io.StringIO()
    for row in A:
        buf.write(",".join(f"{v:.17g}" for v in row))
        buf.write("\n")
    return buf.getvalue()
