"""Polynomial chaos scalar: a random quantity stored by its coefficients.

Sums and differences act coefficient-wise, products use the basis triple
products (truncated Galerkin product), division solves the linear system
of the Galerkin product, and transcendental functions are projected by the
basis quadrature rule.
"""

from __future__ import annotations

import numpy as np

from ..basis import TensorBasis
from ..linalg import SingularMatrixError, lu_factor, lu_solve
from ._math import is_real


class PceDomainError(ArithmeticError):
    """A transcendental function was undefined at a quadrature node."""

    def __init__(self, op: str, node: int, value: float):
        super().__init__(f"{op} undefined at quadrature node {node} (argument {value!r})")
        self.op = op
        self.node = node
        self.value = value


class PceScalar:
    __slots__ = ("coeffs", "basis")

    def __init__(self, coeffs, basis: TensorBasis):
        c = np.asarray(coeffs, dtype=float)
        if c.shape != (basis.size,):
            raise ValueError(f"expected {basis.size} coefficients, got shape {c.shape}")
        self.coeffs = c
        self.basis = basis

    @classmethod
    def constant(cls, value: float, basis: TensorBasis) -> "PceScalar":
        c = np.zeros(basis.size)
        c[0] = value
        return cls(c, basis)

    @classmethod
    def zeros(cls, basis: TensorBasis) -> "PceScalar":
        return cls(np.zeros(basis.size), basis)

    @property
    def value(self) -> float:
        """Mean of the expansion (coefficient of psi_0 = 1)."""
        return float(self.coeffs[0])

    def mean(self) -> float:
        return float(self.coeffs[0])

    @property
    def is_deterministic(self) -> bool:
        return not np.any(self.coeffs[1:])

    def variance(self) -> float:
        return float(np.sum(self.coeffs[1:] ** 2 * self.basis.norms[1:]))

    def at_nodes(self) -> np.ndarray:
        return self.basis.phi_at_nodes @ self.coeffs

    def __call__(self, xi) -> np.ndarray:
        return self.basis.evaluate(xi) @ self.coeffs

    def __repr__(self) -> str:
        return f"PceScalar({self.coeffs.tolist()!r})"

    def _other(self, other):
        if isinstance(other, PceScalar):
            if other.basis is not self.basis:
                raise ValueError("PCE operands must share one basis")
            return other
        if is_real(other):
            return float(other)
        return None

    def __add__(self, other):
        b = self._other(other)
        if b is None:
            return NotImplemented
        if isinstance(b, float):
            c = self.coeffs.copy()
            c[0] += b
            return PceScalar(c, self.basis)
        return PceScalar(self.coeffs + b.coeffs, self.basis)

    __radd__ = __add__

    def __sub__(self, other):
        b = self._other(other)
        if b is None:
            return NotImplemented
        if isinstance(b, float):
            c = self.coeffs.copy()
            c[0] -= b
            return PceScalar(c, self.basis)
        return PceScalar(self.coeffs - b.coeffs, self.basis)

    def __rsub__(self, other):
        b = self._other(other)
        if b is None:
            return NotImplemented
        return (-self).__add__(b)

    def __neg__(self):
        return PceScalar(-self.coeffs, self.basis)

    def __pos__(self):
        return self

    def __mul__(self, other):
        b = self._other(other)
        if b is None:
            return NotImplemented
        if isinstance(b, float):
            return PceScalar(self.coeffs * b, self.basis)
        # deterministic operands scale exactly
        if b.is_deterministic:
            return PceScalar(self.coeffs * b.coeffs[0], self.basis)
        if self.is_deterministic:
            return PceScalar(b.coeffs * self.coeffs[0], self.basis)
        return PceScalar(galerkin_product(self.coeffs, b.coeffs, self.basis), self.basis)

    __rmul__ = __mul__

    def __truediv__(self, other):
        b = self._other(other)
        if b is None:
            return NotImplemented
        if isinstance(b, float):
            return PceScalar(self.coeffs / b, self.basis)
        if b.is_deterministic:
            return PceScalar(self.coeffs / b.coeffs[0], self.basis)
        return PceScalar(galerkin_divide(self.coeffs, b.coeffs, self.basis), self.basis)

    def __rtruediv__(self, other):
        b = self._other(other)
        if b is None:
            return NotImplemented
        return PceScalar.constant(b, self.basis).__truediv__(self)

    def __pow__(self, r):
        if not is_real(r):
            return NotImplemented
        return self.pow(r)

    # -- transcendental functions by quadrature projection ----------------

    def _project(self, fn, name, check=None):
        if self.is_deterministic:
            # deterministic argument: evaluate exactly
            vals = self.coeffs[:1]
            if check is not None and not check(vals)[0]:
                raise PceDomainError(name, 0, float(vals[0]))
            return PceScalar.constant(float(fn(vals)[0]), self.basis)
        vals = self.at_nodes()
        if check is not None:
            bad = np.nonzero(~check(vals))[0]
            if bad.size:
                raise PceDomainError(name, int(bad[0]), float(vals[bad[0]]))
        with np.errstate(over="ignore"):
            out = fn(vals)
        return PceScalar(self.basis.project(out), self.basis)

    def exp(self):
        return self._project(np.exp, "exp")

    def log(self):
        return self._project(np.log, "log", lambda v: v > 0.0)

    def sin(self):
        return self._project(np.sin, "sin")

    def cos(self):
        return self._project(np.cos, "cos")

    def pow(self, r: float):
        if float(r).is_integer() and r >= 0:
            return self._project(lambda v: v ** int(r), "pow")
        check = (lambda v: v > 0.0) if r < 0 else (lambda v: v >= 0.0)
        return self._project(lambda v: v ** r, "pow", check)

    # comparisons use the mean
    def __lt__(self, other):
        return self.value < getattr(other, "value", other)

    def __le__(self, other):
        return self.value <= getattr(other, "value", other)

    def __gt__(self, other):
        return self.value > getattr(other, "value", other)

    def __ge__(self, other):
        return self.value >= getattr(other, "value", other)

    def __float__(self):
        return self.value


def galerkin_product(a: np.ndarray, b: np.ndarray, basis: TensorBasis) -> np.ndarray:
    """``c_k = sum_ij a_i b_j <psi_i psi_j psi_k> / <psi_k^2>``."""
    t = basis.triple
    c = np.bincount(t.k, weights=a[t.i] * b[t.j] * t.values, minlength=basis.size)
    return c / basis.norms


def multiplication_matrix(b: np.ndarray, basis: TensorBasis) -> np.ndarray:
    """Matrix ``A`` with ``(A a)_k = sum_ij a_i b_j <psi_i psi_j psi_k> / <psi_k^2>``."""
    t = basis.triple
    A = np.zeros((basis.size, basis.size))
    np.add.at(A, (t.k, t.i), b[t.j] * t.values)
    return A / basis.norms[:, None]


def galerkin_divide(a: np.ndarray, b: np.ndarray, basis: TensorBasis) -> np.ndarray:
    F = lu_factor(multiplication_matrix(b, basis))
    if F.singular:
        raise SingularMatrixError("PCE division matrix is singular (divisor vanishes on the support)")
    return lu_solve(F, a)
