"""Forward-mode AD number with a run-time number of directions.

``Dual(value, derivs)`` carries a value and the derivatives of that value
along ``p`` seeded directions.  ``derivs`` is a numpy array; an empty array
marks a constant, so literals never need seeding.  The component type is
generic: ``value`` and the entries of ``derivs`` may themselves be duals
(second derivatives), PCE scalars (stochastic Galerkin Jacobians) or
operation counters.
"""

from __future__ import annotations

import numpy as np

from ._math import cos, div, exp, is_real, log, pow, sin, value_of

_EMPTY = np.zeros(0)


def _as_derivs(d) -> np.ndarray:
    if isinstance(d, np.ndarray):
        return d
    d = list(d)
    if not d:
        return _EMPTY
    if all(is_real(v) for v in d):
        return np.asarray(d, dtype=float)
    out = np.empty(len(d), dtype=object)
    out[:] = d
    return out


class Dual:
    __slots__ = ("value", "derivs")

    def __init__(self, value, derivs=()):
        self.value = value
        self.derivs = _as_derivs(derivs)

    @classmethod
    def variable(cls, value, index: int, size: int, one=1.0) -> "Dual":
        d = np.zeros(size) if is_real(one) else np.array([one * 0.0] * size, dtype=object)
        d[index] = one
        return cls(value, d)

    @property
    def size(self) -> int:
        return self.derivs.shape[0]

    def is_constant(self) -> bool:
        return self.derivs.shape[0] == 0

    def deriv(self, i: int):
        return self.derivs[i] if self.derivs.shape[0] else 0.0

    def __repr__(self) -> str:
        return f"Dual({self.value!r}, {list(self.derivs)!r})"

    # -- arithmetic -------------------------------------------------------

    @staticmethod
    def _lift(other):
        if isinstance(other, Dual):
            return other
        if isinstance(other, np.ndarray):
            return None
        return Dual(other)

    @staticmethod
    def _sum(da, db, sign=1.0):
        na, nb = da.shape[0], db.shape[0]
        if nb == 0:
            return da
        if na == 0:
            return -db if sign < 0 else db
        if na != nb:
            raise ValueError(f"derivative length mismatch: {na} vs {nb}")
        return da - db if sign < 0 else da + db

    def __add__(self, other):
        b = self._lift(other)
        if b is None:
            return NotImplemented
        return Dual(self.value + b.value, self._sum(self.derivs, b.derivs))

    def __radd__(self, other):
        b = self._lift(other)
        if b is None:
            return NotImplemented
        return b.__add__(self)

    def __sub__(self, other):
        b = self._lift(other)
        if b is None:
            return NotImplemented
        return Dual(self.value - b.value, self._sum(self.derivs, b.derivs, -1.0))

    def __rsub__(self, other):
        b = self._lift(other)
        if b is None:
            return NotImplemented
        return b.__sub__(self)

    def __neg__(self):
        return Dual(-self.value, -self.derivs)

    def __pos__(self):
        return self

    def __mul__(self, other):
        b = self._lift(other)
        if b is None:
            return NotImplemented
        a = self
        if b.derivs.shape[0] == 0:
            d = a.derivs * b.value if a.derivs.shape[0] else _EMPTY
        elif a.derivs.shape[0] == 0:
            d = a.value * b.derivs
        else:
            d = self._sum(a.value * b.derivs, a.derivs * b.value)
        return Dual(a.value * b.value, d)

    def __rmul__(self, other):
        b = self._lift(other)
        if b is None:
            return NotImplemented
        return b.__mul__(self)

    def __truediv__(self, other):
        b = self._lift(other)
        if b is None:
            return NotImplemented
        a = self
        c = div(a.value, b.value)
        if b.derivs.shape[0] == 0:
            d = div(a.derivs, b.value) if a.derivs.shape[0] else _EMPTY
        else:
            d = div(self._sum(a.derivs, c * b.derivs, -1.0), b.value)
        return Dual(c, d)

    def __rtruediv__(self, other):
        b = self._lift(other)
        if b is None:
            return NotImplemented
        return b.__truediv__(self)

    def __pow__(self, r):
        if isinstance(r, Dual):
            # a**b = exp(b log a)
            return exp(r * log(self))
        return self.pow(r)

    def __rpow__(self, base):
        return exp(self * log(Dual(base)))

    # -- elementary functions ----------------------------------------------

    def _chain(self, value, local):
        if self.derivs.shape[0] == 0:
            return Dual(value)
        return Dual(value, local * self.derivs)

    def pow(self, r: float):
        if r == 0:
            return Dual(pow(self.value, 0.0))
        if r == 1:
            return self
        return self._chain(pow(self.value, r), r * pow(self.value, r - 1.0))

    def exp(self):
        c = exp(self.value)
        return self._chain(c, c)

    def log(self):
        if self.derivs.shape[0] == 0:
            return Dual(log(self.value))
        return Dual(log(self.value), div(self.derivs, self.value))

    def sin(self):
        return self._chain(sin(self.value), cos(self.value))

    def cos(self):
        return self._chain(cos(self.value), -sin(self.value))

    # -- comparisons act on the value only --------------------------------

    def __lt__(self, other):
        return value_of(self) < value_of(other)

    def __le__(self, other):
        return value_of(self) <= value_of(other)

    def __gt__(self, other):
        return value_of(self) > value_of(other)

    def __ge__(self, other):
        return value_of(self) >= value_of(other)

    def __float__(self):
        return value_of(self)


def derivative_matrix(outputs, size: int) -> np.ndarray:
    """Stack the derivative arrays of ``outputs`` into a float matrix.

    Constant outputs (no derivative array) give zero rows.
    """
    J = np.zeros((len(outputs), size))
    for i, y in enumerate(outputs):
        if isinstance(y, Dual) and y.derivs.shape[0]:
            J[i] = [value_of(v) for v in y.derivs] if y.derivs.dtype == object else y.derivs
    return J
