"""Floating point operation counting scalar."""

from __future__ import annotations

import threading
from dataclasses import dataclass, field

from ._math import div, is_real, real_cos, real_exp, real_log, real_pow, real_sin

CATEGORIES = ("adds", "multiplies", "divides", "transcendentals", "assignments")


@dataclass
class OpCounts:
    adds: int = 0
    multiplies: int = 0
    divides: int = 0
    transcendentals: int = 0
    assignments: int = 0
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False, compare=False)

    def bump(self, category: str, n: int = 1) -> None:
        with self._lock:
            setattr(self, category, getattr(self, category) + n)

    @property
    def flops(self) -> int:
        """Arithmetic work: everything except assignments."""
        return self.adds + self.multiplies + self.divides + self.transcendentals

    def as_dict(self) -> dict[str, int]:
        return {c: getattr(self, c) for c in CATEGORIES}

    def reset(self) -> None:
        with self._lock:
            for c in CATEGORIES:
                setattr(self, c, 0)


class OpCounter:
    """A float that reports every operation to a shared :class:`OpCounts`."""

    __slots__ = ("value", "counts")

    def __init__(self, value: float, counts: OpCounts):
        self.value = float(value)
        self.counts = counts

    def __repr__(self) -> str:
        return f"OpCounter({self.value!r})"

    def _val(self, other):
        if isinstance(other, OpCounter):
            return other.value
        if is_real(other):
            return float(other)
        return None

    def _op(self, category, value):
        self.counts.bump(category)
        return OpCounter(value, self.counts)

    def copy(self) -> "OpCounter":
        return self._op("assignments", self.value)

    def __add__(self, other):
        b = self._val(other)
        return NotImplemented if b is None else self._op("adds", self.value + b)

    __radd__ = __add__

    def __sub__(self, other):
        b = self._val(other)
        return NotImplemented if b is None else self._op("adds", self.value - b)

    def __rsub__(self, other):
        b = self._val(other)
        return NotImplemented if b is None else self._op("adds", b - self.value)

    def __neg__(self):
        return self._op("adds", -self.value)

    def __mul__(self, other):
        b = self._val(other)
        return NotImplemented if b is None else self._op("multiplies", self.value * b)

    __rmul__ = __mul__

    def __truediv__(self, other):
        b = self._val(other)
        return NotImplemented if b is None else self._op("divides", div(self.value, b))

    def __rtruediv__(self, other):
        b = self._val(other)
        return NotImplemented if b is None else self._op("divides", div(b, self.value))

    def __pow__(self, r):
        if not is_real(r):
            return NotImplemented
        return self.pow(r)

    def pow(self, r: float):
        return self._op("transcendentals", real_pow(self.value, r))

    def exp(self):
        return self._op("transcendentals", real_exp(self.value))

    def log(self):
        return self._op("transcendentals", real_log(self.value))

    def sin(self):
        return self._op("transcendentals", real_sin(self.value))

    def cos(self):
        return self._op("transcendentals", real_cos(self.value))

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
