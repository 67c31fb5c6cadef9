"""Reverse-mode AD: an explicit operation tape and the scalar that writes it.

Each record stores the numeric local partials of one operation, evaluated
during the forward pass.  The reverse sweep walks the records backwards
and accumulates ``adjoint(arg) += adjoint(record) * partial``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._math import div, is_real, real_cos, real_exp, real_log, real_pow, real_sin


@dataclass
class TapeRecord:
    kind: str
    args: tuple[int, ...]
    partials: tuple[float, ...]
    value: float


@dataclass
class AdjointTape:
    records: list[TapeRecord] = field(default_factory=list)
    independents: list[int] = field(default_factory=list)
    adjoints: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def __len__(self) -> int:
        return len(self.records)

    def _push(self, kind, args, partials, value) -> "TapeScalar":
        idx = len(self.records)
        if any(a >= idx for a in args):
            raise ValueError("tape arguments must precede the record")
        self.records.append(TapeRecord(kind, tuple(args), tuple(partials), value))
        return TapeScalar(value, idx, self)

    def variable(self, value: float) -> "TapeScalar":
        """Register an independent variable."""
        s = self._push("input", (), (), float(value))
        self.independents.append(s.index)
        return s

    def reverse_sweep(self, output: "TapeScalar", seed: float = 1.0) -> np.ndarray:
        """Adjoints of the independents, in registration order."""
        if output.tape is not self:
            raise ValueError("output was not recorded on this tape")
        adj = np.zeros(len(self.records))
        adj[output.index] = seed
        for idx in range(output.index, -1, -1):
            a = adj[idx]
            if a == 0.0:
                continue
            rec = self.records[idx]
            for arg, partial in zip(rec.args, rec.partials):
                adj[arg] += a * partial
        self.adjoints = adj
        return adj[self.independents].copy()

    def gradient(self, outputs, weights=None) -> np.ndarray:
        """Rows ``W^T dy/dx``; identity weights give the full Jacobian."""
        outputs = list(outputs)
        if weights is None:
            weights = np.eye(len(outputs))
        weights = np.atleast_2d(np.asarray(weights, dtype=float))
        rows = []
        for w in weights:
            total = np.zeros(len(self.independents))
            for y, wi in zip(outputs, w):
                if wi != 0.0 and isinstance(y, TapeScalar):
                    total += self.reverse_sweep(y, wi)
            rows.append(total)
        return np.array(rows)


class TapeScalar:
    __slots__ = ("value", "index", "tape")

    def __init__(self, value: float, index: int, tape: AdjointTape):
        self.value = value
        self.index = index
        self.tape = tape

    def __repr__(self) -> str:
        return f"TapeScalar({self.value!r}, #{self.index})"

    def _same(self, other: "TapeScalar") -> None:
        if other.tape is not self.tape:
            raise ValueError("cannot combine scalars recorded on different tapes")

    def _unary(self, kind, partial, value):
        return self.tape._push(kind, (self.index,), (partial,), value)

    def __add__(self, other):
        if isinstance(other, TapeScalar):
            self._same(other)
            return self.tape._push("add", (self.index, other.index), (1.0, 1.0), self.value + other.value)
        if is_real(other):
            return self._unary("add", 1.0, self.value + other)
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, TapeScalar):
            self._same(other)
            return self.tape._push("sub", (self.index, other.index), (1.0, -1.0), self.value - other.value)
        if is_real(other):
            return self._unary("sub", 1.0, self.value - other)
        return NotImplemented

    def __rsub__(self, other):
        if is_real(other):
            return self._unary("sub", -1.0, other - self.value)
        return NotImplemented

    def __neg__(self):
        return self._unary("neg", -1.0, -self.value)

    def __mul__(self, other):
        if isinstance(other, TapeScalar):
            self._same(other)
            return self.tape._push("mul", (self.index, other.index), (other.value, self.value), self.value * other.value)
        if is_real(other):
            return self._unary("mul", float(other), self.value * other)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, TapeScalar):
            self._same(other)
            c = div(self.value, other.value)
            return self.tape._push("div", (self.index, other.index), (div(1.0, other.value), div(-c, other.value)), c)
        if is_real(other):
            return self._unary("div", div(1.0, other), div(self.value, other))
        return NotImplemented

    def __rtruediv__(self, other):
        if is_real(other):
            c = div(other, self.value)
            return self._unary("div", div(-c, self.value), c)
        return NotImplemented

    def __pow__(self, r):
        if not is_real(r):
            return NotImplemented
        return self.pow(r)

    def pow(self, r: float):
        return self._unary("pow", r * real_pow(self.value, r - 1.0), real_pow(self.value, r))

    def exp(self):
        c = real_exp(self.value)
        return self._unary("exp", c, c)

    def log(self):
        return self._unary("log", div(1.0, self.value), real_log(self.value))

    def sin(self):
        return self._unary("sin", real_cos(self.value), real_sin(self.value))

    def cos(self):
        return self._unary("cos", -real_sin(self.value), real_cos(self.value))

    def __lt__(self, other):
        return self.value < getattr(other, "value", other)

    def __le__(self, other):
        return self.value <= getattr(other, "value", other)

    def __gt__(self, other):
        return self.value > getattr(other, "value", other)

    def __ge__(self, other):
        return self.value >= getattr(other, "value", other)

    def __float__(self):
        return float(self.value)


def tape_gradient(fn, x, weights=None):
    """Evaluate ``fn`` on tape scalars at ``x`` and return ``(values, W^T J)``."""
    tape = AdjointTape()
    xs = [tape.variable(v) for v in np.asarray(x, dtype=float)]
    ys = list(fn(xs))
    values = np.array([float(getattr(y, "value", y)) for y in ys])
    return values, tape.gradient(ys, weights)
