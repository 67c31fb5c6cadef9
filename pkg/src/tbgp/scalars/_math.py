"""Elementary functions dispatching over every scalar type.

Model code imports ``exp``, ``log`` etc. from here instead of ``math`` so
that one implementation runs unchanged on floats, duals, tape scalars, PCE
scalars and operation counters.  On plain reals the results follow IEEE
semantics: domain errors give NaN and overflow gives inf instead of
raising.
"""

from __future__ import annotations

import math
import numbers

_nan = float("nan")
_inf = float("inf")


def is_real(a) -> bool:
    return isinstance(a, numbers.Real)


def real_pow(a: float, r: float) -> float:
    try:
        out = float(a) ** r
    except ZeroDivisionError:
        return _inf
    except OverflowError:
        return _inf
    if isinstance(out, complex):
        return _nan
    return out


def div(a, b):
    """``a / b`` with IEEE results instead of ZeroDivisionError."""
    try:
        return a / b
    except ZeroDivisionError:
        if a != a or a == 0:
            return _nan
        return math.copysign(_inf, a) * math.copysign(1.0, b)


def real_exp(a: float) -> float:
    try:
        return math.exp(a)
    except OverflowError:
        return _inf


def real_log(a: float) -> float:
    if a > 0.0:
        return math.log(a)
    if a == 0.0:
        return -_inf
    return _nan


def real_sin(a: float) -> float:
    return math.sin(a) if math.isfinite(a) else _nan


def real_cos(a: float) -> float:
    return math.cos(a) if math.isfinite(a) else _nan


def exp(a):
    return real_exp(a) if is_real(a) else a.exp()


def log(a):
    return real_log(a) if is_real(a) else a.log()


def sin(a):
    return real_sin(a) if is_real(a) else a.sin()


def cos(a):
    return real_cos(a) if is_real(a) else a.cos()


def pow(a, r: float):
    """``a ** r`` for a real exponent ``r``."""
    return real_pow(a, r) if is_real(a) else a.pow(r)


def sqrt(a):
    return pow(a, 0.5)


def value_of(a) -> float:
    """Strip derivative/stochastic parts down to the underlying real value.

    For polynomial chaos scalars this is the mean coefficient.
    """
    while not is_real(a):
        a = a.value
    return float(a)


def isinf(a) -> bool:
    return math.isinf(value_of(a))
