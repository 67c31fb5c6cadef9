"""Operation-count diagnostics for residual and derivative evaluations."""

from __future__ import annotations

import numpy as np

from ..scalars import Dual, OpCounter, OpCounts


def residual_cost(model, x, p, xdot=None) -> OpCounts:
    """Counts for one plain residual evaluation through the model routine."""
    counts = OpCounts()
    xdot = np.zeros(model.n) if xdot is None else xdot
    wrap = lambda v: [OpCounter(float(a), counts) for a in v]  # noqa: E731
    model.residual(wrap(xdot), wrap(x), wrap(p))
    return counts


def jacobian_cost(model, x, p, directions: int, xdot=None) -> OpCounts:
    """Counts for one forward-mode evaluation carrying ``directions`` derivative slots.

    State ``i`` is seeded along ``e_(i mod directions)``; rates and
    parameters are constants.
    """
    counts = OpCounts()
    xdot = np.zeros(model.n) if xdot is None else xdot

    def c(v):
        return OpCounter(float(v), counts)

    xs = []
    for i, v in enumerate(x):
        d = np.empty(directions, dtype=object)
        for j in range(directions):
            d[j] = c(1.0 if j == i % directions else 0.0)
        xs.append(Dual(c(v), d))
    xd = [Dual(c(v)) for v in xdot]
    ps = [Dual(c(v)) for v in p]
    model.residual(xd, xs, ps)
    return counts


def cost_ratio(model, x, p, directions: int = 10) -> float:
    """``flops(Jacobian with directions slots) / flops(residual)``."""
    base = residual_cost(model, x, p).flops
    jac = jacobian_cost(model, x, p, directions).flops
    return jac / base
