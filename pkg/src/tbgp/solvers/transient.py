"""Fixed-step BDF1/BDF2 time integration of ``f(xdot, x, p) = 0``."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .newton import NewtonError, NewtonOptions, as_assembler, newton_core

# h xdot_n = sum_i alpha_i x_{n-i}
BDF_COEFFS = {1: (1.0, -1.0), 2: (1.5, -2.0, 0.5)}


@dataclass
class Trajectory:
    t: np.ndarray
    x: np.ndarray
    xdot: np.ndarray
    newton_iters: list = field(default_factory=list)
    status: str = "complete"
    failure_index: int | None = None
    message: str = ""


def consistent_rate(asm, x0, p, xdot_guess=None, opts=None) -> np.ndarray:
    """Solve ``f(xdot, x0, p) = 0`` for ``xdot`` with Newton on ``df/dxdot``."""
    x0 = np.asarray(x0, float)

    def fun(xd):
        return asm.jacobian(x0, p, xd, alpha=1.0, beta=0.0)

    guess = np.zeros(asm.n) if xdot_guess is None else xdot_guess
    return newton_core(fun, guess, opts or NewtonOptions()).x


def bdf_integrate(model, x_init, p, t_span, h: float, order: int = 2,
                  opts: NewtonOptions | None = None, xdot_init=None) -> Trajectory:
    """March from ``t_span[0]`` to ``t_span[1]`` with fixed step ``h``.

    BDF2 starts with one BDF1 step.  Each step runs Newton with iteration
    matrix ``(alpha_0 / h) df/dxdot + df/dx``.  On a failed step the
    trajectory up to the last accepted step is returned with
    ``status = 'failed'``.
    """
    if order not in BDF_COEFFS:
        raise ValueError("BDF order must be 1 or 2")
    if h <= 0:
        raise ValueError("step size must be positive")
    asm = as_assembler(model)
    p = np.asarray(p, dtype=float)
    t0, t1 = map(float, t_span)
    steps = int(round((t1 - t0) / h))
    if steps < 1 or abs(t0 + steps * h - t1) > 1e-9 * max(1.0, abs(t1)):
        raise ValueError("t_span must be a whole number of steps")
    opts = opts or NewtonOptions()
    x0 = np.asarray(x_init, dtype=float)
    xd0 = consistent_rate(asm, x0, p, opts=opts) if xdot_init is None else np.asarray(xdot_init, float)
    ts, xs, xds, iters = [t0], [x0], [xd0], [0]
    for k in range(1, steps + 1):
        q = min(order, k)
        alpha = BDF_COEFFS[q]
        hist = sum(alpha[i] * xs[-i] for i in range(1, q + 1))
        a0 = alpha[0] / h

        def rate(x):
            return (alpha[0] * x + hist) / h

        def fun(x):
            return asm.jacobian(x, p, rate(x), alpha=a0, beta=1.0)

        try:
            res = newton_core(fun, xs[-1], opts)
        except NewtonError as exc:
            return Trajectory(np.array(ts), np.array(xs), np.array(xds), iters, "failed", k, str(exc))
        ts.append(t0 + k * h)
        xs.append(res.x)
        xds.append(rate(res.x))
        iters.append(res.iterations)
    return Trajectory(np.array(ts), np.array(xs), np.array(xds), iters)


def observed_order(errors_or_values, ratio: float = 2.0) -> float:
    """Richardson order estimate from three solutions at steps h, h/r, h/r^2."""
    a, b, c = (np.asarray(v, float) for v in errors_or_values)
    return float(np.log(np.linalg.norm(a - b) / np.linalg.norm(b - c)) / np.log(ratio))
