"""Damped Newton iteration on dense systems."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..assembly import Assembler, EvaluatorError, NonFiniteError
from ..linalg import lu_factor, lu_solve


@dataclass
class NewtonOptions:
    atol: float = 1e-10
    rtol: float = 1e-10
    max_iters: int = 20
    line_search: bool = False
    max_halvings: int = 8

    def __post_init__(self):
        if self.atol <= 0 or self.rtol < 0:
            raise ValueError("Newton tolerances must be positive")
        if self.max_iters < 0 or self.max_halvings < 0:
            raise ValueError("iteration limits must be non-negative")


@dataclass
class NewtonResult:
    x: np.ndarray
    converged: bool
    iterations: int
    residual_norms: list = field(default_factory=list)
    step_norms: list = field(default_factory=list)
    f: np.ndarray | None = None
    iterates: list = field(default_factory=list)


class NewtonError(RuntimeError):
    """Newton failed; ``reason`` is 'singular', 'max_iterations' or 'non_finite'."""

    def __init__(self, reason: str, message: str, result: NewtonResult):
        super().__init__(message)
        self.reason = reason
        self.result = result


def as_assembler(model, basis=None) -> Assembler:
    if isinstance(model, Assembler):
        if basis is not None and model.basis is not basis:
            return Assembler(model.model, basis)
        return model
    return Assembler(model, basis)


def _norm(v) -> float:
    v = np.asarray(v, dtype=float)
    return float(np.max(np.abs(v))) if v.size else 0.0


def newton_core(fun, x0, opts: NewtonOptions | None = None, residual=None) -> NewtonResult:
    """Solve ``F(x) = 0`` given ``fun(x) -> (F, dF/dx)``.

    Converged when ``||F||_inf <= atol + rtol ||F(x0)||_inf``.  ``residual``
    (``x -> F``) is only needed for the line search and defaults to the
    first output of ``fun``.
    """
    opts = opts or NewtonOptions()
    residual = residual or (lambda z: fun(z)[0])
    x = np.array(x0, dtype=float)
    res = NewtonResult(x=x, converged=False, iterations=0)
    f0 = None
    for it in range(opts.max_iters + 1):
        try:
            f, J = fun(x)
        except (EvaluatorError, NonFiniteError) as exc:
            res.x = x
            raise NewtonError("non_finite", f"residual evaluation failed at iteration {it}: {exc}", res) from exc
        f = np.asarray(f, dtype=float)
        if not np.all(np.isfinite(f)):
            raise NewtonError("non_finite", f"non-finite residual at iteration {it}", res)
        nf = _norm(f)
        res.residual_norms.append(nf)
        res.iterates.append(x.copy())
        res.f = f
        if f0 is None:
            f0 = nf
        if nf <= opts.atol + opts.rtol * f0:
            res.x, res.converged, res.iterations = x, True, it
            return res
        if it == opts.max_iters:
            break
        F = lu_factor(J)
        if F.singular:
            res.x, res.iterations = x, it
            raise NewtonError("singular", f"singular Jacobian at iteration {it}", res)
        dx = lu_solve(F, -f)
        step = 1.0
        x_new = x + dx
        if opts.line_search:
            for _ in range(opts.max_halvings):
                try:
                    trial = _norm(residual(x_new))
                except (EvaluatorError, NonFiniteError):
                    trial = np.inf
                if np.isfinite(trial) and trial <= nf:
                    break
                step *= 0.5
                x_new = x + step * dx
        res.step_norms.append(_norm(step * dx))
        x = x_new
    res.x, res.iterations = x, opts.max_iters
    raise NewtonError("max_iterations", f"no convergence in {opts.max_iters} iterations "
                      f"(residual {res.residual_norms[-1]:.3e})", res)


def newton_solve(model, x_guess, p, opts: NewtonOptions | None = None, xdot=None) -> NewtonResult:
    """Steady solve of ``f(xdot, x, p) = 0`` for ``x`` (``xdot`` held fixed, default 0)."""
    asm = as_assembler(model)
    p = np.asarray(p, dtype=float)

    def fun(x):
        return asm.jacobian(x, p, xdot)

    return newton_core(fun, x_guess, opts, residual=lambda x: asm.residual(x, p, xdot))
