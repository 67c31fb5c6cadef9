"""Pseudo-arclength continuation with a secant predictor."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..assembly import EvaluatorError, NonFiniteError
from .newton import NewtonError, NewtonOptions, as_assembler, newton_core
from .stability import stability_eigenvalues


@dataclass
class ContinuationOptions:
    ds: float = 0.05
    ds_min: float = 1e-6
    ds_max: float = 0.5
    lam_min: float = -np.inf
    lam_max: float = np.inf
    max_steps: int = 200
    direction: float = 1.0
    shrink: float = 0.5
    grow: float = 1.3
    grow_iters: int = 3
    newton: NewtonOptions = field(default_factory=lambda: NewtonOptions(max_iters=10))

    def __post_init__(self):
        if not (0 < self.ds_min <= self.ds <= self.ds_max):
            raise ValueError("continuation steps must satisfy 0 < ds_min <= ds <= ds_max")
        if self.direction not in (-1.0, 1.0, -1, 1):
            raise ValueError("direction must be +1 or -1")


@dataclass
class ContinuationPoint:
    x: np.ndarray
    lam: float
    newton_iters: int
    ds_next: float
    stable: bool | None = None


@dataclass
class ContinuationResult:
    points: list
    status: str  # 'complete', 'max_steps' or 'step_underflow'
    folds: list = field(default_factory=list)

    @property
    def lams(self) -> np.ndarray:
        return np.array([pt.lam for pt in self.points])

    @property
    def states(self) -> np.ndarray:
        return np.array([pt.x for pt in self.points])

    def restart_state(self, k: int):
        """Arguments that let a continuation resume after point ``k``."""
        if k < 1:
            raise ValueError("restart needs a predecessor point (k >= 1)")
        return self.points[k - 1], self.points[k]


def _augmented(fun, x_pred, lam_pred, tx, tl):
    def G(u):
        x, lam = u[:-1], u[-1]
        f, Jx, fl = fun(x, lam)
        c = tx @ (x - x_pred) + tl * (lam - lam_pred)
        n = len(x)
        K = np.empty((n + 1, n + 1))
        K[:n, :n] = Jx
        K[:n, n] = fl
        K[n, :n] = tx
        K[n, n] = tl
        return np.append(f, c), K

    return G


def arclength_core(fun, x0, lam0, opts: ContinuationOptions, restart=None, stability=None) -> ContinuationResult:
    """Trace ``F(x, lam) = 0`` from a converged ``(x0, lam0)``.

    ``fun(x, lam) -> (F, dF/dx, dF/dlam)``.  The first step is a natural
    parameter step; later steps use the secant through the last two points.
    ``restart = (previous_point, point)`` resumes a traced curve.
    ``stability(x, lam)`` optionally tags points.
    """

    def tag(x, lam):
        return None if stability is None else bool(stability(x, lam))

    def inside(lam):
        return opts.lam_min <= lam <= opts.lam_max

    if restart is None:
        first = ContinuationPoint(np.array(x0, float), float(lam0), 0, opts.ds, tag(x0, lam0))
        points = [first]
        prev = None
    else:
        prev, first = restart
        points = [first]
    folds = []
    ds = points[-1].ds_next
    last_dir = None if prev is None else np.sign(first.lam - prev.lam) or None
    status = "max_steps"
    steps = 0
    while steps < opts.max_steps:
        cur = points[-1]
        u_cur = np.append(cur.x, cur.lam)
        if prev is None:
            t = np.zeros_like(u_cur)
            t[-1] = opts.direction
        else:
            t = u_cur - np.append(prev.x, prev.lam)
            t /= np.linalg.norm(t)
        u_pred = u_cur + ds * t
        G = _augmented(fun, u_pred[:-1], u_pred[-1], t[:-1], t[-1])
        try:
            sol = newton_core(G, u_pred, opts.newton)
        except (NewtonError, EvaluatorError, NonFiniteError):
            ds *= opts.shrink
            if ds < opts.ds_min:
                status = "step_underflow"
                break
            continue
        steps += 1
        x_new, lam_new = sol.x[:-1], float(sol.x[-1])
        ds_next = min(ds * opts.grow, opts.ds_max) if sol.iterations <= opts.grow_iters else ds
        if not inside(lam_new):
            status = "complete"
            break
        new = ContinuationPoint(x_new.copy(), lam_new, sol.iterations, ds_next, tag(x_new, lam_new))
        direction = np.sign(lam_new - cur.lam)
        if last_dir is not None and direction != 0 and direction != last_dir:
            folds.append(len(points) - 1)
        if direction != 0:
            last_dir = direction
        prev = cur
        points.append(new)
        ds = ds_next
    return ContinuationResult(points, status, folds)


def model_branch_fun(asm, p, param_index):
    """``(f, df/dx, df/dp_k)`` from one Tangent evaluation."""
    p = np.array(p, dtype=float)
    eye = np.eye(asm.n)

    def fun(x, lam):
        q = p.copy()
        q[param_index] = lam
        r = asm.tangent(x, q, V=eye, params=(param_index,))
        return r["f"], r["f_dir"], r["f_dp"][:, 0]

    return fun


def arclength_continuation(model, x0, p, param_index: int, opts: ContinuationOptions | None = None,
                           restart=None, tag_stability: bool = True) -> ContinuationResult:
    """Continue steady states of ``model`` in parameter ``param_index``."""
    opts = opts or ContinuationOptions()
    asm = as_assembler(model)
    p = np.array(p, dtype=float)
    fun = model_branch_fun(asm, p, param_index)

    def stability(x, lam):
        q = p.copy()
        q[param_index] = lam
        return stability_eigenvalues(asm, x, q).stable

    return arclength_core(fun, x0, p[param_index], opts, restart=restart,
                          stability=stability if tag_stability else None)


def tangent_at(result: ContinuationResult, k: int) -> np.ndarray:
    """Normalized secant through points ``k`` and ``k + 1`` (state part first)."""
    a, b = result.points[k], result.points[min(k + 1, len(result.points) - 1)]
    if a is b:
        a = result.points[k - 1]
    t = np.append(b.x, b.lam) - np.append(a.x, a.lam)
    return t / np.linalg.norm(t)


__all__ = [
    "ContinuationOptions",
    "ContinuationPoint",
    "ContinuationResult",
    "arclength_continuation",
    "arclength_core",
    "model_branch_fun",
    "tangent_at",
]
