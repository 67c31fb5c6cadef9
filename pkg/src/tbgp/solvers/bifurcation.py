"""Turning-point (fold) location and tracking with bordered systems.

For a state Jacobian ``J`` and bordering vectors ``a``, ``b``::

    [J   a] [v ]   [0]        [J^T b] [u ]   [0]
    [b^T 0] [s1] = [1]        [a^T 0] [s2] = [1]

and ``sigma = -u^T J v`` vanishes at a fold.  Its gradient is
``-u^T d(J v)/dz`` with ``u`` and ``v`` frozen, taken from a nested forward
(Hessian) evaluation or from forward differences of ``J v``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..linalg import SingularMatrixError, lu_factor, lu_solve
from .continuation import ContinuationOptions, ContinuationResult, arclength_core
from .newton import NewtonOptions, as_assembler, newton_core


@dataclass
class FoldPoint:
    x: np.ndarray
    p: np.ndarray
    param_index: int
    v: np.ndarray
    u: np.ndarray
    sigma: float
    a: np.ndarray
    b: np.ndarray
    iterations: int = 0

    @property
    def value(self) -> float:
        return float(self.p[self.param_index])


class BorderedSystemError(SingularMatrixError):
    pass


def bordered_vectors(J, a, b):
    """``(v, u, sigma)`` from the two bordered solves."""
    n = J.shape[0]
    K = np.zeros((n + 1, n + 1))
    K[:n, :n] = J
    K[:n, n] = a
    K[n, :n] = b
    F = lu_factor(K)
    if F.singular:
        raise BorderedSystemError("bordered fold system is singular; choose different a, b")
    rhs = np.zeros(n + 1)
    rhs[n] = 1.0
    v = lu_solve(F, rhs)[:n]
    Kt = np.zeros((n + 1, n + 1))
    Kt[:n, :n] = J.T
    Kt[:n, n] = b
    Kt[n, :n] = a
    Ft = lu_factor(Kt)
    if Ft.singular:
        raise BorderedSystemError("transposed bordered fold system is singular; choose different a, b")
    u = lu_solve(Ft, rhs)[:n]
    return v, u, float(-u @ J @ v)


class FoldSystem:
    """Values and derivatives of ``(f, sigma)`` in ``x`` and selected parameters."""

    def __init__(self, model, p, a, b, second_derivs: str = "ad", fd_scale: float = 1.0):
        if second_derivs not in ("ad", "fd"):
            raise ValueError("second_derivs must be 'ad' or 'fd'")
        self.asm = as_assembler(model)
        self.p = np.array(p, dtype=float)
        self.a = np.asarray(a, dtype=float)
        self.b = np.asarray(b, dtype=float)
        self.mode = second_derivs
        self.fd_scale = fd_scale

    def evaluate(self, x, p, params):
        """``(f, J, f_p, sigma, sigma_x, sigma_p, v, u)`` for parameter indices ``params``."""
        asm, n, m = self.asm, self.asm.n, self.asm.m
        params = tuple(params)
        if self.mode == "ad":
            nz = 2 * n + m
            outer = np.zeros((nz, n + len(params)))
            outer[n:2 * n, :n] = np.eye(n)
            for c, j in enumerate(params):
                outer[2 * n + j, n + c] = 1.0
            # u, v come from the current J; the nested sweep then differentiates J v
            J_only = asm.jacobian(x, p)[1]
            v, u, sigma = bordered_vectors(J_only, self.a, self.b)
            inner = np.zeros((nz, 1))
            inner[n:2 * n, 0] = v
            r = asm.hessian(x, p, inner, outer)
            first = r["f_outer"]
            J, fp = first[:, :n], first[:, n:]
            d_jv = r["f_second"][:, 0, :]
            grad = -(u @ d_jv)
            return r["f"], J, fp, sigma, grad[:n], grad[n:], v, u
        r = asm.tangent(x, p, V=np.eye(n), params=params)
        J, fp = r["f_dir"], r["f_dp"]
        v, u, sigma = bordered_vectors(J, self.a, self.b)
        jv = J @ v
        eps = np.sqrt(np.finfo(float).eps)
        grad = np.empty(n + len(params))
        for c in range(n + len(params)):
            xx, pp = np.array(x, float), p.copy()
            if c < n:
                h = eps * max(self.fd_scale, abs(xx[c]))
                xx[c] += h
            else:
                j = params[c - n]
                h = eps * max(self.fd_scale, abs(pp[j]))
                pp[j] += h
            Jh = asm.jacobian(xx, pp)[1]
            grad[c] = -(u @ ((Jh @ v - jv) / h))
        return r["f"], J, fp, sigma, grad[:n], grad[n:], v, u


def default_border(n: int, tangent=None) -> np.ndarray:
    if tangent is not None:
        t = np.asarray(tangent, dtype=float)[:n]
        nt = np.linalg.norm(t)
        if nt > 0:
            return t / nt
    e = np.zeros(n)
    e[0] = 1.0
    return e


def turning_point_solve(model, x_guess, p, param_index: int, a=None, b=None,
                        opts: NewtonOptions | None = None, second_derivs: str = "ad",
                        tangent=None) -> FoldPoint:
    """Newton on ``{f = 0, sigma = 0}`` for ``(x, p[param_index])``."""
    asm = as_assembler(model)
    n = asm.n
    p = np.array(p, dtype=float)
    a = default_border(n, tangent) if a is None else np.asarray(a, float)
    b = default_border(n, tangent) if b is None else np.asarray(b, float)
    sys = FoldSystem(asm, p, a, b, second_derivs)
    opts = opts or NewtonOptions(atol=1e-12, rtol=0.0, max_iters=30)

    def fun(z):
        q = p.copy()
        q[param_index] = z[n]
        f, J, fp, sigma, sx, sp, _, _ = sys.evaluate(z[:n], q, (param_index,))
        K = np.zeros((n + 1, n + 1))
        K[:n, :n] = J
        K[:n, n] = fp[:, 0]
        K[n, :n] = sx
        K[n, n] = sp[0]
        return np.append(f, sigma), K

    z0 = np.append(np.asarray(x_guess, float), p[param_index])
    res = newton_core(fun, z0, opts)
    q = p.copy()
    q[param_index] = res.x[n]
    x = res.x[:n]
    _, J, _, sigma, _, _, v, u = sys.evaluate(x, q, (param_index,))
    return FoldPoint(x, q, param_index, v, u, sigma, a, b, res.iterations)


def turning_point_continuation(model, fold: FoldPoint, second_param_index: int,
                               opts: ContinuationOptions | None = None, second_derivs: str = "ad",
                               restart=None) -> ContinuationResult:
    """Track a fold in a second parameter.

    Curve points carry ``x = [state, first parameter]`` and ``lam`` equal to
    the second parameter.  Bordering vectors stay fixed along the curve.
    """
    asm = as_assembler(model)
    n = asm.n
    i1, i2 = fold.param_index, second_param_index
    if i1 == i2:
        raise ValueError("fold continuation needs two distinct parameters")
    opts = opts or ContinuationOptions()
    sys = FoldSystem(asm, fold.p, fold.a, fold.b, second_derivs)
    base = np.array(fold.p, dtype=float)

    def fun(y, lam):
        q = base.copy()
        q[i1] = y[n]
        q[i2] = lam
        f, J, fp, sigma, sx, sp, _, _ = sys.evaluate(y[:n], q, (i1, i2))
        G = np.append(f, sigma)
        K = np.zeros((n + 1, n + 1))
        K[:n, :n] = J
        K[:n, n] = fp[:, 0]
        K[n, :n] = sx
        K[n, n] = sp[0]
        Gl = np.append(fp[:, 1], sp[1])
        return G, K, Gl

    y0 = np.append(fold.x, fold.value)
    return arclength_core(fun, y0, base[i2], opts, restart=restart)
