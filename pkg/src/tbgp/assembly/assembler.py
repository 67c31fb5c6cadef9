"""Analysis-facing front end: one call per evaluation product."""

from __future__ import annotations

import numpy as np

from .evaluation import DETERMINISTIC_TYPES, ALL_EVALUATION_TYPES, EvaluationType, Workset
from .manager import ContiguousArena, FieldManager

ET = EvaluationType


class Assembler:
    """Builds and compiles a model's graph lazily per evaluation type.

    ``model`` must provide ``n``, ``m``, ``q`` and ``build_graph(fm, et)``.
    Stochastic types are available only when a basis is given.
    """

    def __init__(self, model, basis=None, eval_types=None, allocator=ContiguousArena):
        if eval_types is None:
            eval_types = ALL_EVALUATION_TYPES if basis is not None else DETERMINISTIC_TYPES
        self.model = model
        self.basis = basis
        self.fm = FieldManager(eval_types, basis=basis, allocator=allocator)
        self._built = set()

    @property
    def n(self) -> int:
        return self.model.n

    @property
    def m(self) -> int:
        return self.model.m

    def prepare(self, et: EvaluationType) -> FieldManager:
        if et not in self._built:
            self.model.build_graph(self.fm, et)
            self.fm.compile(et)
            self._built.add(et)
        return self.fm

    def workset(self, x, p, xdot=None, **kw) -> Workset:
        x = np.asarray(x, dtype=float)
        p = np.asarray(p, dtype=float)
        if x.shape != (self.n,):
            raise ValueError(f"state has shape {x.shape}, expected ({self.n},)")
        if p.shape != (self.m,):
            raise ValueError(f"parameters have shape {p.shape}, expected ({self.m},)")
        xdot = np.zeros(self.n) if xdot is None else np.asarray(xdot, dtype=float)
        if xdot.shape != (self.n,):
            raise ValueError(f"state rate has shape {xdot.shape}, expected ({self.n},)")
        return Workset(xdot=xdot, x=x, p=p, basis=self.basis, **kw)

    def evaluate(self, et: EvaluationType, ws: Workset) -> dict:
        self.prepare(et).evaluate(et, ws)
        return ws.results

    # -- products ----------------------------------------------------------

    def residual(self, x, p, xdot=None) -> np.ndarray:
        return self.evaluate(ET.RESIDUAL, self.workset(x, p, xdot))["f"]

    def response(self, x, p, xdot=None) -> np.ndarray:
        return self.evaluate(ET.RESIDUAL, self.workset(x, p, xdot))["g"]

    def jacobian(self, x, p, xdot=None, alpha=0.0, beta=1.0):
        """``(f, alpha df/dxdot + beta df/dx)``."""
        r = self.evaluate(ET.JACOBIAN, self.workset(x, p, xdot, alpha=alpha, beta=beta))
        return r["f"], r["f_jac"]

    def mass_matrix(self, x, p, xdot=None) -> np.ndarray:
        return self.jacobian(x, p, xdot, alpha=1.0, beta=0.0)[1]

    def response_jacobian(self, x, p, xdot=None):
        r = self.evaluate(ET.JACOBIAN, self.workset(x, p, xdot))
        return r["g"], r["g_jac"]

    def tangent(self, x, p, V=None, params=(), xdot=None, Vdot=None) -> dict:
        """Directional derivatives along state directions ``V`` plus parameter columns."""
        ws = self.workset(x, p, xdot, tangent_params=tuple(params))
        if V is not None:
            ws.tangent_x = np.asarray(V, dtype=float).reshape(self.n, -1)
        if Vdot is not None:
            ws.tangent_xdot = np.asarray(Vdot, dtype=float).reshape(self.n, -1)
        return self.evaluate(ET.TANGENT, ws)

    def param_derivatives(self, x, p, params=None, xdot=None):
        """``(df/dp, dg/dp)`` for the selected parameter indices."""
        params = tuple(range(self.m)) if params is None else tuple(params)
        r = self.tangent(x, p, params=params, xdot=xdot)
        return r["f_dp"], r["g_dp"]

    def hessian(self, x, p, inner, outer, xdot=None) -> dict:
        """Second directional derivatives over ``z = [xdot, x, p]``.

        ``f_second[i, a, b]`` is ``inner[:, a]^T (d2 f_i / dz2) outer[:, b]``.
        """
        ws = self.workset(x, p, xdot, hess_inner=np.asarray(inner, float), hess_outer=np.asarray(outer, float))
        return self.evaluate(ET.HESSIAN, ws)

    def sg_residual(self, X, p, sg_p=None, Xdot=None) -> np.ndarray:
        """Galerkin residual blocks, shape (basis size, n)."""
        ws = self._sg_workset(X, p, sg_p, Xdot)
        return self.evaluate(ET.SG_RESIDUAL, ws)["f_sg"]

    def sg_jacobian(self, X, p, sg_p=None, Xdot=None):
        """``(F, J_k)`` with ``J_k`` of shape (basis size, n, n)."""
        ws = self._sg_workset(X, p, sg_p, Xdot)
        r = self.evaluate(ET.SG_JACOBIAN, ws)
        return r["f_sg"], r["f_sg_jac"]

    def _sg_workset(self, X, p, sg_p, Xdot) -> Workset:
        if self.basis is None:
            raise ValueError("stochastic products need an assembler built with a basis")
        X = np.asarray(X, dtype=float)
        ws = self.workset(X[0], p)
        ws.sg_x = X
        ws.sg_xdot = None if Xdot is None else np.asarray(Xdot, dtype=float)
        ws.sg_p = sg_p
        return ws
