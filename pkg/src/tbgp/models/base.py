"""The DAE model contract ``f(xdot, x, p) = 0`` with responses ``g(x, p)``."""

from __future__ import annotations

import numpy as np

from ..assembly import FunctionEvaluator, Gather, Scatter


class DaeModel:
    """Base class for models written once against the scalar contract.

    Subclasses set ``state_names`` and ``param_names`` and implement
    :meth:`residual` on sequences of any contract scalar.  The default
    response is the state itself; override :meth:`response` (and
    ``response_names``) for anything else.
    """

    state_names: tuple[str, ...] = ()
    param_names: tuple[str, ...] = ()

    def __init__(self, x0=None, p0=None):
        self.x0 = np.zeros(self.n) if x0 is None else np.asarray(x0, dtype=float)
        self.p0 = np.zeros(self.m) if p0 is None else np.asarray(p0, dtype=float)
        if self.x0.shape != (self.n,) or self.p0.shape != (self.m,):
            raise ValueError("nominal state or parameter vector has the wrong length")

    @property
    def n(self) -> int:
        return len(self.state_names)

    @property
    def m(self) -> int:
        return len(self.param_names)

    @property
    def q(self) -> int:
        return len(self.response_names)

    @property
    def rate_names(self) -> tuple[str, ...]:
        return tuple(s + "_dot" for s in self.state_names)

    @property
    def residual_names(self) -> tuple[str, ...]:
        return tuple("f_" + s for s in self.state_names)

    @property
    def response_names(self) -> tuple[str, ...]:
        return self.state_names

    @property
    def identity_response(self) -> bool:
        return type(self).response is DaeModel.response

    def param_index(self, name: str) -> int:
        try:
            return self.param_names.index(name)
        except ValueError:
            raise KeyError(f"unknown parameter {name!r}; known: {', '.join(self.param_names)}") from None

    def with_params(self, p) -> np.ndarray:
        """Nominal parameters updated from a name->value mapping."""
        out = self.p0.copy()
        for k, v in dict(p).items():
            out[self.param_index(k)] = float(v)
        return out

    def residual(self, xdot, x, p) -> list:
        raise NotImplementedError

    def response(self, x, p) -> list:
        return list(x)

    def check_sizes(self, xdot, x, p) -> None:
        if len(xdot) != self.n or len(x) != self.n or len(p) != self.m:
            raise ValueError(
                f"expected (xdot, x, p) of lengths ({self.n}, {self.n}, {self.m}), "
                f"got ({len(xdot)}, {len(x)}, {len(p)})"
            )

    # -- graph ---------------------------------------------------------------

    def build_graph(self, fm, et) -> None:
        register_leaves(fm, et, self)
        self.register_compute(fm, et)
        register_outputs(fm, et, self)

    def register_compute(self, fm, et) -> None:
        """Default decomposition: one evaluator for the whole residual."""
        n = self.n
        names = self.rate_names + self.state_names + self.param_names

        def fn(*v):
            return tuple(self.residual(v[:n], v[n:2 * n], v[2 * n:]))

        fm.register_evaluator(et, FunctionEvaluator("residual", self.residual_names, names, fn, et))


def register_leaves(fm, et, model: DaeModel) -> None:
    for i, name in enumerate(model.rate_names):
        fm.register_evaluator(et, Gather(et, "xdot", i, name))
    for i, name in enumerate(model.state_names):
        fm.register_evaluator(et, Gather(et, "x", i, name))
    for i, name in enumerate(model.param_names):
        fm.register_evaluator(et, Gather(et, "p", i, name))


def register_outputs(fm, et, model: DaeModel) -> None:
    """Response evaluator (unless identity) plus both scatters, required as roots."""
    if model.identity_response:
        g_fields = model.state_names
    else:
        g_fields = tuple("g_" + r for r in model.response_names)
        n = model.n
        names = model.state_names + model.param_names

        def fn(*v):
            return tuple(model.response(v[:n], v[n:]))

        fm.register_evaluator(et, FunctionEvaluator("response", g_fields, names, fn, et))
    for block, names in (("f", model.residual_names), ("g", g_fields)):
        s = Scatter(et, block, names)
        fm.register_evaluator(et, s)
        fm.require_field(et, s.marker.tag)


class FunctionModel(DaeModel):
    """Model from plain callables; handy for small test problems.

    ``residual_fn(xdot, x, p)`` and the optional ``response_fn(x, p)``
    return sequences of scalars.
    """

    def __init__(self, residual_fn, n, m, x0=None, p0=None, response_fn=None, q=None,
                 state_names=None, param_names=None):
        self.state_names = tuple(state_names or (f"x{i}" for i in range(n)))
        self.param_names = tuple(param_names or (f"p{j}" for j in range(m)))
        self._residual_fn = residual_fn
        self._response_fn = response_fn
        self._q = q
        super().__init__(x0, p0)

    @property
    def identity_response(self) -> bool:
        return self._response_fn is None

    @property
    def response_names(self) -> tuple[str, ...]:
        if self._response_fn is None:
            return self.state_names
        q = self._q if self._q is not None else 1
        return tuple(f"r{i}" for i in range(q))

    def residual(self, xdot, x, p) -> list:
        return list(self._residual_fn(xdot, x, p))

    def response(self, x, p) -> list:
        if self._response_fn is None:
            return list(x)
        return list(self._response_fn(x, p))


__all__ = ["DaeModel", "FunctionModel", "register_leaves", "register_outputs"]
