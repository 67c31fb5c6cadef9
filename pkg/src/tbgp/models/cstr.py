"""Continuous stirred tank reactor models.

Two forms share the contract:

* :class:`CstrNondimModel`: dimensionless states ``(x, y)`` (conversion and
  temperature) with parameters ``(D, B, beta, gamma, y_c)``.  ``gamma =
  inf`` makes the exponential argument exactly ``y``.
* :class:`CstrFullModel`: dimensional states ``(c_A, T)`` whose graph splits
  the mass and energy balances into accumulation, in, out, generation and
  consumption terms plus the rate law and the Arrhenius constant.
"""

from __future__ import annotations

import math

import numpy as np

from ..assembly import FunctionEvaluator
from ..scalars import exp, value_of
from .base import DaeModel, register_leaves, register_outputs


# -- dimensionless model -----------------------------------------------------


def nondim_rhs(x, y, D, B, beta, gamma, y_c):
    """Right-hand sides of the dimensionless balances."""
    if math.isinf(value_of(gamma)):
        arg = y
    else:
        arg = y / (1.0 + y / gamma)
    rate = D * (1.0 - x) * exp(arg)
    return -x + rate, -y + B * rate - beta * (y - y_c)


def nondim_residual(x_dot, y_dot, rhs_x, rhs_y):
    return x_dot - rhs_x, y_dot - rhs_y


class CstrNondimModel(DaeModel):
    state_names = ("x", "y")
    param_names = ("D", "B", "beta", "gamma", "y_c")

    def __init__(self, D=0.05, B=8.0, beta=0.3, gamma=math.inf, y_c=0.0, x0=None):
        super().__init__(x0, [D, B, beta, gamma, y_c])

    def residual(self, xdot, x, p) -> list:
        self.check_sizes(xdot, x, p)
        rx, ry = nondim_rhs(x[0], x[1], *p)
        return list(nondim_residual(xdot[0], xdot[1], rx, ry))

    def register_compute(self, fm, et) -> None:
        fm.register_evaluator(et, FunctionEvaluator(
            "rhs", ("rhs_x", "rhs_y"), ("x", "y") + self.param_names, nondim_rhs, et))
        fm.register_evaluator(et, FunctionEvaluator(
            "residual", self.residual_names, ("x_dot", "y_dot", "rhs_x", "rhs_y"), nondim_residual, et))


def reduced_steady_residual(x, D, B, beta):
    """Scalar steady equation after eliminating ``y = B x / (1 + beta)``.

    Valid for ``gamma = inf`` and ``y_c = 0``.
    """
    return -x + D * (1.0 - x) * np.exp(B * x / (1.0 + beta))


def count_steady_states(D, B, beta, points: int = 10_000) -> int:
    """Sign changes of the reduced steady equation on a uniform grid of [0, 1]."""
    xs = np.linspace(0.0, 1.0, points)
    h = reduced_steady_residual(xs, D, B, beta)
    s = np.sign(h)
    return int(np.count_nonzero(s[1:] * s[:-1] < 0))


def multiplicity_window(B, beta, D_grid, points: int = 10_000):
    """``(D_lo, D_hi)`` bounding the grid values of ``D`` with three steady states, or None."""
    three = [D for D in D_grid if count_steady_states(D, B, beta, points) == 3]
    if not three:
        return None
    return min(three), max(three)


def multiplicity_scan(B_grid, beta_grid, D_grid, points: int = 2_000) -> list[tuple[float, float, int]]:
    """For each ``(B, beta)`` the number of ``D`` grid values with three steady states."""
    out = []
    for B in B_grid:
        for beta in beta_grid:
            k = sum(count_steady_states(D, B, beta, points) == 3 for D in D_grid)
            out.append((float(B), float(beta), int(k)))
    return out


# -- dimensional model -------------------------------------------------------

FULL_PARAMS = ("V", "F", "lambda", "c_Af", "T_f", "rho", "Cp", "dH", "h", "A", "T_c", "k0", "E", "R")


def term_A_acc(V, c_A_dot):
    return V * c_A_dot


def term_A_in(F, lam, c_Af, c_A):
    return F * (lam * c_Af + (1.0 - lam) * c_A)


def term_A_out(F, c_A):
    return F * c_A


def term_A_gen():
    return 0.0


def term_A_cons(V, r):
    return V * r


def term_T_acc(V, rho, Cp, T_dot):
    return V * rho * Cp * T_dot


def term_T_in(rho, Cp, F, lam, T_f, T):
    return rho * Cp * F * (lam * T_f + (1.0 - lam) * T)


def term_T_out(rho, Cp, F, T):
    return rho * Cp * F * T


def term_T_gen(V, dH, r):
    return V * (-dH) * r


def term_T_cons(h, A, T, T_c):
    return h * A * (T - T_c)


def rate_law(k, c_A):
    return k * c_A


def arrhenius(k0, E, R, T):
    return k0 * exp(-E / (R * T))


def balance(acc, inflow, outflow, gen, cons):
    return acc - inflow + outflow - gen + cons


class CstrFullModel(DaeModel):
    """Dimensional CSTR.

    :meth:`residual` is the monolithic routine; :meth:`build_graph` registers
    the term decomposition.  Both apply the same operations in the same
    order, so their residual values agree bit for bit.
    """

    state_names = ("c_A", "T")
    param_names = FULL_PARAMS

    def __init__(self, params: dict, x0=None, constant_k: bool = False):
        missing = [k for k in FULL_PARAMS if k not in params]
        unknown = [k for k in params if k not in FULL_PARAMS]
        if missing or unknown:
            raise ValueError(f"CSTR parameters: missing {missing}, unknown {unknown}")
        self.constant_k = constant_k
        super().__init__(x0, [float(params[k]) for k in FULL_PARAMS])

    @property
    def residual_names(self) -> tuple[str, ...]:
        return ("f_A", "f_T")

    def residual(self, xdot, x, p) -> list:
        self.check_sizes(xdot, x, p)
        V, F, lam, c_Af, T_f, rho, Cp, dH, h, A, T_c, k0, E, R = p
        c_A, T = x
        k = k0 if self.constant_k else arrhenius(k0, E, R, T)
        r = rate_law(k, c_A)
        f_A = balance(term_A_acc(V, xdot[0]), term_A_in(F, lam, c_Af, c_A), term_A_out(F, c_A),
                      term_A_gen(), term_A_cons(V, r))
        f_T = balance(term_T_acc(V, rho, Cp, xdot[1]), term_T_in(rho, Cp, F, lam, T_f, T),
                      term_T_out(rho, Cp, F, T), term_T_gen(V, dH, r), term_T_cons(h, A, T, T_c))
        return [f_A, f_T]

    def build_graph(self, fm, et) -> None:
        build_cstr_graph(fm, et, self)


def _terms(constant_k: bool):
    k = ("k", ("k0",), lambda k0: k0) if constant_k else ("k", ("k0", "E", "R", "T"), arrhenius)
    return [
        ("f_A_acc", ("V", "c_A_dot"), term_A_acc),
        ("f_A_in", ("F", "lambda", "c_Af", "c_A"), term_A_in),
        ("f_A_out", ("F", "c_A"), term_A_out),
        ("f_A_gen", (), term_A_gen),
        ("f_A_cons", ("V", "r_A->B"), term_A_cons),
        ("f_T_acc", ("V", "rho", "Cp", "T_dot"), term_T_acc),
        ("f_T_in", ("rho", "Cp", "F", "lambda", "T_f", "T"), term_T_in),
        ("f_T_out", ("rho", "Cp", "F", "T"), term_T_out),
        ("f_T_gen", ("V", "dH", "r_A->B"), term_T_gen),
        ("f_T_cons", ("h", "A", "T", "T_c"), term_T_cons),
        ("r_A->B", ("k", "c_A"), rate_law),
        k,
        ("f_A", ("f_A_acc", "f_A_in", "f_A_out", "f_A_gen", "f_A_cons"), balance),
        ("f_T", ("f_T_acc", "f_T_in", "f_T_out", "f_T_gen", "f_T_cons"), balance),
    ]


def build_cstr_graph(fm, et, model, variant: str | None = None, constant_k: bool | None = None) -> None:
    """Register leaves, compute evaluators and scatters of a CSTR model for ``et``.

    ``variant`` ('full' or 'nondim') defaults to the model's own form.
    ``constant_k`` swaps the Arrhenius evaluator for ``k = k0``.
    """
    if variant is None:
        variant = "full" if isinstance(model, CstrFullModel) else "nondim"
    if variant == "nondim":
        if not isinstance(model, CstrNondimModel):
            raise TypeError("nondim variant needs a CstrNondimModel")
        DaeModel.build_graph(model, fm, et)
        return
    if variant != "full":
        raise ValueError(f"unknown CSTR variant {variant!r}")
    if not isinstance(model, CstrFullModel):
        raise TypeError("full variant needs a CstrFullModel")
    if constant_k is None:
        constant_k = model.constant_k
    register_leaves(fm, et, model)
    for name, inputs, fn in _terms(constant_k):
        fm.register_evaluator(et, FunctionEvaluator(name, (name,), inputs, fn, et))
    register_outputs(fm, et, model)


CSTR_EDGES = frozenset({
    ("f_A", "f_A_acc"), ("f_A", "f_A_in"), ("f_A", "f_A_out"), ("f_A", "f_A_gen"), ("f_A", "f_A_cons"),
    ("f_A_acc", "c_A_dot"), ("f_A_in", "c_A"), ("f_A_out", "c_A"), ("f_A_cons", "r_A->B"),
    ("r_A->B", "k"), ("r_A->B", "c_A"),
    ("f_T", "f_T_acc"), ("f_T", "f_T_in"), ("f_T", "f_T_out"), ("f_T", "f_T_gen"), ("f_T", "f_T_cons"),
    ("f_T_acc", "T_dot"), ("f_T_in", "T"), ("f_T_out", "T"), ("f_T_cons", "T"), ("f_T_gen", "r_A->B"),
    ("k", "T"),
})
"""Consumer -> dependency edges of the full CSTR decomposition (states as leaves)."""
