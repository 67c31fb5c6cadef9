"""Polynomial chaos solvers: stochastic Galerkin, NISP and surrogate sampling."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ..basis import QuadratureRule, TensorBasis
from .newton import NewtonError, NewtonOptions, as_assembler, newton_core, newton_solve

RNG_ALGORITHM = "PCG64"


@dataclass(frozen=True)
class UniformParameter:
    """Parameter ``index`` uniform on ``[low, high]``, driven by one germ ``xi`` in [-1, 1]."""

    index: int
    low: float
    high: float

    def __post_init__(self):
        if not self.high > self.low:
            raise ValueError("uniform parameter needs high > low")

    @property
    def mid(self) -> float:
        return 0.5 * (self.low + self.high)

    @property
    def half(self) -> float:
        return 0.5 * (self.high - self.low)

    def at(self, xi):
        return self.mid + self.half * np.asarray(xi, dtype=float)


def _check_map(param_map, basis: TensorBasis):
    if len(param_map) != basis.dimension:
        raise ValueError(f"{len(param_map)} uncertain parameters for a {basis.dimension}-dimensional basis")


def sg_parameter_coeffs(param_map, basis: TensorBasis, m: int) -> list:
    """Per-parameter coefficient arrays (None for deterministic parameters)."""
    _check_map(param_map, basis)
    out = [None] * m
    for d, up in enumerate(param_map):
        c = np.zeros(basis.size)
        c[0] = up.mid
        c[basis.linear_index(d)] = up.half
        out[up.index] = c
    return out


def parameters_at(p, param_map, xi) -> np.ndarray:
    q = np.array(p, dtype=float)
    for d, up in enumerate(param_map):
        q[up.index] = up.at(xi[d])
    return q


@dataclass
class SgSolution:
    """Expansion ``x(xi) = sum_k coeffs[k] psi_k(xi)``; ``coeffs`` is (basis size, n)."""

    coeffs: np.ndarray
    basis: TensorBasis
    iterations: int = 0
    residual_norms: list = field(default_factory=list)

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=float)
        if self.coeffs.ndim != 2 or self.coeffs.shape[0] != self.basis.size:
            raise ValueError(f"coefficient block must have {self.basis.size} rows")

    def mean(self) -> np.ndarray:
        return self.coeffs[0].copy()

    def variance(self) -> np.ndarray:
        return (self.coeffs[1:] ** 2 * self.basis.norms[1:, None]).sum(axis=0)

    def std(self) -> np.ndarray:
        return np.sqrt(self.variance())

    def __call__(self, xi) -> np.ndarray:
        return self.basis.evaluate(np.atleast_2d(xi)) @ self.coeffs


def sg_block_jacobian(Jk: np.ndarray, basis: TensorBasis) -> np.ndarray:
    """``dF_i/dx_j = sum_k J_k <psi_i psi_j psi_k> / <psi_i^2>`` as a dense matrix.

    Unknowns are ordered coefficient-major: ``X[i, :]`` occupies rows
    ``i n .. (i + 1) n``.
    """
    N, n, _ = Jk.shape
    t = basis.triple
    K4 = np.zeros((N, N, n, n))
    np.add.at(K4, (t.i, t.j), (t.values / basis.norms[t.i])[:, None, None] * Jk[t.k])
    return K4.transpose(0, 2, 1, 3).reshape(N * n, N * n)


def sg_newton_solve(model, basis: TensorBasis, param_map, X_guess=None, p=None,
                    opts: NewtonOptions | None = None) -> SgSolution:
    """Newton on the Galerkin-projected residual ``F(X) = 0``."""
    asm = as_assembler(model, basis)
    n = asm.n
    p = np.array(asm.model.p0 if p is None else p, dtype=float)
    for up in param_map:
        p[up.index] = up.mid
    sg_p = sg_parameter_coeffs(param_map, basis, asm.m)
    N = basis.size
    if X_guess is None:
        X_guess = np.zeros((N, n))
        X_guess[0] = newton_solve(asm, asm.model.x0, p, opts).x
    X_guess = np.asarray(X_guess, dtype=float)
    if X_guess.ndim == 1:
        X0 = np.zeros((N, n))
        X0[0] = X_guess
        X_guess = X0

    def fun(z):
        X = z.reshape(N, n)
        F, Jk = asm.sg_jacobian(X, p, sg_p)
        return F.reshape(-1), sg_block_jacobian(Jk, basis)

    res = newton_core(fun, X_guess.reshape(-1), opts or NewtonOptions())
    return SgSolution(res.x.reshape(N, n), basis, res.iterations, res.residual_norms)


class NodeSolveError(RuntimeError):
    def __init__(self, node: int, cause: Exception):
        super().__init__(f"deterministic solve failed at quadrature node {node}: {cause}")
        self.node = node
        self.cause = cause


def _solve_nodes(model, p, param_map, points, nodes, x_guess, opts):
    asm = as_assembler(model)
    out = {}
    guess = np.asarray(x_guess, dtype=float)
    for k in nodes:
        q = parameters_at(p, param_map, points[k])
        try:
            x = newton_solve(asm, guess, q, opts).x
        except NewtonError as exc:
            raise NodeSolveError(int(k), exc) from exc
        out[k] = x
        guess = x
    return out


def nisp_project(model, basis: TensorBasis, param_map, quadrature: QuadratureRule | None = None,
                 p=None, x_guess=None, opts: NewtonOptions | None = None, threads: int = 1) -> SgSolution:
    """Coefficients by quadrature over deterministic solves at each node.

    Each node warm-starts from the previous node.  With ``threads > 1`` the
    nodes are split into contiguous chunks, one assembler per chunk.
    """
    _check_map(param_map, basis)
    base = model.model if hasattr(model, "fm") else model
    p = np.array(base.p0 if p is None else p, dtype=float)
    quad = quadrature or basis.quadrature
    if quad.points.shape[1] != basis.dimension:
        raise ValueError("quadrature dimension does not match the basis")
    x_guess = base.x0 if x_guess is None else x_guess
    S = quad.size
    order = list(range(S))
    if threads <= 1:
        sols = _solve_nodes(base, p, param_map, quad.points, order, x_guess, opts)
    else:
        chunks = [c.tolist() for c in np.array_split(order, threads) if len(c)]
        with ThreadPoolExecutor(max_workers=threads) as ex:
            parts = list(ex.map(lambda c: _solve_nodes(base, p, param_map, quad.points, c, x_guess, opts), chunks))
        sols = {}
        for part in parts:
            sols.update(part)
    Xq = np.array([sols[k] for k in order])
    phi = basis.evaluate(quad.points)
    coeffs = (phi * quad.weights[:, None]).T @ Xq / basis.norms[:, None]
    return SgSolution(coeffs, basis)


@dataclass
class SurrogateSamples:
    samples: np.ndarray
    mean: np.ndarray
    std: np.ndarray
    histograms: list
    rng_seed: int
    algorithm: str = RNG_ALGORITHM


def histogram(values, bins: int = 100):
    """Equal-width histogram over ``[min, max]``; a single bin when the range is empty."""
    values = np.asarray(values, dtype=float)
    lo, hi = float(values.min()), float(values.max())
    if hi <= lo:
        return np.array([lo, hi]), np.array([len(values)])
    counts, edges = np.histogram(values, bins=bins, range=(lo, hi))
    return edges, counts


def sample_surrogate(sol: SgSolution, sample_count: int, rng_seed: int, bins: int = 100) -> SurrogateSamples:
    rng = np.random.Generator(np.random.PCG64(rng_seed))
    xi = rng.uniform(-1.0, 1.0, size=(sample_count, sol.basis.dimension))
    samples = sol(xi)
    hists = [histogram(samples[:, i], bins) for i in range(samples.shape[1])]
    return SurrogateSamples(samples, samples.mean(axis=0), samples.std(axis=0, ddof=1), hists, rng_seed)


__all__ = [
    "NodeSolveError",
    "RNG_ALGORITHM",
    "SgSolution",
    "SurrogateSamples",
    "UniformParameter",
    "histogram",
    "nisp_project",
    "parameters_at",
    "sample_surrogate",
    "sg_block_jacobian",
    "sg_newton_solve",
    "sg_parameter_coeffs",
]
