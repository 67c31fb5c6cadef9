"""Legendre polynomial chaos bases on the uniform measure over [-1, 1]^m.

All inner products are taken against the probability density, so
``<1> = 1`` and ``<P_k^2> = 1 / (2k + 1)`` in one dimension.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field

import numpy as np

MAX_BASIS_SIZE = 100_000
TRIPLE_PRUNE = 1e-14


def legendre_eval(degree: int, y):
    """Legendre polynomial ``P_degree`` at ``y`` by the three-term recurrence."""
    y = np.asarray(y, dtype=float)
    p_prev = np.ones_like(y)
    if degree == 0:
        return p_prev if p_prev.ndim else float(p_prev)
    p = y.copy()
    for k in range(1, degree):
        p_prev, p = p, ((2 * k + 1) * y * p - k * p_prev) / (k + 1)
    return p if p.ndim else float(p)


def legendre_table(order: int, y) -> np.ndarray:
    """Values ``P_0 .. P_order`` at ``y``; shape ``y.shape + (order + 1,)``."""
    y = np.asarray(y, dtype=float)
    out = np.empty(y.shape + (order + 1,))
    out[..., 0] = 1.0
    if order >= 1:
        out[..., 1] = y
    for k in range(1, order):
        out[..., k + 1] = ((2 * k + 1) * y * out[..., k] - k * out[..., k - 1]) / (k + 1)
    return out


def gauss_points_1d(count: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights normalized to sum to one."""
    if count < 1:
        raise ValueError("need at least one quadrature point")
    x, w = np.polynomial.legendre.leggauss(count)
    return x, w / 2.0


@dataclass(frozen=True)
class QuadratureRule:
    points: np.ndarray   # (Q, m)
    weights: np.ndarray  # (Q,)
    exactness: int       # per-dimension polynomial degree integrated exactly

    @property
    def size(self) -> int:
        return self.weights.shape[0]

    @classmethod
    def tensor(cls, m: int, points_per_dim: int) -> "QuadratureRule":
        x, w = gauss_points_1d(points_per_dim)
        pts = np.array(list(itertools.product(x, repeat=m))).reshape(-1, m)
        wts = np.array([math.prod(c) for c in itertools.product(w, repeat=m)])
        return cls(pts, wts, 2 * points_per_dim - 1)

    def integrate(self, values) -> np.ndarray:
        return np.tensordot(self.weights, np.asarray(values, dtype=float), axes=(0, 0))


def total_order_indices(m: int, order: int) -> np.ndarray:
    """Multi-indices with ``|alpha| <= order`` in graded lexicographic order.

    Within a total degree the first variable varies slowest and largest
    first, so the linear terms come out as ``e_1, e_2, ...``.
    """
    out = []
    for d in range(order + 1):
        block = [a for a in itertools.product(range(d, -1, -1), repeat=m) if sum(a) == d]
        out.extend(block)
    return np.array(out, dtype=int).reshape(-1, m)


@dataclass
class TripleProductTensor:
    """Sparse ``<psi_i psi_j psi_k>`` with every permutation stored.

    Values are computed once per unordered triple, so all six permutations
    hold the identical float.
    """

    i: np.ndarray
    j: np.ndarray
    k: np.ndarray
    values: np.ndarray
    size: int
    _lookup: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self._lookup = {
            (a, b, c): v for a, b, c, v in zip(self.i.tolist(), self.j.tolist(), self.k.tolist(), self.values.tolist())
        }

    def __call__(self, i: int, j: int, k: int) -> float:
        for idx in (i, j, k):
            if not 0 <= idx < self.size:
                raise IndexError(f"basis index {idx} out of range for size {self.size}")
        return self._lookup.get((i, j, k), 0.0)

    def __len__(self) -> int:
        return self.values.shape[0]

    def dense(self) -> np.ndarray:
        T = np.zeros((self.size,) * 3)
        T[self.i, self.j, self.k] = self.values
        return T


def _triple_products(alphas: np.ndarray, order: int) -> TripleProductTensor:
    """Tensor triple products as per-dimension products of 1-D Legendre triples.

    The 1-D table ``<P_a P_b P_c>`` comes from a Gauss rule exact for degree
    ``3 * order``.
    """
    N, m = alphas.shape
    y, w = gauss_points_1d(max(1, (3 * order) // 2 + 1))
    P = legendre_table(order, y)
    t1 = np.einsum("q,qa,qb,qc->abc", w, P, P, P)
    I, J, K, V = [], [], [], []
    for a in range(N):
        # entries with a <= b <= c; fill the permutations from these
        block = np.ones((N - a, N - a))
        for d in range(m):
            block *= t1[alphas[a, d]][np.ix_(alphas[a:, d], alphas[a:, d])]
        bb, cc = np.nonzero(np.triu(np.abs(block) > TRIPLE_PRUNE))
        for b, c in zip(bb + a, cc + a):
            v = block[b - a, c - a]
            for p in set(itertools.permutations((a, b, c))):
                I.append(p[0])
                J.append(p[1])
                K.append(p[2])
                V.append(v)
    sort = np.lexsort((K, J, I))
    as_int = lambda seq: np.asarray(seq, dtype=int)[sort]
    return TripleProductTensor(as_int(I), as_int(J), as_int(K), np.asarray(V, dtype=float)[sort], N)


@dataclass
class TensorBasis:
    """Total-order tensor Legendre basis with its quadrature and triple products."""

    dimension: int
    order: int
    multi_indices: np.ndarray
    norms: np.ndarray
    quadrature: QuadratureRule
    triple: TripleProductTensor
    phi_at_nodes: np.ndarray = field(repr=False)  # (Q, N) basis values at quadrature nodes

    @property
    def size(self) -> int:
        return self.multi_indices.shape[0]

    def evaluate(self, points) -> np.ndarray:
        """Basis values at ``points`` (shape (S, m)); returns (S, N)."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        if pts.shape[1] != self.dimension:
            raise ValueError(f"points must have {self.dimension} columns")
        table = legendre_table(self.order, pts)  # (S, m, order+1)
        out = np.ones((pts.shape[0], self.size))
        for d in range(self.dimension):
            out *= table[:, d, self.multi_indices[:, d]]
        return out

    def index_of(self, alpha) -> int:
        alpha = tuple(int(a) for a in alpha)
        for k, row in enumerate(self.multi_indices):
            if tuple(row) == alpha:
                return k
        raise KeyError(f"multi-index {alpha} is not in the basis")

    def linear_index(self, dim: int) -> int:
        """Basis index of the degree-one polynomial in variable ``dim``."""
        e = [0] * self.dimension
        e[dim] = 1
        return self.index_of(e)

    def project(self, values_at_nodes) -> np.ndarray:
        """Spectral projection of nodal values onto the basis."""
        v = np.asarray(values_at_nodes, dtype=float)
        w = self.quadrature.weights
        c = np.tensordot(self.phi_at_nodes * w[:, None], v, axes=(0, 0))
        return c / self.norms.reshape((-1,) + (1,) * (c.ndim - 1))

    def to_json(self) -> str:
        return json.dumps(
            {
                "dimension": self.dimension,
                "order": self.order,
                "size": self.size,
                "multi_indices": self.multi_indices.tolist(),
                "norms": self.norms.tolist(),
                "quadrature_points_per_dim": (self.quadrature.exactness + 1) // 2,
                "triple_product_entries": len(self.triple),
            },
            indent=2,
        )


def build_tensor_basis(m: int, order: int, points_per_dim: int | None = None) -> TensorBasis:
    if m < 1:
        raise ValueError("basis dimension must be at least 1")
    if order < 0:
        raise ValueError("basis order must be non-negative")
    size = math.comb(m + order, m)
    if size > MAX_BASIS_SIZE:
        raise ValueError(f"basis size {size} exceeds the limit of {MAX_BASIS_SIZE}")
    if points_per_dim is None:
        points_per_dim = order + 1
    alphas = total_order_indices(m, order)
    norms = np.prod(1.0 / (2 * alphas + 1), axis=1)
    quad = QuadratureRule.tensor(m, points_per_dim)
    partial = TensorBasis(m, order, alphas, norms, quad, None, None)
    phi = partial.evaluate(quad.points)
    partial.phi_at_nodes = phi
    partial.triple = _triple_products(alphas, order)
    return partial
