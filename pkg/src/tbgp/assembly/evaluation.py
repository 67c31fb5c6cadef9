"""Evaluation types and their seed/extract rules.

An evaluation type names a product an analysis needs (residual, Jacobian,
...) and binds one scalar type to it.  Only seeding (turning workset
values into scalars) and extraction (turning scalars back into vectors and
matrices) know about the scalar type; everything in between is generic.

Independent inputs come in three blocks: the time derivative ``xdot``
(length n), the state ``x`` (n) and the parameters ``p`` (m).  Where a
single stacked vector is needed (Hessian seeds) the order is
``z = [xdot, x, p]``.

Tangent column map: the first ``k`` derivative columns follow the state
directions ``tangent_x`` (and ``tangent_xdot``); one extra column is then
appended for every parameter listed in ``tangent_params``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from ..basis import TensorBasis
from ..scalars import Dual, PceScalar, value_of


class EvaluationType(enum.Enum):
    RESIDUAL = ("Residual", "real")
    JACOBIAN = ("Jacobian", "Dual<real>")
    TANGENT = ("Tangent", "Dual<real>")
    HESSIAN = ("Hessian", "Dual<Dual<real>>")
    SG_RESIDUAL = ("SGResidual", "Pce<real>")
    SG_JACOBIAN = ("SGJacobian", "Dual<Pce<real>>")

    def __init__(self, label: str, scalar_type: str):
        self.label = label
        self.scalar_type = scalar_type

    @property
    def stochastic(self) -> bool:
        return self in (EvaluationType.SG_RESIDUAL, EvaluationType.SG_JACOBIAN)

    def __str__(self) -> str:
        return self.label


ALL_EVALUATION_TYPES = tuple(EvaluationType)
DETERMINISTIC_TYPES = tuple(et for et in EvaluationType if not et.stochastic)


def scalar_zero(scalar_type: str, basis: TensorBasis | None = None):
    """Default-constructed value for an arena slot of ``scalar_type``."""
    if scalar_type == "real":
        return 0.0
    if scalar_type.startswith("Dual<"):
        return Dual(scalar_zero(scalar_type[5:-1], basis))
    if scalar_type.startswith("Pce<"):
        if basis is None:
            raise ValueError("a PCE field needs a basis")
        return PceScalar.zeros(basis)
    raise ValueError(f"unknown scalar type {scalar_type!r}")


class SeedError(ValueError):
    pass


class NonFiniteError(ArithmeticError):
    pass


@dataclass
class Workset:
    """Inputs for one evaluation sweep and the extracted results.

    ``alpha`` and ``beta`` weight the time-derivative and state seeds in
    Jacobian-type evaluations, so the extracted matrix is
    ``alpha df/dxdot + beta df/dx``.
    """

    xdot: np.ndarray
    x: np.ndarray
    p: np.ndarray
    alpha: float = 0.0
    beta: float = 1.0
    tangent_x: np.ndarray | None = None
    tangent_xdot: np.ndarray | None = None
    tangent_params: tuple[int, ...] = ()
    hess_inner: np.ndarray | None = None
    hess_outer: np.ndarray | None = None
    basis: TensorBasis | None = None
    sg_x: np.ndarray | None = None
    sg_xdot: np.ndarray | None = None
    sg_p: list | None = None
    results: dict = field(default_factory=dict)
    cache: dict = field(default_factory=dict, repr=False)

    @property
    def n(self) -> int:
        return len(self.x)

    @property
    def m(self) -> int:
        return len(self.p)


def _block_offset(ws: Workset, kind: str) -> int:
    return {"xdot": 0, "x": ws.n, "p": 2 * ws.n}[kind]


def _block_values(ws: Workset, kind: str) -> np.ndarray:
    return np.asarray({"xdot": ws.xdot, "x": ws.x, "p": ws.p}[kind], dtype=float)


def _pce_block(ws: Workset, kind: str) -> list[PceScalar]:
    basis = ws.basis
    if basis is None:
        raise SeedError("stochastic seeding needs a basis in the workset")
    N = basis.size
    if kind == "p":
        out = []
        for j, v in enumerate(ws.p):
            c = None if ws.sg_p is None else ws.sg_p[j]
            out.append(PceScalar.constant(float(v), basis) if c is None else PceScalar(c, basis))
        return out
    block = ws.sg_x if kind == "x" else ws.sg_xdot
    if block is None:
        vals = _block_values(ws, kind)
        return [PceScalar.constant(float(v), basis) for v in vals]
    block = np.asarray(block, dtype=float)
    if block.shape != (N, ws.n):
        raise SeedError(f"stochastic {kind} block has shape {block.shape}, expected {(N, ws.n)}")
    return [PceScalar(block[:, i], basis) for i in range(ws.n)]


def seed(et: EvaluationType, ws: Workset, kind: str) -> list:
    """Seeded scalars for the independent block ``kind`` ('xdot', 'x', 'p')."""
    vals = _block_values(ws, kind)
    n = ws.n

    if et is EvaluationType.RESIDUAL:
        return [float(v) for v in vals]

    if et is EvaluationType.JACOBIAN:
        if kind == "p":
            return [Dual(float(v)) for v in vals]
        w = ws.alpha if kind == "xdot" else ws.beta
        out = []
        for i, v in enumerate(vals):
            d = np.zeros(n)
            d[i] = w
            out.append(Dual(float(v), d))
        return out

    if et is EvaluationType.TANGENT:
        params = tuple(ws.tangent_params)
        dirs = ws.tangent_x if kind == "x" else ws.tangent_xdot
        k = 0
        for V in (ws.tangent_x, ws.tangent_xdot):
            if V is not None:
                k = max(k, np.atleast_2d(V).shape[1])
        width = k + len(params)
        out = []
        for i, v in enumerate(vals):
            d = np.zeros(width)
            if kind == "p":
                if i in params:
                    d[k + params.index(i)] = 1.0
            elif dirs is not None:
                V = np.asarray(dirs, dtype=float).reshape(n, -1)
                if V.shape[1] != k:
                    raise SeedError(f"tangent directions have {V.shape[1]} columns, expected {k}")
                d[:k] = V[i]
            out.append(Dual(float(v), d))
        return out

    if et is EvaluationType.HESSIAN:
        V1 = np.asarray(ws.hess_inner, dtype=float)
        V2 = np.asarray(ws.hess_outer, dtype=float)
        nz = 2 * n + ws.m
        if V1.ndim != 2 or V2.ndim != 2 or V1.shape[0] != nz or V2.shape[0] != nz:
            raise SeedError(f"Hessian seeds must have {nz} rows (xdot, x, p stacked)")
        off = _block_offset(ws, kind)
        k1 = V1.shape[1]
        zero_inner = np.zeros(k1)
        out = []
        for i, v in enumerate(vals):
            row = off + i
            inner = Dual(float(v), V1[row].copy())
            outer = np.empty(V2.shape[1], dtype=object)
            for j in range(V2.shape[1]):
                outer[j] = Dual(float(V2[row, j]), zero_inner)
            out.append(Dual(inner, outer))
        return out

    pce = _pce_block(ws, kind)
    if et is EvaluationType.SG_RESIDUAL:
        return pce

    if et is EvaluationType.SG_JACOBIAN:
        if kind == "p":
            return [Dual(c) for c in pce]
        w = ws.alpha if kind == "xdot" else ws.beta
        out = []
        for i, c in enumerate(pce):
            d = np.empty(n, dtype=object)
            for j in range(n):
                d[j] = PceScalar.constant(w if i == j else 0.0, ws.basis)
            out.append(Dual(c, d))
        return out

    raise SeedError(f"no seed rule for {et}")


def _check_finite(arr, names, what):
    arr = np.asarray(arr, dtype=float)
    if not np.all(np.isfinite(arr)):
        bad = np.argwhere(~np.isfinite(arr))[0]
        i = int(bad[-1]) if arr.ndim == 2 and what.endswith("_sg") else int(bad[0])
        name = names[i] if i < len(names) else f"#{i}"
        raise NonFiniteError(f"non-finite {what} in field {name!r} at index {tuple(int(b) for b in bad)}")
    return arr


def _derivs(y, width: int) -> list:
    if isinstance(y, Dual) and y.derivs.shape[0]:
        return list(y.derivs)
    return [0.0] * width


def extract(et: EvaluationType, ws: Workset, kind: str, values: list, names: list[str]) -> dict:
    """Harvest evaluated scalars of block ``kind`` ('f' or 'g') into arrays."""
    n = ws.n
    out = {}
    if et is EvaluationType.RESIDUAL:
        out[kind] = _check_finite([float(v) for v in values], names, kind)

    elif et is EvaluationType.JACOBIAN:
        out[kind] = _check_finite([value_of(v) for v in values], names, kind)
        J = np.array([[float(d) for d in _derivs(v, n)] for v in values]).reshape(len(values), n)
        out[kind + "_jac"] = _check_finite(J, names, kind + "_jac")

    elif et is EvaluationType.TANGENT:
        params = tuple(ws.tangent_params)
        k = 0
        for V in (ws.tangent_x, ws.tangent_xdot):
            if V is not None:
                k = max(k, np.atleast_2d(V).shape[1])
        width = k + len(params)
        out[kind] = _check_finite([value_of(v) for v in values], names, kind)
        D = np.array([[float(d) for d in _derivs(v, width)] for v in values]).reshape(len(values), width)
        D = _check_finite(D, names, kind + "_tangent")
        out[kind + "_dir"] = D[:, :k]
        out[kind + "_dp"] = D[:, k:]

    elif et is EvaluationType.HESSIAN:
        k1 = np.asarray(ws.hess_inner).shape[1]
        k2 = np.asarray(ws.hess_outer).shape[1]
        q = len(values)
        first_inner = np.zeros((q, k1))
        first_outer = np.zeros((q, k2))
        second = np.zeros((q, k1, k2))
        vals = np.zeros(q)
        for i, y in enumerate(values):
            inner = y.value if isinstance(y, Dual) else y
            vals[i] = value_of(inner)
            if isinstance(inner, Dual) and inner.derivs.shape[0]:
                first_inner[i] = [value_of(d) for d in inner.derivs]
            if isinstance(y, Dual) and y.derivs.shape[0]:
                for j, dj in enumerate(y.derivs):
                    if isinstance(dj, Dual):
                        first_outer[i, j] = value_of(dj.value)
                        if dj.derivs.shape[0]:
                            second[i, :, j] = [value_of(d) for d in dj.derivs]
                    else:
                        first_outer[i, j] = float(dj)
        out[kind] = _check_finite(vals, names, kind)
        out[kind + "_inner"] = _check_finite(first_inner, names, kind + "_inner")
        out[kind + "_outer"] = _check_finite(first_outer, names, kind + "_outer")
        out[kind + "_second"] = _check_finite(second, names, kind + "_second")

    elif et is EvaluationType.SG_RESIDUAL:
        out[kind + "_sg"] = _check_finite(_sg_coeffs(values, ws.basis), names, kind + "_sg")

    elif et is EvaluationType.SG_JACOBIAN:
        N = ws.basis.size
        out[kind + "_sg"] = _check_finite(_sg_coeffs([_val(v) for v in values], ws.basis), names, kind + "_sg")
        Jk = np.zeros((N, len(values), n))
        for i, y in enumerate(values):
            for j, d in enumerate(_derivs(y, n)):
                Jk[:, i, j] = _coeffs(d, ws.basis)
        out[kind + "_sg_jac"] = _check_finite(Jk, names, kind + "_sg_jac")
    else:
        raise ValueError(f"no extract rule for {et}")
    return out


def _val(y):
    return y.value if isinstance(y, Dual) else y


def _coeffs(y, basis) -> np.ndarray:
    if isinstance(y, PceScalar):
        return y.coeffs
    c = np.zeros(basis.size)
    c[0] = float(y)
    return c


def _sg_coeffs(values, basis) -> np.ndarray:
    return np.column_stack([_coeffs(v, basis) for v in values]) if values else np.zeros((basis.size, 0))


def finite(x) -> bool:
    return all(math.isfinite(v) for v in np.ravel(x))
