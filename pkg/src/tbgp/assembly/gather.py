"""Seed (gather) and extract (scatter) evaluators.

These are the only evaluators specialized per evaluation type; compute
evaluators between them are generic.  Each independent variable gets its
own gather node so that graph dumps show states as distinct leaves.
"""

from __future__ import annotations

from .evaluation import EvaluationType, extract, seed
from .fields import DUMMY, SCALAR
from .manager import Evaluator


class Gather(Evaluator):
    """Seeds entry ``index`` of the independent block ``block``."""

    def __init__(self, et: EvaluationType, block: str, index: int, name: str):
        if block not in ("xdot", "x", "p"):
            raise ValueError(f"unknown independent block {block!r}")
        super().__init__(name)
        self.kind = "seed" if block == "p" else "state"
        self.et = et
        self.block = block
        self.index = index
        self.out = self.evaluates(name, SCALAR, et)

    def evaluate(self, workset) -> None:
        key = (self.et, self.block)
        vals = workset.cache.get(key)
        if vals is None:
            vals = seed(self.et, workset, self.block)
            workset.cache[key] = vals
        self.out[0] = vals[self.index]


class Scatter(Evaluator):
    """Extracts block ``block`` ('f' residual or 'g' response) into the workset."""

    kind = "extract"

    def __init__(self, et: EvaluationType, block: str, names: list[str]):
        super().__init__(f"Scatter {block}")
        self.et = et
        self.block = block
        self.names = list(names)
        self.inputs = [self.depends(n, SCALAR, et) for n in self.names]
        self.marker = self.evaluates(f"Scatter {block}", DUMMY, et)

    def evaluate(self, workset) -> None:
        values = [f[0] for f in self.inputs]
        workset.results.update(extract(self.et, workset, self.block, values, self.names))
