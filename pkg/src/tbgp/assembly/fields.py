"""Field identification (tags, layouts) and the MdField handle."""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class DataLayout:
    """Shape signature of a multidimensional field."""

    names: tuple[str, ...]
    sizes: tuple[int, ...]
    name: str = ""

    def __post_init__(self):
        if len(self.names) != len(self.sizes):
            raise ValueError("layout needs one size per ordinal name")
        if any(s < 0 for s in self.sizes):
            raise ValueError("layout sizes must be non-negative")

    @property
    def rank(self) -> int:
        return len(self.sizes)

    @property
    def size(self) -> int:
        return math.prod(self.sizes)


SCALAR = DataLayout(("Dim",), (1,), "scalar")
DUMMY = DataLayout(("Dummy",), (0,), "dummy")


def vector_layout(n: int, name: str = "vector") -> DataLayout:
    return DataLayout(("Dim",), (n,), name)


@dataclass(frozen=True)
class FieldTag:
    """Registry key: a field is identified by name, scalar type and layout."""

    name: str
    scalar_type: str
    layout: DataLayout

    def __str__(self) -> str:
        return f"{self.name}<{self.scalar_type}>"


class UnboundFieldError(RuntimeError):
    pass


class MdField:
    """Handle onto registry-owned storage for one field."""

    __slots__ = ("tag", "_data")

    def __init__(self, name: str, layout: DataLayout, scalar_type):
        token = getattr(scalar_type, "scalar_type", scalar_type)
        self.tag = FieldTag(name, str(token), layout)
        self._data = None

    @property
    def name(self) -> str:
        return self.tag.name

    @property
    def bound(self) -> bool:
        return self._data is not None

    @property
    def size(self) -> int:
        return self.tag.layout.size

    def bind(self, storage) -> None:
        if len(storage) != self.size:
            raise ValueError(f"storage for {self.tag} has {len(storage)} slots, expected {self.size}")
        self._data = storage

    def _storage(self):
        if self._data is None:
            raise UnboundFieldError(f"field {self.tag} is not bound")
        return self._data

    def __getitem__(self, i):
        return self._storage()[i]

    def __setitem__(self, i, value):
        self._storage()[i] = value

    def __len__(self) -> int:
        return self.size

    def values(self) -> list:
        return list(self._storage())

    def assign(self, values) -> None:
        data = self._storage()
        values = list(values)
        if len(values) != len(data):
            raise ValueError(f"{self.tag}: got {len(values)} values for {len(data)} slots")
        for i, v in enumerate(values):
            data[i] = v

    def __repr__(self) -> str:
        return f"MdField({self.tag}, bound={self.bound})"
