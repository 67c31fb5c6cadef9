"""Evaluator registry, dependency graph, scheduler and field storage."""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field

import numpy as np

from .evaluation import ALL_EVALUATION_TYPES, EvaluationType, scalar_zero
from .fields import SCALAR, DataLayout, FieldTag, MdField

MAX_ARENA_SLOTS = 50_000_000


class AssemblyError(RuntimeError):
    pass


class DuplicateProducerError(AssemblyError):
    pass


class CycleError(AssemblyError):
    def __init__(self, path: list[FieldTag]):
        self.path = path
        super().__init__("dependency cycle: " + " -> ".join(t.name for t in path))


class UnmetDependencyError(AssemblyError):
    def __init__(self, tag: FieldTag, consumer: str | None):
        self.tag = tag
        who = f" (needed by {consumer!r})" if consumer else ""
        super().__init__(f"no evaluator produces field {tag}{who}")


class GraphCompiledError(AssemblyError):
    pass


class EvaluatorError(AssemblyError):
    """An evaluator raised during a sweep; ``__cause__`` holds the original."""

    def __init__(self, evaluator: str, cause: BaseException):
        self.evaluator = evaluator
        self.cause = cause
        super().__init__(f"evaluator {evaluator!r} failed: {cause}")


class Evaluator:
    """Compute node: declares produced and consumed fields, then fills them.

    Subclasses create their fields in ``__init__`` through :meth:`evaluates`
    and :meth:`depends`, and implement :meth:`evaluate`.  ``kind`` is one of
    ``compute``, ``seed``, ``state`` (a seed of a state or its rate) and
    ``extract``; it only affects graph dumps.
    """

    kind = "compute"

    def __init__(self, name: str):
        self.name = name
        self.evaluated: list[MdField] = []
        self.dependent: list[MdField] = []

    def evaluates(self, name: str, layout: DataLayout, scalar_type) -> MdField:
        f = MdField(name, layout, scalar_type)
        self.evaluated.append(f)
        return f

    def depends(self, name: str, layout: DataLayout, scalar_type) -> MdField:
        f = MdField(name, layout, scalar_type)
        self.dependent.append(f)
        return f

    @property
    def evaluated_tags(self) -> list[FieldTag]:
        return [f.tag for f in self.evaluated]

    @property
    def dependent_tags(self) -> list[FieldTag]:
        return [f.tag for f in self.dependent]

    def bind(self, storage) -> None:
        """Resolve every field handle against registry storage."""
        for f in self.evaluated + self.dependent:
            f.bind(storage(f.tag))

    def evaluate(self, workset) -> None:
        raise NotImplementedError

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.name!r})"


class FunctionEvaluator(Evaluator):
    """Evaluator from a plain function of scalar inputs to scalar outputs."""

    def __init__(self, name, outputs, inputs, fn, scalar_type, layout=None, kind="compute"):
        super().__init__(name)
        layout = layout or SCALAR
        self.kind = kind
        self._out = [self.evaluates(o, layout, scalar_type) for o in outputs]
        self._in = [self.depends(i, layout, scalar_type) for i in inputs]
        self._fn = fn

    def evaluate(self, workset) -> None:
        res = self._fn(*[f[0] for f in self._in])
        if not isinstance(res, (tuple, list)):
            res = (res,)
        if len(res) != len(self._out):
            raise ValueError(f"{self.name}: produced {len(res)} values for {len(self._out)} fields")
        for f, v in zip(self._out, res):
            f[0] = v


# -- storage ---------------------------------------------------------------


@dataclass
class ContiguousArena:
    """One object array for all fields; each field views an aligned sub-range."""

    alignment: int = 1
    block: np.ndarray | None = None
    offsets: dict = field(default_factory=dict)

    def reserve(self, total: int) -> None:
        if total > MAX_ARENA_SLOTS:
            raise OverflowError(f"arena request of {total} slots exceeds {MAX_ARENA_SLOTS}")
        self.block = np.empty(total, dtype=object)

    def assign(self, tag: FieldTag, offset: int, size: int):
        self.offsets[tag] = (offset, size)
        return self.block[offset:offset + size]

    @property
    def total(self) -> int:
        return 0 if self.block is None else len(self.block)


@dataclass
class SimpleAllocator:
    """Separate array per field (no shared block)."""

    alignment: int = 1
    offsets: dict = field(default_factory=dict)
    total: int = 0

    def reserve(self, total: int) -> None:
        self.total = total

    def assign(self, tag: FieldTag, offset: int, size: int):
        self.offsets[tag] = (offset, size)
        return np.empty(size, dtype=object)


def _padded(offset: int, alignment: int) -> int:
    return -(-offset // alignment) * alignment


# -- registry ---------------------------------------------------------------


@dataclass
class _Graph:
    evaluators: list = field(default_factory=list)
    producers: dict = field(default_factory=dict)
    required: list = field(default_factory=list)
    schedule: list = field(default_factory=list)
    storage: dict = field(default_factory=dict)
    allocator: object = None
    compiled: bool = False


class FieldManager:
    """Holds one evaluator graph per evaluation type."""

    def __init__(self, eval_types=ALL_EVALUATION_TYPES, basis=None, allocator=ContiguousArena):
        self.eval_types = tuple(eval_types)
        self.basis = basis
        self._allocator_factory = allocator
        self._graphs = {et: _Graph() for et in self.eval_types}

    def _graph(self, et: EvaluationType) -> _Graph:
        try:
            return self._graphs[et]
        except KeyError:
            raise AssemblyError(f"evaluation type {et} is not configured") from None

    def register_evaluator(self, et: EvaluationType, e: Evaluator) -> None:
        g = self._graph(et)
        if g.compiled:
            raise GraphCompiledError("graph already compiled")
        for tag in e.evaluated_tags:
            prev = g.producers.get(tag)
            if prev is not None:
                raise DuplicateProducerError(f"field {tag} produced by both {prev.name!r} and {e.name!r}")
        for tag in e.evaluated_tags:
            g.producers[tag] = e
        g.evaluators.append(e)

    def require_field(self, et: EvaluationType, tag: FieldTag) -> None:
        g = self._graph(et)
        if g.compiled:
            raise GraphCompiledError("graph already compiled")
        if tag not in g.required:
            g.required.append(tag)

    def is_compiled(self, et: EvaluationType) -> bool:
        return self._graph(et).compiled

    def compile(self, et: EvaluationType | None = None) -> None:
        for t in ([et] if et is not None else self.eval_types):
            self._compile(t)

    def _compile(self, et: EvaluationType) -> None:
        g = self._graph(et)
        if g.compiled:
            return
        order = {id(e): i for i, e in enumerate(g.evaluators)}
        reachable: dict[int, Evaluator] = {}
        state: dict[FieldTag, int] = {}  # 1 on stack, 2 done

        def visit(tag: FieldTag, consumer: str | None, stack: list):
            s = state.get(tag)
            if s == 2:
                return
            if s == 1:
                i = stack.index(tag)
                raise CycleError(stack[i:] + [tag])
            e = g.producers.get(tag)
            if e is None:
                raise UnmetDependencyError(tag, consumer)
            state[tag] = 1
            stack.append(tag)
            for d in e.dependent_tags:
                visit(d, e.name, stack)
            stack.pop()
            state[tag] = 2
            reachable[id(e)] = e

        for tag in g.required:
            visit(tag, None, [])

        # Kahn, ties broken by registration index
        nodes = sorted(reachable.values(), key=lambda e: order[id(e)])
        indeg = {id(e): 0 for e in nodes}
        users: dict[int, list] = {id(e): [] for e in nodes}
        for e in nodes:
            parents = {id(g.producers[d]) for d in e.dependent_tags}
            indeg[id(e)] = len(parents)
            for pid in parents:
                users[pid].append(e)
        heap = [(order[id(e)], e) for e in nodes if indeg[id(e)] == 0]
        heapq.heapify(heap)
        schedule = []
        while heap:
            _, e = heapq.heappop(heap)
            schedule.append(e)
            for u in users[id(e)]:
                indeg[id(u)] -= 1
                if indeg[id(u)] == 0:
                    heapq.heappush(heap, (order[id(u)], u))
        g.schedule = schedule
        self._allocate(et, g)
        for e in schedule:
            e.bind(lambda tag: g.storage[tag])
        g.compiled = True

    def _allocate(self, et: EvaluationType, g: _Graph) -> None:
        tags: list[FieldTag] = []
        seen = set()
        for e in g.schedule:
            for t in e.evaluated_tags + e.dependent_tags:
                if t not in seen:
                    seen.add(t)
                    tags.append(t)
        alloc = self._allocator_factory()
        align = max(1, int(getattr(alloc, "alignment", 1)))
        offsets = []
        off = 0
        for t in tags:
            off = _padded(off, align)
            offsets.append(off)
            off += t.layout.size
        alloc.reserve(off)
        for t, o in zip(tags, offsets):
            view = alloc.assign(t, o, t.layout.size)
            for i in range(t.layout.size):
                view[i] = scalar_zero(t.scalar_type, self.basis)
            g.storage[t] = view
        g.allocator = alloc

    def evaluate(self, et: EvaluationType, workset) -> None:
        g = self._graph(et)
        if not g.compiled:
            raise AssemblyError(f"graph for {et} is not compiled")
        for e in g.schedule:
            try:
                e.evaluate(workset)
            except AssemblyError:
                raise
            except Exception as exc:
                raise EvaluatorError(e.name, exc) from exc

    # -- introspection -----------------------------------------------------

    def schedule(self, et: EvaluationType) -> list[str]:
        return [e.name for e in self._graph(et).schedule]

    def evaluators(self, et: EvaluationType) -> list[Evaluator]:
        return list(self._graph(et).evaluators)

    def scheduled_evaluators(self, et: EvaluationType) -> list[Evaluator]:
        return list(self._graph(et).schedule)

    def allocator(self, et: EvaluationType):
        return self._graph(et).allocator

    def field_values(self, et: EvaluationType, tag: FieldTag) -> list:
        return list(self._graph(et).storage[tag])

    def edges(self, et: EvaluationType, kinds=("compute", "state")) -> list[tuple[str, str, str]]:
        """(consumer, producer, tag name) for scheduled evaluators of ``kinds``."""
        g = self._graph(et)
        out = []
        for e in g.schedule:
            if e.kind not in kinds:
                continue
            for d in e.dependent_tags:
                p = g.producers[d]
                if p.kind in kinds:
                    out.append((e.name, p.name, d.name))
        return out

    def to_dot(self, et: EvaluationType, kinds=("compute", "state")) -> str:
        g = self._graph(et)
        lines = [f'digraph "{et.label}" {{']
        for e in g.schedule:
            if e.kind in kinds:
                shape = "ellipse" if e.kind == "compute" else "box"
                lines.append(f'  "{e.name}" [shape={shape}];')
        for c, p, t in self.edges(et, kinds):
            lines.append(f'  "{c}" -> "{p}" [label="{t}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"
