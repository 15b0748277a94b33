"""Annotation graph data model.

An annotation graph is a labelled DAG whose nodes may carry sample offsets
into a signal.  Arcs are six-field records ``(id, src, dst, L1, L2, L3)``:
L1 is the tier/type (``W``, ``P``, ``T`` ...), L2 the content label and L3 an
optional equivalence-class name used to model association.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterable, Mapping, Optional

DEFAULT_SAMPLE_RATE = 16000

VIOLATION_KINDS = ("cycle", "orphan-node", "time-order", "duplicate-id", "dangling-node-ref")


@dataclass(frozen=True, order=True)
class Arc:
    id: int
    src: int
    dst: int
    type_label: str
    content_label: str
    eq_class: Optional[str] = None

    def as_row(self) -> tuple:
        return (self.id, self.src, self.dst, self.type_label, self.content_label, self.eq_class)


@dataclass(frozen=True)
class Violation:
    kind: str
    ids: tuple
    message: str

    def __str__(self):
        return f"{self.kind}: {self.message}"


@dataclass
class ValidationReport:
    violations: list = field(default_factory=list)

    def __bool__(self):
        # truthy when there is something to report
        return bool(self.violations)

    @property
    def ok(self) -> bool:
        return not self.violations

    def kinds(self) -> set:
        return {v.kind for v in self.violations}

    def add(self, kind: str, ids: Iterable, message: str) -> None:
        self.violations.append(Violation(kind, tuple(ids), message))

    def extend(self, other: "ValidationReport") -> None:
        self.violations.extend(other.violations)

    def format(self) -> str:
        if self.ok:
            return "OK"
        return "\n".join(str(v) for v in self.violations)


class GraphError(ValueError):
    """Raised when rows cannot form an annotation graph; carries the full report."""

    def __init__(self, report: ValidationReport):
        self.report = report
        super().__init__(report.format())


class AnnotationGraph:
    """Immutable annotation graph ``<N, A, tau>`` plus signal metadata.

    Prefer :func:`build_graph`, which checks ids and time entries.  The
    constructor itself only stores what it is given, so that :func:`validate`
    can still be pointed at hand-built broken graphs.
    """

    def __init__(
        self,
        arcs: Iterable[Arc],
        times: Mapping[int, int],
        sample_rate: int = DEFAULT_SAMPLE_RATE,
        utterance_id: str = "",
        nodes: Optional[Iterable[int]] = None,
    ):
        arcs = sorted(arcs, key=lambda a: a.id)
        self._arcs = tuple(arcs)
        self._by_id = {a.id: a for a in arcs}
        self._times = MappingProxyType(dict(sorted(times.items())))
        if nodes is None:
            nodes = {n for a in arcs for n in (a.src, a.dst)}
        self._nodes = frozenset(nodes)
        if sample_rate <= 0:
            raise ValueError(f"sample rate must be positive, got {sample_rate}")
        self.sample_rate = int(sample_rate)
        self.utterance_id = utterance_id
        self._out: dict = {}
        self._in: dict = {}
        for a in arcs:
            self._out.setdefault(a.src, []).append(a)
            self._in.setdefault(a.dst, []).append(a)
        self._topo_rank = None

    @property
    def arcs(self) -> tuple:
        return self._arcs

    @property
    def nodes(self) -> frozenset:
        return self._nodes

    @property
    def times(self) -> Mapping[int, int]:
        return self._times

    def arc(self, arc_id: int) -> Arc:
        try:
            return self._by_id[arc_id]
        except KeyError:
            raise KeyError(f"unknown arc id {arc_id!r}") from None

    def __contains__(self, arc_id) -> bool:
        return arc_id in self._by_id

    def __len__(self) -> int:
        return len(self._arcs)

    def time(self, node: int) -> Optional[int]:
        return self._times.get(node)

    def out_arcs(self, node: int) -> list:
        return list(self._out.get(node, ()))

    def in_arcs(self, node: int) -> list:
        return list(self._in.get(node, ()))

    def successors(self, node: int) -> set:
        return {a.dst for a in self._out.get(node, ())}

    def arcs_of_type(self, type_label: str) -> list:
        return [a for a in self._arcs if a.type_label == type_label]

    def topo_rank(self) -> dict:
        """Node -> position in a canonical topological order.

        Kahn's algorithm, smallest node id first among ready nodes.  Nodes on
        a cycle (ill-formed graphs only) are appended in id order.
        """
        if self._topo_rank is None:
            import heapq

            indeg = {n: 0 for n in self._nodes}
            for a in self._arcs:
                if a.src != a.dst:
                    indeg[a.dst] = indeg.get(a.dst, 0) + 1
            ready = [n for n, d in indeg.items() if d == 0]
            heapq.heapify(ready)
            order = []
            while ready:
                n = heapq.heappop(ready)
                order.append(n)
                for a in self._out.get(n, ()):
                    if a.src == a.dst:
                        continue
                    indeg[a.dst] -= 1
                    if indeg[a.dst] == 0:
                        heapq.heappush(ready, a.dst)
            seen = set(order)
            order.extend(sorted(n for n in self._nodes if n not in seen))
            self._topo_rank = MappingProxyType({n: i for i, n in enumerate(order)})
        return self._topo_rank

    def with_arcs(self, extra: Iterable[Arc]) -> "AnnotationGraph":
        return build_graph(
            list(self._arcs) + list(extra),
            self._times.items(),
            self.sample_rate,
            self.utterance_id,
        )

    def __eq__(self, other):
        if not isinstance(other, AnnotationGraph):
            return NotImplemented
        return (
            self._arcs == other._arcs
            and dict(self._times) == dict(other._times)
            and self._nodes == other._nodes
            and self.sample_rate == other.sample_rate
            and self.utterance_id == other.utterance_id
        )

    __hash__ = None

    def __repr__(self):
        return (
            f"AnnotationGraph(nodes={len(self._nodes)}, arcs={len(self._arcs)}, "
            f"timed={len(self._times)}, rate={self.sample_rate}, utterance={self.utterance_id!r})"
        )


def check_rows(arcs: Iterable[Arc], times: Iterable[tuple]) -> ValidationReport:
    """Row-level problems that stop a graph from being built at all."""
    report = ValidationReport()
    seen: dict = {}
    used = set()
    for a in arcs:
        used.update((a.src, a.dst))
        if a.id in seen:
            report.add("duplicate-id", [a.id], f"arc id {a.id} appears more than once")
        seen[a.id] = a
    time_seen = set()
    for node, t in times:
        if node not in used:
            report.add("dangling-node-ref", [node], f"time entry for node {node} which no arc uses")
        if node in time_seen:
            report.add("duplicate-id", [node], f"node {node} has more than one time entry")
        time_seen.add(node)
    return report


def build_graph(
    arcs: Iterable[Arc],
    times: Iterable[tuple] = (),
    sample_rate: int = DEFAULT_SAMPLE_RATE,
    utterance_id: str = "",
) -> AnnotationGraph:
    """Build a graph from arc records and ``(node, sample)`` pairs.

    The node set is exactly the endpoints of the arcs.  Raises
    :class:`GraphError` on duplicate arc ids or time entries for nodes no arc
    touches; structural problems (cycles, decreasing times) are left for
    :func:`validate`.
    """
    arcs = [a if isinstance(a, Arc) else Arc(*a) for a in arcs]
    times = [(int(n), int(t)) for n, t in times]
    report = check_rows(arcs, times)
    if report:
        raise GraphError(report)
    for n, t in times:
        if t < 0:
            raise ValueError(f"time for node {n} is negative ({t})")
    return AnnotationGraph(arcs, dict(times), sample_rate, utterance_id)


def _strongly_connected(nodes, succ) -> list:
    """Kosaraju, iterative.  Returns list of components (sets)."""
    order = []
    visited = set()
    for root in sorted(nodes):
        if root in visited:
            continue
        visited.add(root)
        stack = [(root, iter(sorted(succ.get(root, ()))))]
        while stack:
            n, it = stack[-1]
            for m in it:
                if m not in visited:
                    visited.add(m)
                    stack.append((m, iter(sorted(succ.get(m, ())))))
                    break
            else:
                stack.pop()
                order.append(n)
    pred: dict = {}
    for n, ms in succ.items():
        for m in ms:
            pred.setdefault(m, set()).add(n)
    comps = []
    assigned = set()
    for root in reversed(order):
        if root in assigned:
            continue
        comp = {root}
        assigned.add(root)
        todo = [root]
        while todo:
            n = todo.pop()
            for m in pred.get(n, ()):
                if m not in assigned:
                    assigned.add(m)
                    comp.add(m)
                    todo.append(m)
        comps.append(comp)
    return comps


def validate(g: AnnotationGraph) -> ValidationReport:
    """Check the well-formedness conditions, accumulating every violation."""
    report = check_rows(g.arcs, g.times.items())
    used = set()
    for a in g.arcs:
        used.update((a.src, a.dst))
    for n in sorted(g.nodes - used):
        report.add("orphan-node", [n], f"node {n} has degree zero")
    for n in sorted(used - g.nodes):
        report.add("dangling-node-ref", [n], f"arc endpoint {n} is not in the node set")

    succ: dict = {}
    for a in g.arcs:
        if a.src == a.dst:
            report.add("cycle", [a.id], f"arc {a.id} is a self-loop on node {a.src}")
        else:
            succ.setdefault(a.src, set()).add(a.dst)
    for comp in _strongly_connected(used, succ):
        if len(comp) > 1:
            arc_ids = sorted(a.id for a in g.arcs if a.src in comp and a.dst in comp)
            report.add(
                "cycle",
                arc_ids,
                f"directed cycle through nodes {sorted(comp)} (arcs {arc_ids})",
            )

    for a in g.arcs:
        ts, td = g.time(a.src), g.time(a.dst)
        if ts is not None and td is not None and ts > td:
            report.add(
                "time-order",
                [a.id],
                f"arc {a.id} goes from node {a.src} at {ts} back to node {a.dst} at {td}",
            )
    return report


@dataclass(frozen=True)
class ResultTable:
    rows: tuple
    times: tuple

    def __len__(self):
        return len(self.rows)


def subgraph(g: AnnotationGraph, arc_ids: Iterable[int]) -> ResultTable:
    """Materialize selected arcs as arc-relation rows plus their endpoint times."""
    arcs = sorted({g.arc(i) for i in arc_ids}, key=lambda a: a.id)
    ends = sorted({n for a in arcs for n in (a.src, a.dst)})
    times = tuple((n, g.times[n]) for n in ends if n in g.times)
    return ResultTable(tuple(a.as_row() for a in arcs), times)
