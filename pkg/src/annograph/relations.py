"""Derived relations over an annotation graph.

Structural precedence and the kleene relations are closures computed
bottom-up by semi-naive iteration: each round only joins the pairs that were
new in the previous round.  The arc relations (inclusion, dominance,
immediate dominance, association) are joins over those closures.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping

from .graph import AnnotationGraph

FIELDS = ("L1", "L2", "L3")


class BinaryRelation:
    """A materialized set of pairs with a forward index."""

    __slots__ = ("pairs", "_fwd")

    def __init__(self, pairs: Iterable[tuple]):
        self.pairs = frozenset(pairs)
        fwd: dict = {}
        for x, y in self.pairs:
            fwd.setdefault(x, set()).add(y)
        self._fwd = fwd

    @classmethod
    def from_index(cls, index: Mapping) -> "BinaryRelation":
        return cls((x, y) for x, ys in index.items() for y in ys)

    def __contains__(self, pair) -> bool:
        x, y = pair
        return y in self._fwd.get(x, ())

    def __call__(self, x, y) -> bool:
        return (x, y) in self

    def __iter__(self):
        return iter(self.pairs)

    def __len__(self):
        return len(self.pairs)

    def __eq__(self, other):
        if isinstance(other, BinaryRelation):
            return self.pairs == other.pairs
        return NotImplemented

    __hash__ = None

    def image(self, x) -> frozenset:
        return frozenset(self._fwd.get(x, ()))

    def __repr__(self):
        return f"BinaryRelation({len(self.pairs)} pairs)"


@dataclass(frozen=True)
class PhraseRule:
    parent: str
    left: str
    right: str


@dataclass(frozen=True)
class LabelClass:
    name: str
    members: frozenset

    def __post_init__(self):
        if not self.members:
            raise ValueError(f"label class {self.name!r} has no members")
        object.__setattr__(self, "members", frozenset(self.members))


class TypeHierarchy:
    """Ordering on type labels; ``(upper, lower)`` pairs, closed transitively.

    The closure must be irreflexive, otherwise a type could dominate itself.
    """

    def __init__(self, pairs: Iterable[tuple] = ()):
        self.pairs = frozenset((str(u), str(l)) for u, l in pairs)
        types = {t for p in self.pairs for t in p}
        succ: dict = {}
        for u, l in self.pairs:
            succ.setdefault(u, set()).add(l)
        closure = _closure(types, succ, reflexive=False)
        loops = sorted(t for t in types if t in closure.get(t, ()))
        if loops:
            raise ValueError(f"type hierarchy is cyclic through {loops}")
        self.closure = BinaryRelation.from_index(closure)

    def above(self, upper: str, lower: str) -> bool:
        return (upper, lower) in self.closure

    def __repr__(self):
        return f"TypeHierarchy({sorted(self.pairs)})"


def in_class(label: str, class_name: str, classes) -> bool:
    if isinstance(classes, Mapping):
        cls = classes.get(class_name)
    else:
        cls = next((c for c in classes if c.name == class_name), None)
    if cls is None:
        raise KeyError(f"unknown label class {class_name!r}")
    return label in cls.members


def _closure(nodes, succ: Mapping, reflexive=True, naive=False) -> dict:
    """Transitive closure ``R(X,Y) :- R(X,Z), edge(Z,Y)`` as ``{x: set(y)}``.

    Base facts are the edges, plus identity when ``reflexive``.
    """
    total = {x: set(succ.get(x, ())) for x in nodes}
    if reflexive:
        for x in nodes:
            total[x].add(x)
    if naive:
        while True:
            changed = False
            for x in nodes:
                derived = set()
                for z in total[x]:
                    derived.update(succ.get(z, ()))
                if not derived <= total[x]:
                    total[x] |= derived
                    changed = True
            if not changed:
                return total
    delta = {x: set(ys) for x, ys in total.items() if ys}
    while delta:
        nxt = {}
        for x, zs in delta.items():
            derived = set()
            for z in zs:
                derived.update(succ.get(z, ()))
            derived -= total[x]
            if derived:
                total[x] |= derived
                nxt[x] = derived
        delta = nxt
    return total


def _succ(g: AnnotationGraph, keep=None) -> dict:
    succ: dict = {}
    for a in g.arcs:
        if keep is None or keep(a):
            succ.setdefault(a.src, set()).add(a.dst)
    return succ


def s_prec(g: AnnotationGraph, naive: bool = False) -> BinaryRelation:
    """Structural precedence: reflexive-transitive closure of the arc relation."""
    return BinaryRelation.from_index(_closure(g.nodes, _succ(g), naive=naive))


def t_prec(g: AnnotationGraph) -> BinaryRelation:
    """Temporal precedence on timed nodes.

    ``<=`` is already transitive, so the closure is just the filtered product.
    """
    timed = sorted(g.times.items(), key=lambda kv: kv[1])
    pairs = []
    for x, tx in timed:
        for y, ty in timed:
            if tx <= ty:
                pairs.append((x, y))
    return BinaryRelation(pairs)


def s_incl(g: AnnotationGraph, prec: BinaryRelation = None) -> BinaryRelation:
    """Arc I structurally includes arc J when I's span brackets J's span."""
    prec = prec if prec is not None else s_prec(g)
    # index arcs by src so that s_prec(W, X) drives the join
    by_src: dict = {}
    for a in g.arcs:
        by_src.setdefault(a.src, []).append(a)
    pairs = []
    for i in g.arcs:
        for x in prec.image(i.src):
            for j in by_src.get(x, ()):
                if (j.dst, i.dst) in prec:
                    pairs.append((i.id, j.id))
    return BinaryRelation(pairs)


def dom(g: AnnotationGraph, hierarchy: TypeHierarchy, incl: BinaryRelation = None) -> BinaryRelation:
    incl = incl if incl is not None else s_incl(g)
    types = {a.id: a.type_label for a in g.arcs}
    return BinaryRelation(
        (i, j) for i, j in incl if hierarchy.above(types[i], types[j])
    )


def i_dom(g: AnnotationGraph, rules: Iterable[PhraseRule], syn_type: str) -> BinaryRelation:
    """Rule-driven immediate dominance among arcs of type ``syn_type``.

    Parent ``X->Z`` labelled P, rule ``P -> C1 C2``: the C1 arc ``X->Y`` and the
    C2 arc ``Y->Z`` are both immediately dominated.
    """
    rules = list(rules)
    syn = g.arcs_of_type(syn_type)
    by_src_label: dict = {}
    for a in syn:
        by_src_label.setdefault((a.src, a.content_label), []).append(a)
    pairs = set()
    for parent in syn:
        for r in rules:
            if r.parent != parent.content_label:
                continue
            for left in by_src_label.get((parent.src, r.left), ()):
                for right in by_src_label.get((left.dst, r.right), ()):
                    if right.dst == parent.dst:
                        pairs.add((parent.id, left.id))
                        pairs.add((parent.id, right.id))
    return BinaryRelation(pairs)


def assoc(g: AnnotationGraph) -> BinaryRelation:
    """Join on L3.  Arcs without an L3 never join, not even with each other."""
    groups: dict = {}
    for a in g.arcs:
        if a.eq_class is not None:
            groups.setdefault(a.eq_class, []).append(a.id)
    return BinaryRelation((i, j) for ids in groups.values() for i in ids for j in ids)


def _field(arc, field: str):
    if field == "L1":
        return arc.type_label
    if field == "L2":
        return arc.content_label
    if field == "L3":
        return arc.eq_class
    raise ValueError(f"field must be one of {FIELDS}, got {field!r}")


def kleene(g: AnnotationGraph, field: str, label: str, naive: bool = False) -> BinaryRelation:
    """Node pairs bounding a (possibly empty) path whose arcs all carry ``label``."""
    if field not in FIELDS:
        raise ValueError(f"field must be one of {FIELDS}, got {field!r}")
    succ = _succ(g, lambda a: _field(a, field) == label)
    return BinaryRelation.from_index(_closure(g.nodes, succ, naive=naive))


class Relations:
    """Lazily materialized, cached relations for one graph and configuration."""

    def __init__(self, g: AnnotationGraph, hierarchy: TypeHierarchy = None, rules=(), syn_type="S"):
        self.graph = g
        self.hierarchy = hierarchy if hierarchy is not None else TypeHierarchy()
        self.rules = tuple(rules)
        self.syn_type = syn_type
        self._kleene: dict = {}

    @cached_property
    def s_prec(self) -> BinaryRelation:
        return s_prec(self.graph)

    @cached_property
    def t_prec(self) -> BinaryRelation:
        return t_prec(self.graph)

    @cached_property
    def s_incl(self) -> BinaryRelation:
        return s_incl(self.graph, self.s_prec)

    @cached_property
    def dom(self) -> BinaryRelation:
        return dom(self.graph, self.hierarchy, self.s_incl)

    @cached_property
    def i_dom(self) -> BinaryRelation:
        return i_dom(self.graph, self.rules, self.syn_type)

    @cached_property
    def assoc(self) -> BinaryRelation:
        return assoc(self.graph)

    def kleene(self, field: str, label: str) -> BinaryRelation:
        key = (field, label)
        if key not in self._kleene:
            self._kleene[key] = kleene(self.graph, field, label)
        return self._kleene[key]
