"""Readers and writers for corpus files.

Native format is a pair of tab-separated tables::

    arcs:   id  X  Y  L1  L2  L3      (empty L3 field = no class)
    times:  N   T

Lines starting with ``#`` are comments; a leading ``id``/``N`` header row is
skipped.  The other readers each produce a :class:`Layer` with its own local
node and arc numbering; :func:`merge_layers` renumbers layers into one graph.
"""

from __future__ import annotations

import re
import string
from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal, InvalidOperation
from typing import Callable, Iterable, Optional, Union

from .graph import (
    DEFAULT_SAMPLE_RATE,
    AnnotationGraph,
    Arc,
    GraphError,
    build_graph,
    validate,
)


class IngestError(ValueError):
    """Bad input file.  ``kind`` names the problem, ``row`` is 1-based when known."""

    def __init__(self, message: str, kind: str = "parse", row: Optional[int] = None, index: Optional[int] = None):
        self.kind = kind
        self.row = row
        self.index = index
        where = f"row {row}: " if row is not None else ""
        super().__init__(f"{where}{message}")


@dataclass
class Layer:
    """Arcs and times with layer-local numbering, ready to merge."""

    arcs: list = field(default_factory=list)
    times: dict = field(default_factory=dict)

    def to_graph(self, sample_rate=DEFAULT_SAMPLE_RATE, utterance_id="") -> AnnotationGraph:
        return build_graph(self.arcs, self.times.items(), sample_rate, utterance_id)


def _rows(text: str):
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        yield lineno, line


def _int(value: str, row: int, what: str) -> int:
    try:
        return int(value)
    except ValueError:
        raise IngestError(f"{what} {value!r} is not an integer", row=row) from None


def read_native(
    arc_text: str,
    time_text: str,
    sample_rate: int = DEFAULT_SAMPLE_RATE,
    utterance_id: str = "",
    check: bool = True,
) -> AnnotationGraph:
    """Read a native arc/time table pair.

    With ``check`` (the default) the graph must also validate cleanly;
    otherwise :class:`GraphError` is raised with the full report.
    """
    arcs = []
    for n, (row, line) in enumerate(_rows(arc_text)):
        fields = line.rstrip("\r\n").split("\t")
        if n == 0 and fields[0].strip().lower() == "id":
            continue
        if len(fields) != 6:
            raise IngestError(f"arc row has {len(fields)} fields, expected 6", row=row)
        ident, src, dst = (_int(f, row, w) for f, w in zip(fields[:3], ("arc id", "source", "target")))
        arcs.append(Arc(ident, src, dst, fields[3], fields[4], fields[5] or None))
    times = []
    for n, (row, line) in enumerate(_rows(time_text)):
        fields = line.rstrip("\r\n").split("\t")
        if n == 0 and fields[0].strip().lower() == "n":
            continue
        if len(fields) != 2:
            raise IngestError(f"time row has {len(fields)} fields, expected 2", row=row)
        node, t = _int(fields[0], row, "node id"), _int(fields[1], row, "time")
        if t < 0:
            raise IngestError(f"time {t} is negative", row=row)
        times.append((node, t))
    g = build_graph(arcs, times, sample_rate, utterance_id)
    if check:
        report = validate(g)
        if report:
            raise GraphError(report)
    return g


def write_native(g: AnnotationGraph) -> tuple:
    """Serialize to ``(arc_text, time_text)``, rows sorted by id."""
    arc_lines = [
        f"{a.id}\t{a.src}\t{a.dst}\t{a.type_label}\t{a.content_label}\t{a.eq_class or ''}\n"
        for a in sorted(g.arcs, key=lambda a: a.id)
    ]
    time_lines = [f"{n}\t{t}\n" for n, t in sorted(g.times.items())]
    return "".join(arc_lines), "".join(time_lines)


def seconds_to_samples(seconds: Union[str, Decimal, float], sample_rate: int) -> int:
    """Convert decimal seconds to a sample number, rounding half up."""
    value = Decimal(str(seconds)) * sample_rate
    return int(value.to_integral_value(rounding=ROUND_HALF_UP))


def _timed_rows(text: str, strip: str = ""):
    """Yield ``(row, samples-ready Decimal seconds, label)`` for ``time SP label`` files."""
    for row, line in _rows(text):
        parts = line.strip().split(None, 1)
        if len(parts) != 2:
            raise IngestError("expected 'time label'", row=row)
        try:
            seconds = Decimal(parts[0])
        except InvalidOperation:
            raise IngestError(f"unparseable time {parts[0]!r}", row=row) from None
        if seconds < 0 or not seconds.is_finite():
            raise IngestError(f"bad time {parts[0]!r}", row=row)
        label = parts[1].strip()
        if strip:
            label = label.strip(strip)
        yield row, seconds, label


def read_end_time_labels(text: str, type_label: str, sample_rate: int = DEFAULT_SAMPLE_RATE,
                         strip: str = "") -> Layer:
    """Word-file style: each row gives the end time of a segment that starts
    where the previous one ended (0.0 for the first row)."""
    layer = Layer()
    layer.times[0] = 0
    prev = Decimal(0)
    node = 0
    for row, seconds, label in _timed_rows(text, strip):
        if seconds < prev:
            raise IngestError(f"end time {seconds} is before previous {prev}", kind="time-order", row=row)
        layer.arcs.append(Arc(node + 1, node, node + 1, type_label, label))
        node += 1
        layer.times[node] = seconds_to_samples(seconds, sample_rate)
        prev = seconds
    if not layer.arcs:
        return Layer()
    return layer


def read_point_events(text: str, type_label: str, sample_rate: int = DEFAULT_SAMPLE_RATE,
                      strip: str = "") -> Layer:
    """Tone-file style: each row is an instant, stored as a zero-width arc."""
    layer = Layer()
    prev = None
    for row, seconds, label in _timed_rows(text, strip):
        if prev is not None and seconds < prev:
            raise IngestError(f"time {seconds} is before previous {prev}", kind="time-order", row=row)
        prev = seconds
        src = 2 * len(layer.arcs)
        t = seconds_to_samples(seconds, sample_rate)
        layer.arcs.append(Arc(len(layer.arcs) + 1, src, src + 1, type_label, label))
        layer.times[src] = layer.times[src + 1] = t
    return layer


def read_start_end_labels(text: str, type_label: str) -> Layer:
    """TIMIT style ``start end label`` in samples; shared boundaries share a node."""
    layer = Layer()
    prev_end = None
    node = -1
    for row, line in _rows(text):
        parts = line.strip().split(None, 2)
        if len(parts) != 3:
            raise IngestError("expected 'start end label'", row=row)
        start, end = _int(parts[0], row, "start"), _int(parts[1], row, "end")
        if start < 0 or start > end:
            raise IngestError(f"start {start} is after end {end}", kind="time-order", row=row)
        if prev_end is not None and start < prev_end:
            raise IngestError(f"segment starting at {start} overlaps previous ending at {prev_end}",
                              kind="overlap", row=row)
        if prev_end is None or start != prev_end:
            node += 1
            layer.times[node] = start
        src = node
        node += 1
        layer.times[node] = end
        layer.arcs.append(Arc(len(layer.arcs) + 1, src, node, type_label, parts[2].strip()))
        prev_end = end
    return layer


def merge_layers(
    layers: Iterable[Union[Layer, AnnotationGraph]],
    sample_rate: int = DEFAULT_SAMPLE_RATE,
    utterance_id: str = "",
    merge_boundaries: bool = False,
) -> AnnotationGraph:
    """Renumber layers into disjoint node/arc ranges and build one graph.

    With ``merge_boundaries``, nodes of different layers carrying the same
    time are unified.  A layer only takes part at a time where it has exactly
    one node, so the endpoints of its zero-width arcs are never collapsed.
    """
    arcs, times = [], {}
    node_base, arc_base = 0, 0
    per_layer = []
    for layer in layers:
        l_arcs = list(layer.arcs)
        l_times = dict(layer.times)
        nodes = sorted({n for a in l_arcs for n in (a.src, a.dst)} | set(l_times))
        nmap = {n: node_base + i for i, n in enumerate(nodes)}
        amap = {a.id: arc_base + i + 1 for i, a in enumerate(sorted(l_arcs, key=lambda a: a.id))}
        for a in l_arcs:
            arcs.append(Arc(amap[a.id], nmap[a.src], nmap[a.dst], a.type_label, a.content_label, a.eq_class))
        for n, t in l_times.items():
            times[nmap[n]] = t
        per_layer.append({nmap[n]: l_times[n] for n in l_times})
        node_base += len(nodes)
        arc_base += len(l_arcs)

    if merge_boundaries:
        rep: dict = {}
        by_time: dict = {}
        for timed in per_layer:
            at: dict = {}
            for n, t in timed.items():
                at.setdefault(t, []).append(n)
            for t, ns in at.items():
                if len(ns) == 1:
                    by_time.setdefault(t, []).append(ns[0])
        for t, ns in by_time.items():
            keep = min(ns)
            for n in ns:
                rep[n] = keep
        arcs = [
            Arc(a.id, rep.get(a.src, a.src), rep.get(a.dst, a.dst), a.type_label, a.content_label, a.eq_class)
            for a in arcs
        ]
        times = {rep.get(n, n): t for n, t in times.items()}
        # compact node ids so numbering stays dense and order-preserving
        used = sorted({n for a in arcs for n in (a.src, a.dst)})
        dense = {n: i for i, n in enumerate(used)}
        arcs = [Arc(a.id, dense[a.src], dense[a.dst], a.type_label, a.content_label, a.eq_class) for a in arcs]
        times = {dense[n]: t for n, t in times.items() if n in dense}
    return build_graph(arcs, times.items(), sample_rate, utterance_id)


# --- equivalence classes ---------------------------------------------------

def read_eq_classes(text: str) -> list:
    """Sidecar rows ``L1 TAB L2 TAB occurrence TAB class``.

    ``occurrence`` is 1-based among arcs with that L1/L2 in structural order,
    or ``*`` for all of them.
    """
    out = []
    for row, line in _rows(text):
        fields = line.rstrip("\r\n").split("\t")
        if len(fields) != 4:
            raise IngestError(f"class row has {len(fields)} fields, expected 4", row=row)
        occ = fields[2].strip()
        if occ != "*":
            occ = _int(occ, row, "occurrence")
            if occ < 1:
                raise IngestError("occurrence is 1-based", row=row)
        out.append((fields[0], fields[1], occ, fields[3]))
    return out


def apply_eq_classes(g: AnnotationGraph, entries: Iterable[tuple]) -> AnnotationGraph:
    rank = g.topo_rank()
    updates = {}
    for l1, l2, occ, cls in entries:
        hits = sorted(
            (a for a in g.arcs if a.type_label == l1 and a.content_label == l2),
            key=lambda a: (rank[a.src], a.id),
        )
        if occ != "*":
            if occ > len(hits):
                raise IngestError(f"no occurrence {occ} of {l1}/{l2}", kind="selector")
            hits = [hits[occ - 1]]
        for a in hits:
            updates[a.id] = cls
    arcs = [
        Arc(a.id, a.src, a.dst, a.type_label, a.content_label, updates.get(a.id, a.eq_class))
        for a in g.arcs
    ]
    return build_graph(arcs, g.times.items(), g.sample_rate, g.utterance_id)


# --- treebank --------------------------------------------------------------

@dataclass
class Tree:
    label: str
    children: list = field(default_factory=list)

    def leaves(self) -> list:
        out = []
        stack = [self]
        while stack:
            node = stack.pop()
            if isinstance(node, Tree):
                stack.extend(reversed(node.children))
            else:
                out.append(node)
        return out

    def __str__(self):
        inner = " ".join(str(c) for c in self.children)
        return f"({self.label} {inner})" if self.label else f"({inner})"


_SEXPR_TOKEN = re.compile(r"\(|\)|[^\s()]+")


def parse_treebank(text: str) -> list:
    """Parse bracketed trees.  The unlabelled Penn wrapper ``( ... )`` around a
    single tree is removed."""
    trees = []
    stack = []
    opened = []
    for m in _SEXPR_TOKEN.finditer(text):
        tok = m.group()
        if tok == "(":
            stack.append(Tree(""))
            opened.append(m.start())
        elif tok == ")":
            if not stack:
                raise IngestError(f"unbalanced ')' at offset {m.start()}")
            node = stack.pop()
            at = opened.pop()
            if not node.children:
                raise IngestError(f"empty tree at offset {at}")
            if stack:
                stack[-1].children.append(node)
            else:
                if not node.label and len(node.children) == 1 and isinstance(node.children[0], Tree):
                    node = node.children[0]
                trees.append(node)
        else:
            if not stack:
                raise IngestError(f"atom {tok!r} outside parentheses at offset {m.start()}")
            top = stack[-1]
            if not top.label and not top.children:
                top.label = tok
            else:
                top.children.append(tok)
    if stack:
        raise IngestError(f"unbalanced '(' at offset {opened[-1]}")
    return trees


_TRACE = re.compile(r"^\*.*\*(-\d+)?$|^\*(-\d+)?$|^0$")


def normalize_leaf(token: str) -> str:
    """Case-fold and strip surrounding punctuation; traces become empty."""
    if _TRACE.match(token):
        return ""
    return token.casefold().strip(string.punctuation)


def align_syntax(
    g: AnnotationGraph,
    trees: Iterable[Tree],
    word_type: str = "W",
    syn_type: str = "S",
    normalize: Optional[Callable[[str], str]] = None,
) -> AnnotationGraph:
    """Add one ``syn_type`` arc per internal tree node, spanning its words.

    Leaves are matched one-to-one against the word arcs in structural order.
    With ``normalize``, both sides are passed through it first and leaves
    that normalize to nothing (punctuation, traces) are dropped.
    """
    trees = list(trees)
    rank = g.topo_rank()
    words = sorted(g.arcs_of_type(word_type), key=lambda a: (rank[a.src], a.id))
    for prev, nxt in zip(words, words[1:]):
        if prev.dst != nxt.src:
            raise IngestError(
                f"word arcs {prev.id} and {nxt.id} are not contiguous", kind="leaf-mismatch"
            )
    norm = normalize or (lambda s: s)

    spans = []  # (label, first leaf, last leaf) in pre-order; None for empty spans
    leaves = []

    def walk(node: Tree):
        slot = len(spans)
        spans.append(None)
        start = len(leaves)
        for child in node.children:
            if isinstance(child, Tree):
                walk(child)
                continue
            tok = norm(child)
            if normalize is not None and not tok:
                continue
            leaves.append(tok)
        if len(leaves) > start:
            spans[slot] = (node.label, start, len(leaves) - 1)

    for tree in trees:
        walk(tree)

    word_labels = [norm(w.content_label) for w in words]
    for i, (leaf, word) in enumerate(zip(leaves, word_labels)):
        if leaf != word:
            raise IngestError(
                f"tree leaf {leaf!r} does not match word {word!r} at index {i}",
                kind="leaf-mismatch", index=i,
            )
    if len(leaves) != len(word_labels):
        i = min(len(leaves), len(word_labels))
        raise IngestError(
            f"{len(leaves)} tree leaves but {len(word_labels)} words; first difference at index {i}",
            kind="leaf-mismatch", index=i,
        )

    next_id = max((a.id for a in g.arcs), default=0) + 1
    new = []
    for span in spans:
        if span is None:
            continue
        label, i, j = span
        new.append(Arc(next_id, words[i].src, words[j].dst, syn_type, label))
        next_id += 1
    return g.with_arcs(new)
