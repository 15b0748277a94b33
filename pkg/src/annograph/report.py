"""Segment reports: one time-stamped row per match."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from decimal import Decimal
from fractions import Fraction
from typing import Optional

from .graph import AnnotationGraph
from .query import MatchSet
from .relations import Relations

# non-terminating decimals (rates with factors other than 2 and 5) are cut here
MAX_MS_DIGITS = 6


def format_ms(samples: int, sample_rate: int) -> str:
    """Milliseconds as the shortest exact decimal, e.g. ``147.5``."""
    value = Fraction(samples * 1000, sample_rate)
    den = value.denominator
    for p in (2, 5):
        while den % p == 0:
            den //= p
    if den == 1:
        d = Decimal(value.numerator) / Decimal(value.denominator)
    else:
        d = round(Decimal(value.numerator) / Decimal(value.denominator), MAX_MS_DIGITS)
    text = format(d.normalize(), "f")
    return text if text != "-0" else "0"


@dataclass(frozen=True)
class SegmentRow:
    label: str
    start_ms: str
    end_ms: str
    utterance: str
    count: Optional[int] = None

    def fields(self) -> list:
        out = [self.label, self.start_ms, self.end_ms, self.utterance]
        if self.count is not None:
            out.append(str(self.count))
        return out


@dataclass
class SegmentTable:
    database: str
    query: str
    rows: list = field(default_factory=list)
    errors: list = field(default_factory=list)
    group: Optional[int] = None

    @property
    def type(self) -> str:
        if self.rows and all(r.start_ms == r.end_ms for r in self.rows):
            return "event"
        return "segment"

    @property
    def partial(self) -> bool:
        return bool(self.errors)

    def __len__(self):
        return len(self.rows)


def count_to_enclosing_end(rel: Relations, anchor_id: int, count_type: str, enclosing_type: str) -> Optional[int]:
    """Arcs of ``count_type`` after the anchor and still inside the smallest
    enclosing ``enclosing_type`` arc (e.g. syllables to the end of the phrase).
    ``None`` when nothing of ``enclosing_type`` includes the anchor."""
    g = rel.graph
    anchor = g.arc(anchor_id)
    rank = g.topo_rank()
    enclosing = [e for e in g.arcs_of_type(enclosing_type) if rel.s_incl(e.id, anchor_id)]
    if not enclosing:
        return None
    # the innermost one: latest start, then earliest end
    e = min(enclosing, key=lambda a: (-rank[a.src], rank[a.dst], a.id))
    return sum(
        1
        for k in rel.s_incl.image(e.id)
        if g.arc(k).type_label == count_type and k != anchor_id
        and rel.s_prec(anchor.dst, g.arc(k).src)
    )


def _row(g: AnnotationGraph, arc_id: int, count=None) -> SegmentRow:
    a = g.arc(arc_id)
    ts, te = g.time(a.src), g.time(a.dst)
    if ts is None or te is None:
        missing = a.src if ts is None else a.dst
        raise LookupError(f"arc {a.id} ({a.content_label}): node {missing} has no time")
    return SegmentRow(
        a.content_label,
        format_ms(ts, g.sample_rate),
        format_ms(te, g.sample_rate),
        g.utterance_id,
        count,
    )


def segment_table(
    ms: MatchSet,
    database_name: str = "",
    query: Optional[str] = None,
    count_column: Optional[tuple] = None,
    relations: Relations = None,
    matches=None,
) -> SegmentTable:
    """One row per match, for the match's anchor arc.

    Anchors with an untimed endpoint become entries in ``errors`` and the
    table is flagged partial.  ``count_column=(count_type, enclosing_type)``
    adds a computed column, see :func:`count_to_enclosing_end`.
    """
    g = ms.graph
    table = SegmentTable(database_name, ms.query if query is None else query)
    if count_column is not None and relations is None:
        relations = Relations(g)
    for m in (ms if matches is None else matches):
        count = None
        if count_column is not None:
            count = count_to_enclosing_end(relations, m.anchor, *count_column)
        try:
            table.rows.append(_row(g, m.anchor, count))
        except LookupError as e:
            table.errors.append(str(e))
    return table


def emit_emu(table: SegmentTable) -> str:
    lines = [
        f"database:{table.database}",
        f"query:{table.query}",
        f"type:{table.type}",
        "#",
    ]
    lines.extend("\t".join(r.fields()) for r in table.rows)
    return "\n".join(lines)


def emit_csv(table: SegmentTable) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    header = ["label", "start_ms", "end_ms", "utterance"]
    if any(r.count is not None for r in table.rows):
        header.append("count")
    w.writerow(header)
    for r in table.rows:
        w.writerow(r.fields())
    return buf.getvalue().rstrip("\n")


def group_report(ms: MatchSet, group_term: int, database_name: str = "", **kw) -> list:
    """One table per distinct arc bound at ``group_term``, in order of first
    appearance.  Each table lists the anchors of that group's matches."""
    groups: dict = {}
    for m in ms:
        if not 0 <= group_term < len(m.bindings):
            raise KeyError(f"term {group_term} is not bound in match {m.bindings}")
        groups.setdefault(m.bindings[group_term], []).append(m)
    tables = []
    for arc_id, matches in groups.items():
        t = segment_table(ms, database_name, matches=matches, **kw)
        t.group = arc_id
        tables.append(t)
    return tables
