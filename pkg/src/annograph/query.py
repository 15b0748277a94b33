"""Emu-style query language over annotation graphs.

Grammar (whitespace is free between tokens)::

    query := ['#'] cond | ['#'] '[' query op query ']'
    op    := '->' | '^' | '=>'
    cond  := LEVEL ('=' | '!=') item ('|' item)*
    item  := label | '*'

``->`` is sequence (right arc starts where the left arc ends, same level),
``^`` is domination and ``=>`` association.  A compound relates the *head*
arcs of its two sides, the head being the leftmost condition of a side.
The ``#`` mark only selects which term is reported; it never changes the
set of matches.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional, Union

from .config import QueryConfig
from .graph import AnnotationGraph
from .relations import Relations

OPERATORS = {"->": "sequence", "^": "dominates", "=>": "associates"}
WILDCARD = "*"


class QuerySyntaxError(ValueError):
    def __init__(self, message: str, text: str, position: int):
        self.message = message
        self.text = text
        self.position = position
        super().__init__(f"{message} at position {position}")

    def caret(self) -> str:
        """The query with a caret under the offending position."""
        return f"{self.text}\n{' ' * self.position}^"


@dataclass(frozen=True)
class Condition:
    level: str
    negated: bool
    alternatives: tuple
    marked: bool = False

    def __str__(self):
        op = "!=" if self.negated else "="
        return f"{'#' if self.marked else ''}{self.level}{op}{'|'.join(self.alternatives)}"


@dataclass(frozen=True)
class Compound:
    left: "QueryAst"
    operator: str
    right: "QueryAst"
    marked: bool = False

    def __str__(self):
        sym = {v: k for k, v in OPERATORS.items()}[self.operator]
        return f"{'#' if self.marked else ''}[{self.left} {sym} {self.right}]"


QueryAst = Union[Condition, Compound]

_LEVEL = re.compile(r"[A-Za-z_][A-Za-z0-9_.]*")
# a label runs until whitespace, a bracket, '|', '^', or the start of '->' / '=>'
_LABEL = re.compile(r"(?:(?!->|=>)[^\s\[\]|^])+")
_WS = re.compile(r"\s*")


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.marks = 0

    def error(self, message, pos=None):
        raise QuerySyntaxError(message, self.text, self.pos if pos is None else pos)

    def skip(self):
        self.pos = _WS.match(self.text, self.pos).end()

    def peek(self, s: str) -> bool:
        return self.text.startswith(s, self.pos)

    def parse(self) -> QueryAst:
        self.skip()
        if self.pos == len(self.text):
            self.error("empty query")
        ast = self.term()
        self.skip()
        if self.pos != len(self.text):
            if self.peek("|"):
                self.error("disjunction of compound terms is not supported")
            if self.peek("]"):
                self.error("unbalanced ']'")
            self.error(f"unexpected {self.text[self.pos]!r}")
        return ast

    def term(self) -> QueryAst:
        self.skip()
        marked = False
        if self.peek("#"):
            marked = True
            self.marks += 1
            if self.marks > 1:
                self.error("only one term may be marked with '#'")
            self.pos += 1
            self.skip()
        if self.peek("["):
            return self.compound(marked)
        if self.peek("(") or self.peek("?"):
            self.error("optional elements are not supported")
        return self.condition(marked)

    def compound(self, marked) -> Compound:
        start = self.pos
        self.pos += 1
        left = self.term()
        self.skip()
        for sym, name in OPERATORS.items():
            if self.peek(sym):
                self.pos += len(sym)
                break
        else:
            if self.peek("|"):
                self.error("disjunction of compound terms is not supported")
            if self.pos == len(self.text):
                self.error(f"unbalanced '[' opened at position {start}")
            self.error("expected '->', '^' or '=>'")
        right = self.term()
        self.skip()
        if not self.peek("]"):
            if self.pos == len(self.text):
                self.error(f"unbalanced '[' opened at position {start}")
            if self.peek("|"):
                self.error("disjunction of compound terms is not supported")
            self.error("expected ']'")
        self.pos += 1
        return Compound(left, name, right, marked)

    def condition(self, marked) -> Condition:
        m = _LEVEL.match(self.text, self.pos)
        if not m:
            self.error("expected a level name")
        level = m.group()
        self.pos = m.end()
        self.skip()
        if self.peek("!="):
            negated = True
            self.pos += 2
        elif self.peek("=") and not self.peek("=>"):
            negated = False
            self.pos += 1
        else:
            self.error("expected '=' or '!='")
        items = []
        while True:
            self.skip()
            m = _LABEL.match(self.text, self.pos)
            if not m:
                self.error("empty alternative")
            items.append(m.group())
            self.pos = m.end()
            self.skip()
            if not self.peek("|"):
                break
            self.pos += 1
        return Condition(level, negated, tuple(items), marked)


def parse_query(text: str) -> QueryAst:
    """Parse query text; raises :class:`QuerySyntaxError` with a position."""
    return _Parser(text).parse()


def conditions(ast: QueryAst) -> list:
    """Condition terms in pre-order; list index is the term position."""
    if isinstance(ast, Condition):
        return [ast]
    return conditions(ast.left) + conditions(ast.right)


def _marked_position(ast: QueryAst, offset: int = 0) -> Optional[int]:
    if ast.marked:
        return offset
    if isinstance(ast, Compound):
        found = _marked_position(ast.left, offset)
        if found is None:
            found = _marked_position(ast.right, offset + len(conditions(ast.left)))
        return found
    return None


def mark_anchor(ast: QueryAst) -> int:
    """Term position whose arc a match reports.

    Defaults to the left-hand (leftmost) term; a ``#`` moves it to the marked
    term, or to the leftmost term inside a marked compound.
    """
    found = _marked_position(ast)
    return 0 if found is None else found


@dataclass(frozen=True)
class Match:
    bindings: tuple  # arc id per term position
    anchor: int

    def as_dict(self) -> dict:
        return dict(enumerate(self.bindings))


class MatchSet:
    """Ordered, duplicate-free matches against one graph."""

    def __init__(self, graph: AnnotationGraph, matches, anchor_term: int = 0, query: str = ""):
        self.graph = graph
        self.anchor_term = anchor_term
        self.query = query
        rank = graph.topo_rank()
        unique = {m.bindings: m for m in matches}
        self.matches = tuple(
            sorted(
                unique.values(),
                key=lambda m: (rank[graph.arc(m.anchor).src], m.anchor, m.bindings),
            )
        )

    def __iter__(self):
        return iter(self.matches)

    def __len__(self):
        return len(self.matches)

    def __getitem__(self, i):
        return self.matches[i]

    def binding_set(self) -> set:
        return {m.bindings for m in self.matches}

    def anchors(self) -> list:
        return [m.anchor for m in self.matches]

    def __repr__(self):
        return f"MatchSet({len(self.matches)} matches, anchor_term={self.anchor_term})"


def _condition_arcs(g: AnnotationGraph, cond: Condition, config: QueryConfig) -> list:
    level = config.level(cond.level)
    labels = set()
    wildcard = False
    for item in cond.alternatives:
        if item == WILDCARD:
            wildcard = True
        elif item in config.classes:
            labels |= config.classes[item].members
        else:
            labels.add(item)
    out = []
    for a in g.arcs:
        if a.type_label != level:
            continue
        hit = wildcard or a.content_label in labels
        if hit != cond.negated:
            out.append(a)
    return out


def eval_query(
    g: AnnotationGraph,
    ast: Union[QueryAst, str],
    config: QueryConfig = None,
    relations: Relations = None,
) -> MatchSet:
    """Evaluate a query; every condition term is bound to one arc per match."""
    text = ast if isinstance(ast, str) else str(ast)
    if isinstance(ast, str):
        ast = parse_query(ast)
    config = config if config is not None else QueryConfig()
    rel = relations if relations is not None else Relations(g, config.hierarchy, config.rules, config.syn_type)

    def ev(node, offset: int) -> list:
        # -> list of (partial bindings as ((pos, arc_id), ...), head arc)
        if isinstance(node, Condition):
            return [(((offset, a.id),), a) for a in _condition_arcs(g, node, config)]
        left = ev(node.left, offset)
        right = ev(node.right, offset + len(conditions(node.left)))
        by_head: dict = {}
        for part, head in right:
            by_head.setdefault(head.id, []).append((part, head))
        out = []
        for lpart, lhead in left:
            if node.operator == "sequence":
                partners = [
                    r for a in g.out_arcs(lhead.dst)
                    if a.type_label == lhead.type_label
                    for r in by_head.get(a.id, ())
                ]
            else:
                relation = rel.dom if node.operator == "dominates" else rel.assoc
                partners = [r for j in relation.image(lhead.id) for r in by_head.get(j, ())]
            for rpart, _ in partners:
                out.append((lpart + rpart, lhead))
        return out

    anchor_term = mark_anchor(ast)
    matches = []
    for part, _ in ev(ast, 0):
        bindings = tuple(arc for _, arc in sorted(part))
        matches.append(Match(bindings, bindings[anchor_term]))
    return MatchSet(g, matches, anchor_term, text)
