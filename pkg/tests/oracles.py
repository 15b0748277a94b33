"""Brute-force reference implementations and random generators for tests.

Nothing here imports the relation engine or the query evaluator; only the
plain data types and the parser (to read query text) are shared.
"""

import itertools
import random

from annograph.graph import Arc, build_graph
from annograph.query import Condition

LEVELS = ("A", "B", "C")
CONTENT = ("x", "y", "z")
CLASSES = ("1", "2", None, None)


def random_dag(rng: random.Random, n_nodes: int, extra: float = 0.6, untimed: float = 0.2,
               levels=LEVELS, content=CONTENT, classes=CLASSES):
    """Well-formed graph: every node touches an arc, times never decrease
    along an arc, node ids shuffled so they say nothing about order."""
    n_nodes = max(n_nodes, 2)
    ids = list(range(n_nodes))
    rng.shuffle(ids)
    arcs = []
    arc_id = 1

    def add(i, j):
        nonlocal arc_id
        arcs.append(Arc(arc_id, ids[i], ids[j], rng.choice(levels), rng.choice(content), rng.choice(classes)))
        arc_id += 1

    for k in range(1, n_nodes):
        add(rng.randrange(k), k)
    for _ in range(int(extra * n_nodes)):
        i, j = sorted(rng.sample(range(n_nodes), 2))
        add(i, j)
    t = 0
    times = []
    for k in range(n_nodes):
        t += rng.choice((0, 0, 1, 5, 40))
        if rng.random() >= untimed:
            times.append((ids[k], t))
    return build_graph(arcs, times)


def reach(g) -> set:
    """Reflexive reachability by a DFS from every node."""
    succ = {}
    for a in g.arcs:
        succ.setdefault(a.src, []).append(a.dst)
    out = set()
    for x in g.nodes:
        seen = {x}
        stack = [x]
        while stack:
            n = stack.pop()
            for m in succ.get(n, ()):
                if m not in seen:
                    seen.add(m)
                    stack.append(m)
        out.update((x, y) for y in seen)
    return out


def label_paths(g, field: str, label) -> set:
    """Endpoints of every path (including empty ones) whose arcs all carry
    ``label`` in ``field``, by explicit path enumeration."""
    pick = {"L1": lambda a: a.type_label, "L2": lambda a: a.content_label, "L3": lambda a: a.eq_class}[field]
    succ = {}
    for a in g.arcs:
        if pick(a) == label:
            succ.setdefault(a.src, []).append(a.dst)
    out = set()

    def walk(start, node):
        out.add((start, node))
        for m in succ.get(node, ()):
            walk(start, m)

    for x in g.nodes:
        walk(x, x)
    return out


def closure_pairs(pairs) -> set:
    pairs = set(pairs)
    while True:
        new = {(a, d) for a, b in pairs for c, d in pairs if b == c} - pairs
        if not new:
            return pairs
        pairs |= new


def brute_force_query(g, ast, classes: dict, hierarchy_pairs, level=lambda s: s) -> set:
    """Every assignment of arcs to condition terms, filtered by the operators."""
    terms = []

    def collect(node):
        if isinstance(node, Condition):
            terms.append(node)
        else:
            collect(node.left)
            collect(node.right)

    collect(ast)
    rp = reach(g)
    above = closure_pairs(hierarchy_pairs)

    def cond_ok(c, a):
        if a.type_label != level(c.level):
            return False
        hit = False
        for item in c.alternatives:
            if item == "*":
                hit = True
            elif item in classes:
                hit = hit or a.content_label in classes[item]
            else:
                hit = hit or a.content_label == item
        return hit != c.negated

    def related(op, a, b):
        if op == "sequence":
            return b.src == a.dst and a.type_label == b.type_label
        if op == "dominates":
            return (a.type_label, b.type_label) in above and (a.src, b.src) in rp and (b.dst, a.dst) in rp
        return a.eq_class is not None and a.eq_class == b.eq_class

    checks = []

    def compile_checks(node, offset):
        if isinstance(node, Condition):
            return 1
        nl = compile_checks(node.left, offset)
        nr = compile_checks(node.right, offset + nl)
        checks.append((node.operator, offset, offset + nl))
        return nl + nr

    compile_checks(ast, 0)
    cands = [[a for a in g.arcs if cond_ok(c, a)] for c in terms]
    out = set()
    for combo in itertools.product(*cands):
        if all(related(op, combo[i], combo[j]) for op, i, j in checks):
            out.add(tuple(a.id for a in combo))
    return out


def random_query(rng: random.Random, depth: int = 2) -> str:
    """Query text over LEVELS/CONTENT plus the class name ``cls`` and ``*``."""
    if depth == 0 or rng.random() < 0.35:
        items = rng.sample(list(CONTENT) + ["cls", "*"], rng.randint(1, 2))
        op = rng.choice(("=", "=", "!="))
        return f"{rng.choice(LEVELS)}{op}{'|'.join(items)}"
    sym = rng.choice(("->", "^", "=>"))
    return f"[{random_query(rng, depth - 1)} {sym} {random_query(rng, depth - 1)}]"
