"""Command-line front end.

Exit codes: 0 success, 1 validation or query failure, 2 usage, parse or IO
error.  Results go to stdout, diagnostics to stderr.

A graph argument names a native table pair: ``sa1`` (or ``sa1.arcs``)
reads ``sa1.arcs`` and ``sa1.times``.
"""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from .config import ConfigError, QueryConfig, load_config
from .graph import AnnotationGraph, GraphError, subgraph, validate
from .ingest import (
    IngestError,
    align_syntax,
    apply_eq_classes,
    merge_layers,
    normalize_leaf,
    parse_treebank,
    read_end_time_labels,
    read_eq_classes,
    read_native,
    read_point_events,
    read_start_end_labels,
    write_native,
)
from .query import QuerySyntaxError, eval_query, parse_query
from .relations import Relations
from .report import emit_csv, emit_emu, group_report, segment_table
from .suite import SUITE, eval_example_suite, syls_groups

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

INPUT_KINDS = ("native", "end-time", "point-event", "start-end", "treebank")


class UsageError(Exception):
    pass


def graph_paths(path) -> tuple:
    p = Path(path)
    if p.suffix in (".arcs", ".times"):
        p = p.with_suffix("")
    return p.with_name(p.name + ".arcs"), p.with_name(p.name + ".times"), p.name


def load_graph(path, config: QueryConfig, utterance=None, check=True):
    arcs, times, stem = graph_paths(path)
    try:
        arc_text = arcs.read_text(encoding="utf-8")
        time_text = times.read_text(encoding="utf-8")
    except OSError as e:
        raise UsageError(f"cannot read graph {path}: {e}") from None
    return read_native(arc_text, time_text, config.sample_rate, utterance or stem, check=check)


def _config(args) -> QueryConfig:
    config = load_config(args.config) if args.config else QueryConfig()
    if args.rate is not None:
        if args.rate <= 0:
            raise UsageError("--rate must be positive")
        config.sample_rate = args.rate
    return config


def _validate_one(path, config):
    try:
        g = load_graph(path, config, check=False)
    except GraphError as e:
        return e.report
    return validate(g)


def cmd_validate(args, out, err) -> int:
    config = _config(args)
    with ThreadPoolExecutor() as pool:
        futures = [pool.submit(_validate_one, p, config) for p in args.graphs]
    code = EXIT_OK
    for path, fut in zip(args.graphs, futures):
        try:
            report = fut.result()
        except (UsageError, IngestError) as e:
            print(f"{path}: {e}", file=err)
            code = EXIT_USAGE
            continue
        print(f"{path}: {report.format()}" if len(args.graphs) > 1 else report.format(), file=out)
        if report and code == EXIT_OK:
            code = EXIT_FAIL
    return code


def _read(path) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e}") from None


def parse_input_spec(spec: str) -> tuple:
    """``KIND[:TYPE]=PATH`` -> (kind, type label or None, path)."""
    head, sep, path = spec.partition("=")
    if not sep or not path:
        raise UsageError(f"input {spec!r} should look like KIND[:TYPE]=PATH")
    kind, _, type_label = head.partition(":")
    if kind not in INPUT_KINDS:
        raise UsageError(f"unknown input kind {kind!r}; expected one of {', '.join(INPUT_KINDS)}")
    return kind, type_label or None, path


_DEFAULT_TYPES = {"end-time": "W", "point-event": "T", "start-end": "P", "treebank": "S"}


def cmd_convert(args, out, err) -> int:
    config = _config(args)
    specs = [parse_input_spec(s) for s in args.inputs]
    layers, trees = [], []
    for kind, type_label, path in specs:
        type_label = type_label or _DEFAULT_TYPES.get(kind)
        if kind == "native":
            layers.append(load_graph(path, config))
        elif kind == "end-time":
            layers.append(read_end_time_labels(_read(path), type_label, config.sample_rate, config.strip))
        elif kind == "point-event":
            layers.append(read_point_events(_read(path), type_label, config.sample_rate, config.strip))
        elif kind == "start-end":
            layers.append(read_start_end_labels(_read(path), type_label))
        else:
            trees.append((type_label, parse_treebank(_read(path))))
    if len(layers) == 1 and not args.merge_boundaries and isinstance(layers[0], AnnotationGraph):
        g = layers[0]
    else:
        g = merge_layers(layers, config.sample_rate, args.utterance or "", args.merge_boundaries)
    for syn_type, ts in trees:
        g = align_syntax(g, ts, config.level("word"), syn_type,
                         normalize_leaf if args.normalize_leaves else None)
    if args.eq_classes:
        g = apply_eq_classes(g, read_eq_classes(_read(args.eq_classes)))
    report = validate(g)
    if report:
        print(report.format(), file=err)
        return EXIT_FAIL
    arc_text, time_text = write_native(g)
    if args.output:
        arcs, times, _ = graph_paths(args.output)
        arcs.write_text(arc_text, encoding="utf-8")
        times.write_text(time_text, encoding="utf-8")
    else:
        out.write("# arcs\n" + arc_text + "# times\n" + time_text)
    return EXIT_OK


def _render(table, fmt) -> str:
    return emit_csv(table) if fmt == "csv" else emit_emu(table)


def cmd_query(args, out, err) -> int:
    config = _config(args)
    try:
        ast = parse_query(args.query)
    except QuerySyntaxError as e:
        print(f"query syntax error: {e.message}\n{e.caret()}", file=err)
        return EXIT_USAGE
    g = load_graph(args.graph, config, args.utterance)
    rel = Relations(g, config.hierarchy, config.rules, config.syn_type)
    ms = eval_query(g, ast, config, rel)
    if args.subgraphs:
        blocks = []
        for k, m in enumerate(ms, 1):
            table = subgraph(g, set(m.bindings))
            lines = [f"# match {k}"]
            lines += ["\t".join("" if f is None else str(f) for f in row) for row in table.rows]
            lines += [f"# times {k}"] + [f"{n}\t{t}" for n, t in table.times]
            blocks.append("\n".join(lines))
        print("\n".join(blocks), file=out)
        return EXIT_OK
    count = tuple(args.count_to_end.split(":", 1)) if args.count_to_end else None
    if count is not None and len(count) != 2:
        raise UsageError("--count-to-end takes TYPE:ENCLOSING_TYPE")
    kw = dict(query=args.query, count_column=count, relations=rel)
    if args.group is not None:
        try:
            tables = group_report(ms, args.group, args.database, **kw)
        except KeyError as e:
            print(f"error: {e.args[0]}", file=err)
            return EXIT_FAIL
    else:
        tables = [segment_table(ms, args.database, **kw)]
    print("\n\n".join(_render(t, args.format) for t in tables), file=out)
    code = EXIT_OK
    for t in tables:
        for msg in t.errors:
            print(f"warning: {msg}", file=err)
            code = EXIT_FAIL
    return code


def cmd_examples(args, out, err) -> int:
    config = _config(args)
    g = load_graph(args.graph, config, args.utterance)
    results = eval_example_suite(g, config)
    chunks = []
    for name in SUITE:
        ms = results[name]
        lines = [f"{name}: {len(ms)} match{'es' if len(ms) != 1 else ''}"]
        if name == "syls":
            for head, members in syls_groups(ms).items():
                lines.append(f"  group {head}: " + " ".join(str(k) for k in members))
        else:
            for m in ms:
                labels = " ".join(f"{i}:{g.arc(i).content_label}" for i in m.bindings)
                lines.append(f"  {labels}")
        chunks.append("\n".join(lines))
    print("\n".join(chunks), file=out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="configuration file (type_hierarchy, ps_rule, class, level ...)")
    common.add_argument("--rate", type=int, help="sample rate in Hz (default 16000 or config)")

    parser = argparse.ArgumentParser(prog="annograph", description="Annotation graph query tool")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", parents=[common], help="check graphs for well-formedness")
    p.add_argument("graphs", nargs="+")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("convert", parents=[common], help="convert corpus files to native tables")
    p.add_argument("inputs", nargs="+", metavar="KIND[:TYPE]=PATH",
                   help=f"KIND is one of {', '.join(INPUT_KINDS)}")
    p.add_argument("-o", "--output", help="output stem; writes STEM.arcs and STEM.times (default stdout)")
    p.add_argument("--merge-boundaries", action="store_true", help="unify equal-time nodes across layers")
    p.add_argument("--eq-classes", help="sidecar file of L1, L2, occurrence, class rows")
    p.add_argument("--normalize-leaves", action="store_true",
                   help="case-fold and strip punctuation when aligning treebank leaves")
    p.add_argument("--utterance", help="utterance id")
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("query", parents=[common], help="run a query and print a segment table")
    p.add_argument("graph")
    p.add_argument("query")
    p.add_argument("--format", choices=("emu", "csv"), default="emu")
    p.add_argument("--group", type=int, metavar="TERM", help="one table per arc bound at term TERM")
    p.add_argument("--subgraphs", action="store_true", help="dump each match as arc rows")
    p.add_argument("--database", default="", help="database name for the report header")
    p.add_argument("--utterance", help="utterance id (default: graph file name)")
    p.add_argument("--count-to-end", metavar="TYPE:ENCLOSING",
                   help="add a column counting TYPE arcs to the end of the enclosing arc")
    p.set_defaults(func=cmd_query)

    p = sub.add_parser("examples", parents=[common], help="run the built-in example queries")
    p.add_argument("graph")
    p.add_argument("--utterance")
    p.set_defaults(func=cmd_examples)
    return parser


def main(argv=None, out=None, err=None) -> int:
    out = out if out is not None else sys.stdout
    err = err if err is not None else sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK
    try:
        return args.func(args, out, err)
    except (UsageError, ConfigError) as e:
        print(f"error: {e}", file=err)
        return EXIT_USAGE
    except IngestError as e:
        kind = f" [{e.kind}]" if e.kind else ""
        print(f"error{kind}: {e}", file=err)
        return EXIT_USAGE if e.kind == "parse" else EXIT_FAIL
    except GraphError as e:
        print(e.report.format(), file=err)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
