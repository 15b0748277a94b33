"""Annotation graphs for multi-tier speech annotation, with a relation
engine, an Emu-style query language and segment reports."""

from .config import ConfigError, QueryConfig, load_config, parse_config
from .graph import (
    AnnotationGraph,
    Arc,
    GraphError,
    ValidationReport,
    Violation,
    build_graph,
    subgraph,
    validate,
)
from .ingest import (
    IngestError,
    Layer,
    Tree,
    align_syntax,
    apply_eq_classes,
    merge_layers,
    parse_treebank,
    read_end_time_labels,
    read_eq_classes,
    read_native,
    read_point_events,
    read_start_end_labels,
    write_native,
)
from .query import (
    Compound,
    Condition,
    Match,
    MatchSet,
    QuerySyntaxError,
    eval_query,
    mark_anchor,
    parse_query,
)
from .relations import (
    BinaryRelation,
    LabelClass,
    PhraseRule,
    Relations,
    TypeHierarchy,
    assoc,
    dom,
    i_dom,
    in_class,
    kleene,
    s_incl,
    s_prec,
    t_prec,
)
from .report import SegmentRow, SegmentTable, emit_csv, emit_emu, group_report, segment_table
from .suite import eval_example_suite, syls_groups

__version__ = "0.1.0"
