from decimal import Decimal
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from annograph import (
    Arc,
    QueryConfig,
    Relations,
    SegmentRow,
    SegmentTable,
    build_graph,
    emit_csv,
    emit_emu,
    eval_query,
    group_report,
    segment_table,
)
from annograph.report import format_ms


def test_first_row(sa1):
    table = segment_table(eval_query(sa1, "Phoneme!=x"), "timit")
    assert table.rows[0] == SegmentRow("h#", "0", "147.5", "fjsp0:sa1")
    assert table.type == "segment"
    assert len(table) == 17


def test_hv_row(sa1):
    (row,) = segment_table(eval_query(sa1, "Phoneme=hv")).rows
    assert row.fields() == ["hv", "325", "385", "fjsp0:sa1"]


def test_event_table(sa1):
    table = segment_table(eval_query(sa1, "Tone=H*"))
    assert [r.label for r in table.rows] == ["H*"]
    assert table.rows[0].start_ms == table.rows[0].end_ms == "853.125"
    assert table.type == "event"
    # the tone tier also has a timed "0" arc, so the whole tier is mixed
    assert segment_table(eval_query(sa1, "Tone=*")).type == "segment"


def test_empty_table_is_segment():
    assert SegmentTable("d", "q").type == "segment"


def test_emit_emu_header(sa1):
    table = segment_table(eval_query(sa1, "Phoneme!=x"), "timit")
    text = emit_emu(table)
    assert text.startswith("database:timit\nquery:Phoneme!=x\ntype:segment\n#\nh#\t0\t147.5\tfjsp0:sa1\n")
    assert "\nhv\t325\t385\tfjsp0:sa1\n" in text
    assert len(text.split("\n")) == 4 + 17
    assert not text.endswith("\n")


def test_emit_emu_empty():
    assert emit_emu(SegmentTable("timit", "Word=none")) == "database:timit\nquery:Word=none\ntype:segment\n#"


def test_emit_emu_two_rows(sa1):
    ms = eval_query(sa1, "Phoneme=h#|hv")
    assert emit_emu(segment_table(ms, "timit", query="q")) == (
        "database:timit\nquery:q\ntype:segment\n#\n"
        "h#\t0\t147.5\tfjsp0:sa1\nhv\t325\t385\tfjsp0:sa1"
    )


def test_csv_one_row():
    table = SegmentTable("timit", "q", [SegmentRow("h#", "0", "147.5", "fjsp0:sa1")])
    assert emit_csv(table) == "label,start_ms,end_ms,utterance\nh#,0,147.5,fjsp0:sa1"


def test_csv_empty():
    assert emit_csv(SegmentTable("d", "q")) == "label,start_ms,end_ms,utterance"


def test_csv_quoting():
    table = SegmentTable("d", "q", [SegmentRow('a,b', "0", "1", 'say "x"')])
    assert emit_csv(table).splitlines()[1] == '"a,b",0,1,"say ""x"""'


def np_fixture():
    # two NPs over 2 and 3 words
    words = [Arc(i + 1, i, i + 1, "W", f"w{i}") for i in range(5)]
    nps = [Arc(6, 0, 2, "S", "NP"), Arc(7, 2, 5, "S", "NP")]
    times = [(n, 100 * n) for n in range(6)]
    return build_graph(words + nps, times, utterance_id="u")


def test_group_report_words_per_np():
    g = np_fixture()
    cfg = QueryConfig.build(hierarchy=[("S", "W")])
    ms = eval_query(g, "[Syntax=NP ^ #Word=*]", cfg)
    tables = group_report(ms, 0, "db")
    # brute force: words whose span lies inside each NP's span
    expected = {
        np.id: [w.id for w in g.arcs if w.type_label == "W" and np.src <= w.src and w.dst <= np.dst]
        for np in g.arcs_of_type("S")
    }
    assert [t.group for t in tables] == [6, 7]
    assert [len(t) for t in tables] == [2, 3]
    for t in tables:
        assert [r.label for r in t.rows] == [g.arc(i).content_label for i in expected[t.group]]
    flat = [r for t in tables for r in t.rows]
    assert sorted(flat, key=repr) == sorted(segment_table(ms).rows, key=repr)


def test_group_by_anchor_gives_singletons(sa1):
    ms = eval_query(sa1, "Word!=x")
    tables = group_report(ms, 0)
    assert [len(t) for t in tables] == [1] * 5


def test_group_report_empty(sa1):
    assert group_report(eval_query(sa1, "Word=none"), 0) == []


def test_group_report_unbound_term(sa1):
    with pytest.raises(KeyError):
        group_report(eval_query(sa1, "Word!=x"), 3)


def test_partial_table_for_untimed_anchor():
    g = build_graph([Arc(1, 0, 1, "P", "a"), Arc(2, 1, 2, "P", "b")], [(0, 0), (1, 160)])
    table = segment_table(eval_query(g, "Phoneme=*"))
    assert [r.label for r in table.rows] == ["a"]
    assert table.partial and "node 2" in table.errors[0]


def test_count_column_syllables_to_phrase_end():
    syl = [Arc(i + 1, i, i + 1, "Syl", f"s{i}") for i in range(4)]
    phrases = [Arc(5, 0, 3, "Imt", "a"), Arc(6, 3, 4, "Imt", "b")]
    g = build_graph(syl + phrases, [(n, n * 160) for n in range(5)])
    ms = eval_query(g, "Syllable=*")
    table = segment_table(ms, count_column=("Syl", "Imt"), relations=Relations(g))
    assert [r.count for r in table.rows] == [2, 1, 0, 0]
    assert emit_csv(table).splitlines()[0].endswith(",count")


@pytest.mark.parametrize("samples,rate,text", [
    (0, 16000, "0"), (2360, 16000, "147.5"), (13650, 16000, "853.125"),
    (1, 16000, "0.0625"), (16000, 16000, "1000"), (1, 3, "333.333333"),
])
def test_format_ms(samples, rate, text):
    assert format_ms(samples, rate) == text


@given(st.integers(0, 10**9), st.sampled_from([8000, 10000, 16000, 20000, 32000, 40000]))
def test_ms_round_trip(samples, rate):
    text = format_ms(samples, rate)
    assert "e" not in text.lower()
    assert not ("." in text and text.endswith("0"))
    assert Fraction(Decimal(text)) * rate / 1000 == samples
