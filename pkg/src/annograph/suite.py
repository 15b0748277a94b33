"""Example queries compiled directly against the relation engine.

These need joins the surface language cannot express (three-way joins,
kleene spans, phrase-structure rules), so each one is a hand-written plan.
Bindings follow the head of the corresponding datalog clause.
"""

from __future__ import annotations

from dataclasses import dataclass

from .config import QueryConfig
from .graph import AnnotationGraph
from .query import Match, MatchSet
from .relations import Relations

SUITE = ("vowel_stop", "strongWrdDomVowels", "sylHtone", "stop_vowel_seq", "imt_phrase", "syls")


@dataclass
class SuiteLabels:
    """Content labels the plans look for; defaults follow TIMIT-style phone and word labels."""

    vowel: str = "vowel"
    stop: str = "stop"
    strong_word: str = None  # None: any word
    high_tone: str = "H*"
    boundary_tone: str = "L%"
    np: str = "NP"
    sentence: str = "S"
    vp: str = "VP"
    verb: str = "V"


def _members(config: QueryConfig, name: str) -> frozenset:
    cls = config.classes.get(name)
    return cls.members if cls is not None else frozenset()


def _ms(g, rows, anchor_term=0, name=""):
    return MatchSet(g, [Match(tuple(r), r[anchor_term]) for r in rows], anchor_term, name)


def vowel_stop(g, config, rel, labels):
    vowels, stops = _members(config, labels.vowel), _members(config, labels.stop)
    phoneme = config.level("phoneme")
    rows = []
    for i in g.arcs_of_type(phoneme):
        if i.content_label not in vowels:
            continue
        for j in g.out_arcs(i.dst):
            if j.type_label == phoneme and j.content_label in stops:
                rows.append((i.id, j.id))
    return rows


def strong_word_dom_vowels(g, config, rel, labels):
    vowels = _members(config, labels.vowel)
    phoneme = config.level("phoneme")
    rows = set()
    for i in g.arcs_of_type(config.level("word")):
        if labels.strong_word is not None and i.content_label != labels.strong_word:
            continue
        for j in rel.dom.image(i.id):
            a = g.arc(j)
            if a.type_label == phoneme and a.content_label in vowels:
                rows.add((i.id,))
    return rows


def syl_h_tone(g, config, rel, labels):
    tone = config.level("tone")
    classes = {
        a.eq_class for a in g.arcs_of_type(tone)
        if a.content_label == labels.high_tone and a.eq_class is not None
    }
    return [(i.id,) for i in g.arcs_of_type(config.level("word")) if i.eq_class in classes]


def stop_vowel_seq(g, config, rel, labels):
    vowels, stops = _members(config, labels.vowel), _members(config, labels.stop)
    phoneme, word, tone = config.level("phoneme"), config.level("word"), config.level("tone")
    nps = [a for a in g.arcs_of_type(config.syn_type) if a.content_label == labels.np]
    h_tones = {a.id for a in g.arcs_of_type(tone) if a.content_label == labels.high_tone}
    rows = set()
    for i in g.arcs_of_type(phoneme):
        if i.content_label not in stops:
            continue
        for j in g.out_arcs(i.dst):
            if j.type_label != phoneme or j.content_label not in vowels:
                continue
            for w in g.arcs_of_type(word):
                if not (rel.dom(w.id, i.id) and rel.dom(w.id, j.id)):
                    continue
                if not any(rel.dom(n.id, w.id) for n in nps):
                    continue
                if rel.assoc.image(w.id) & h_tones:
                    rows.add((i.id, j.id))
    return rows


def imt_phrase(g, config, rel, labels):
    syn = g.arcs_of_type(config.syn_type)
    cats = lambda c: [a for a in syn if a.content_label == c]
    verbs = {
        i.id
        for k in cats(labels.sentence)
        for j in cats(labels.vp)
        for i in cats(labels.verb)
        if rel.i_dom(k.id, j.id) and rel.i_dom(j.id, i.id)
    }
    return {
        (p.id,)
        for p in g.arcs_of_type(config.level("imt"))
        if rel.dom.image(p.id) & verbs
    }


def syls(g, config, rel, labels):
    """Syllables from the one associated with an H* to the one associated with
    the following L%, inclusive.  Bindings are ``(I, K)``: I is the H*
    syllable, which groups the K syllables of one span.
    """
    tone, syl = config.level("tone"), config.level("syl")
    tones = g.arcs_of_type(tone)
    syllables = g.arcs_of_type(syl)
    chain = rel.kleene("L1", syl)
    by_class: dict = {}
    for s in syllables:
        if s.eq_class is not None:
            by_class.setdefault(s.eq_class, []).append(s)
    rows = set()
    for h in tones:
        if h.content_label != labels.high_tone or h.eq_class is None:
            continue
        for l in tones:
            if l.content_label != labels.boundary_tone or l.eq_class is None:
                continue
            for i in by_class.get(h.eq_class, ()):
                for j in by_class.get(l.eq_class, ()):
                    if not chain(i.src, j.src):
                        continue
                    for k in syllables:
                        if chain(i.src, k.src) and chain(k.dst, j.dst):
                            rows.add((i.id, k.id))
    return rows


_PLANS = {
    "vowel_stop": vowel_stop,
    "strongWrdDomVowels": strong_word_dom_vowels,
    "sylHtone": syl_h_tone,
    "stop_vowel_seq": stop_vowel_seq,
    "imt_phrase": imt_phrase,
    "syls": syls,
}


def run_example(name, g: AnnotationGraph, config: QueryConfig = None, labels: SuiteLabels = None,
                relations: Relations = None) -> MatchSet:
    config = config if config is not None else QueryConfig()
    labels = labels if labels is not None else SuiteLabels()
    rel = relations if relations is not None else Relations(g, config.hierarchy, config.rules, config.syn_type)
    anchor = 1 if name == "syls" else 0
    return _ms(g, _PLANS[name](g, config, rel, labels), anchor, name)


def eval_example_suite(g: AnnotationGraph, config: QueryConfig = None, labels: SuiteLabels = None) -> dict:
    """Run every example query; returns ``{name: MatchSet}`` in suite order."""
    config = config if config is not None else QueryConfig()
    rel = Relations(g, config.hierarchy, config.rules, config.syn_type)
    return {name: run_example(name, g, config, labels, rel) for name in SUITE}


def syls_groups(ms: MatchSet) -> dict:
    """Group ``syls`` matches: H* syllable id -> syllable ids in match order."""
    groups: dict = {}
    for m in ms:
        groups.setdefault(m.bindings[0], []).append(m.bindings[1])
    return groups
