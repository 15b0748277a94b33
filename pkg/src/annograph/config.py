"""Query configuration: type hierarchy, phrase-structure rules, label classes.

The file format is line oriented and mirrors datalog facts::

    # comments start with '#'
    type_hierarchy W P
    ps_rule S NP VP
    class vowel iy ae axr aa uw
    level Phoneme P
    rate 16000
    strip {}

``level`` maps a query-level name (``Phoneme``) onto an arc type label
(``P``).  Level names are looked up case-insensitively; a name with no
mapping is used as a type label verbatim.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .graph import DEFAULT_SAMPLE_RATE
from .relations import LabelClass, PhraseRule, TypeHierarchy

DEFAULT_LEVELS = {
    "phoneme": "P",
    "phonetic": "P",
    "seg": "P",
    "word": "W",
    "tone": "T",
    "syntax": "S",
    "syn": "S",
    "syllable": "Syl",
    "syl": "Syl",
    "intermediate": "Imt",
    "imt": "Imt",
    "intonational": "Itl",
    "itl": "Itl",
}


class ConfigError(ValueError):
    pass


@dataclass
class QueryConfig:
    hierarchy: TypeHierarchy = field(default_factory=TypeHierarchy)
    rules: tuple = ()
    classes: dict = field(default_factory=dict)
    levels: dict = field(default_factory=lambda: dict(DEFAULT_LEVELS))
    sample_rate: int = DEFAULT_SAMPLE_RATE
    strip: str = ""

    def level(self, name: str) -> str:
        """Resolve a level name to the arc type label it denotes."""
        return self.levels.get(name.lower(), name)

    @property
    def syn_type(self) -> str:
        return self.level("syn")

    @classmethod
    def build(cls, hierarchy=(), rules=(), classes=None, levels=None, **kw) -> "QueryConfig":
        """Convenience constructor from plain tuples and dicts."""
        lv = dict(DEFAULT_LEVELS)
        lv.update({k.lower(): v for k, v in (levels or {}).items()})
        resolve = lambda n: lv.get(n.lower(), n)
        return cls(
            hierarchy=TypeHierarchy((resolve(u), resolve(l)) for u, l in hierarchy),
            rules=tuple(r if isinstance(r, PhraseRule) else PhraseRule(*r) for r in rules),
            classes={k: LabelClass(k, frozenset(v)) for k, v in (classes or {}).items()},
            levels=lv,
            **kw,
        )


def parse_config(text: str, source: str = "<config>") -> QueryConfig:
    hierarchy, rules, classes, levels = [], [], {}, {}
    extra = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, *args = line.split()
        where = f"{source}:{lineno}"
        if key == "type_hierarchy":
            if len(args) != 2:
                raise ConfigError(f"{where}: type_hierarchy takes 2 labels")
            hierarchy.append(tuple(args))
        elif key == "ps_rule":
            if len(args) != 3:
                raise ConfigError(f"{where}: ps_rule takes parent, left and right (binary rules only)")
            rules.append(tuple(args))
        elif key == "class":
            if len(args) < 2:
                raise ConfigError(f"{where}: class needs a name and at least one member")
            if args[0] in classes:
                raise ConfigError(f"{where}: class {args[0]!r} defined twice")
            classes[args[0]] = args[1:]
        elif key == "level":
            if len(args) != 2:
                raise ConfigError(f"{where}: level takes a name and a type label")
            levels[args[0]] = args[1]
        elif key == "rate":
            try:
                extra["sample_rate"] = int(args[0])
            except (IndexError, ValueError):
                raise ConfigError(f"{where}: rate needs an integer") from None
            if extra["sample_rate"] <= 0:
                raise ConfigError(f"{where}: rate must be positive")
        elif key == "strip":
            extra["strip"] = "".join(args)
        else:
            raise ConfigError(f"{where}: unknown directive {key!r}")
    try:
        return QueryConfig.build(hierarchy, rules, classes, levels, **extra)
    except ValueError as e:
        raise ConfigError(f"{source}: {e}") from None


def load_config(path) -> QueryConfig:
    path = Path(path)
    return parse_config(path.read_text(encoding="utf-8"), str(path))
