"""Approximate-grammar data model and its line-oriented DSL.

A grammar file looks like::

    # hand-written cricket rules
    @start IMP
    @default_noise min=0 max=40
    @lexicon make: made, makes, making
    SN -> noise ; minlength=0, maxlength=20
    IMP -> {name} SN "bowled" SN {balls} ; prob=1.0
    IMP -> {player_name} root(score: "make"|"hit"|"score") {cent} ; prob=0.4, id=U#7

``{cat}`` is a probe terminal, ``"word"`` a literal, ``root(...)`` a
morphological-root terminal and a bare identifier is either a declared noise
name or a non-terminal. Adjacent non-noise symbols get an implicit noise
symbol with the default bounds.
"""

from __future__ import annotations

import math
import re
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Union

DEFAULT_START = "IMP"


class GrammarError(ValueError):
    pass


class GrammarSyntaxError(GrammarError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


def _check_word(word: str, what: str):
    if not word or any(c.isspace() or c in '";' for c in word):
        raise GrammarError(f"invalid {what} {word!r}: must be non-empty, without whitespace, quotes or ';'")


@dataclass(frozen=True, slots=True)
class Probe:
    category: str

    def __str__(self):
        return f"{{{self.category}}}"


@dataclass(frozen=True, slots=True)
class Literal:
    word: str

    def __post_init__(self):
        _check_word(self.word, "literal")

    def __str__(self):
        return f'"{self.word}"'


@dataclass(frozen=True, slots=True)
class Root:
    category: str
    roots: tuple[str, ...]

    def __post_init__(self):
        if not self.roots:
            raise GrammarError(f"root terminal {self.category!r} has no root words")
        for r in self.roots:
            _check_word(r, "root word")

    def __str__(self):
        words = "|".join(f'"{r}"' for r in self.roots)
        return f"root({self.category}: {words})"


@dataclass(frozen=True, slots=True)
class NonTerminal:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True, slots=True)
class Noise:
    min_chars: int = 0
    max_chars: int = 40

    def __post_init__(self):
        if not 0 <= self.min_chars <= self.max_chars:
            raise GrammarError(f"bad noise bounds ({self.min_chars}, {self.max_chars})")

    def admits(self, gap: int) -> bool:
        return self.min_chars <= gap <= self.max_chars

    def __str__(self):
        return f"~({self.min_chars},{self.max_chars})"


Terminal = Union[Probe, Literal, Root]
Symbol = Union[Probe, Literal, Root, NonTerminal, Noise]
TERMINAL_TYPES = (Probe, Literal, Root)


@dataclass(frozen=True, slots=True)
class Rule:
    rule_id: str
    lhs: str
    rhs: tuple[Symbol, ...]
    probability: float

    def __post_init__(self):
        if not self.rhs:
            raise GrammarError(f"rule {self.rule_id}: empty right-hand side")
        if all(isinstance(s, Noise) for s in self.rhs):
            raise GrammarError(f"rule {self.rule_id}: right-hand side is only noise")
        if not (0.0 <= self.probability <= 1.0) or math.isnan(self.probability):
            raise GrammarError(f"rule {self.rule_id}: probability {self.probability} outside [0, 1]")

    @property
    def constituents(self) -> tuple[Symbol, ...]:
        return tuple(s for s in self.rhs if not isinstance(s, Noise))

    @property
    def shape(self) -> tuple:
        """The rule without its id and probability."""
        return (self.lhs, self.rhs)

    def __str__(self):
        return f"{self.lhs} -> {' '.join(map(str, self.rhs))} ; prob={self.probability:g}"


@dataclass(frozen=True)
class Grammar:
    rules: tuple[Rule, ...]
    start_symbols: tuple[str, ...] = (DEFAULT_START,)
    default_noise: Noise = Noise(0, 40)
    root_lexicon: dict[str, frozenset[str]] = field(default_factory=dict)

    def __post_init__(self):
        if not self.start_symbols:
            raise GrammarError("grammar needs at least one start symbol")
        seen = set()
        for r in self.rules:
            if r.rule_id in seen:
                raise GrammarError(f"duplicate rule id {r.rule_id}")
            seen.add(r.rule_id)

    def rules_for(self, lhs: str) -> list[Rule]:
        return [r for r in self.rules if r.lhs == lhs]

    def rule(self, rule_id: str) -> Rule:
        for r in self.rules:
            if r.rule_id == rule_id:
                return r
        raise KeyError(rule_id)

    @property
    def lhs_names(self) -> set[str]:
        return {r.lhs for r in self.rules}


def rule_sort_key(rule_id: str) -> tuple:
    """Natural ordering so that U#2 sorts before U#10."""
    return tuple(int(p) if p.isdigit() else p for p in re.split(r"(\d+)", rule_id))


# ---------------------------------------------------------------------------
# validation

@dataclass(frozen=True, slots=True)
class Diagnostic:
    level: str  # "error" | "warning"
    message: str
    rule_id: str | None = None

    def __str__(self):
        where = f" [{self.rule_id}]" if self.rule_id else ""
        return f"{self.level}{where}: {self.message}"


_LEARNED_ID = re.compile(r"^L(\d+)#\d+$")


def validate_grammar(g: Grammar, lexicon: dict[str, frozenset[str]] | None = None) -> list[Diagnostic]:
    """Report problems without raising. ``lexicon`` adds known root words beyond ``g.root_lexicon``."""
    diags = []
    defined = g.lhs_names
    known_roots = set(g.root_lexicon) | set(lexicon or ())

    for start in g.start_symbols:
        if start not in defined:
            diags.append(Diagnostic("error", f"start symbol {start} has no rules"))

    for r in g.rules:
        for i, s in enumerate(r.rhs):
            if isinstance(s, NonTerminal) and s.name not in defined:
                diags.append(Diagnostic("error", f"undefined non-terminal {s.name}", r.rule_id))
            if isinstance(s, Noise) and i > 0 and isinstance(r.rhs[i - 1], Noise):
                diags.append(Diagnostic("error", "adjacent noise symbols", r.rule_id))
            if isinstance(s, Root):
                for w in s.roots:
                    if w not in known_roots:
                        diags.append(
                            Diagnostic("warning", f"root word {w!r} not in root lexicon (suffix fallback only)", r.rule_id)
                        )
        if isinstance(r.rhs[0], Noise) or isinstance(r.rhs[-1], Noise):
            diags.append(Diagnostic("error", "noise at rule boundary", r.rule_id))
        for a, b in zip(r.rhs, r.rhs[1:]):
            if not isinstance(a, Noise) and not isinstance(b, Noise):
                diags.append(Diagnostic("warning", f"no noise between {a} and {b} (treated as zero-length)", r.rule_id))
                break

    reachable = set()
    frontier = [s for s in g.start_symbols if s in defined]
    while frontier:
        name = frontier.pop()
        if name in reachable:
            continue
        reachable.add(name)
        for r in g.rules_for(name):
            frontier.extend(s.name for s in r.rhs if isinstance(s, NonTerminal) and s.name in defined)
    for name in sorted(defined - reachable):
        diags.append(Diagnostic("warning", f"non-terminal {name} is unreachable from the start symbols"))

    groups: dict[tuple[str, str], float] = defaultdict(float)
    for r in g.rules:
        m = _LEARNED_ID.match(r.rule_id)
        if m:
            groups[(r.lhs, m.group(1))] += r.probability
    for (lhs, cluster), total in sorted(groups.items()):
        if abs(total - 1.0) > 1e-9:
            diags.append(
                Diagnostic("warning", f"learned cluster {cluster} rules for {lhs} sum to {total:.6g}, not 1")
            )
    return diags


# ---------------------------------------------------------------------------
# DSL

_IDENT = r"[A-Za-z_][\w\-]*"
_SYMBOL_RE = re.compile(
    rf"""\s*(?:
        \{{(?P<probe>{_IDENT})\}}
      | "(?P<lit>[^"\s]+)"
      | root\(\s*(?P<rootcat>{_IDENT})\s*:\s*(?P<roots>"[^"\s]+"(?:\s*\|\s*"[^"\s]+")*)\s*\)
      | (?P<ident>{_IDENT})
    )""",
    re.VERBOSE,
)
_RULE_RE = re.compile(rf"^\s*(?P<lhs>{_IDENT})\s*->(?P<rhs>[^;]*)(?:;(?P<attrs>.*))?$")
_ATTR_RE = re.compile(r"\s*([\w\-]+)\s*=\s*([^,\s]+)\s*(?:,|$)")


def _strip_comment(line: str) -> str:
    in_quote = False
    for i, ch in enumerate(line):
        if ch == '"':
            in_quote = not in_quote
        elif ch == "#" and not in_quote and (i == 0 or line[i - 1].isspace()):
            return line[:i]
    return line


def _parse_attrs(text: str, lineno: int, col: int) -> dict[str, str]:
    attrs = {}
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _ATTR_RE.match(text, pos)
        if not m or m.end() == pos:
            raise GrammarSyntaxError(f"cannot read attribute at {text[pos:]!r}", lineno, col + pos)
        attrs[m.group(1)] = m.group(2)
        pos = m.end()
    return attrs


def _int_attr(attrs, key, lineno, col) -> int:
    try:
        return int(attrs[key])
    except KeyError:
        raise GrammarSyntaxError(f"missing {key}=", lineno, col) from None
    except ValueError:
        raise GrammarSyntaxError(f"{key} must be an integer", lineno, col) from None


def load_root_lexicon(text: str) -> dict[str, frozenset[str]]:
    """Parse ``root-word: form1, form2`` lines."""
    lexicon: dict[str, set[str]] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if ":" not in line:
            raise GrammarSyntaxError("expected 'root: form, form'", lineno, 1)
        root, forms = line.split(":", 1)
        lexicon.setdefault(root.strip().lower(), set()).update(
            f.strip().lower() for f in forms.split(",") if f.strip()
        )
    return {k: frozenset(v) for k, v in lexicon.items()}


def parse_grammar(
    source: str,
    root_lexicon: dict[str, frozenset[str]] | None = None,
    default_noise: Noise | None = None,
) -> Grammar:
    """Read DSL text. ``default_noise`` applies unless the text has an ``@default_noise`` header."""
    start_symbols = [DEFAULT_START]
    default_noise = default_noise or Noise(0, 40)
    lexicon: dict[str, set[str]] = {k: set(v) for k, v in (root_lexicon or {}).items()}
    noise_names: dict[str, Noise] = {}
    # (lhs, [(kind, value, col)], prob, rule_id or None, lineno)
    raw_rules = []

    for lineno, line in enumerate(source.splitlines(), 1):
        body = _strip_comment(line)
        if not body.strip():
            continue
        col = len(body) - len(body.lstrip()) + 1
        stripped = body.strip()
        if stripped.startswith("@"):
            directive, _, rest = stripped.partition(" ")
            if directive == "@start":
                names = [n.strip() for n in rest.split(",") if n.strip()]
                if not names or not all(re.fullmatch(_IDENT, n) for n in names):
                    raise GrammarSyntaxError("@start needs identifiers", lineno, col)
                start_symbols = names
            elif directive == "@default_noise":
                attrs = {k: v for k, v in re.findall(r"(\w+)\s*=\s*(\S+)", rest)}
                try:
                    default_noise = Noise(int(attrs["min"]), int(attrs["max"]))
                except (KeyError, ValueError, GrammarError) as exc:
                    raise GrammarSyntaxError(f"bad @default_noise ({exc})", lineno, col) from None
            elif directive == "@lexicon":
                entry = load_root_lexicon(rest)
                for k, v in entry.items():
                    lexicon.setdefault(k, set()).update(v)
            else:
                raise GrammarSyntaxError(f"unknown directive {directive}", lineno, col)
            continue

        m = _RULE_RE.match(body)
        if not m:
            raise GrammarSyntaxError("expected '<name> -> <symbols> ; prob=<p>'", lineno, col)
        lhs = m.group("lhs")
        rhs_text = m.group("rhs")
        rhs_col = m.start("rhs") + 1
        attrs_text = m.group("attrs")
        attrs = _parse_attrs(attrs_text, lineno, m.start("attrs") + 1) if attrs_text is not None else {}

        if rhs_text.strip() == "noise":
            if lhs in noise_names:
                raise GrammarSyntaxError(f"noise {lhs} declared twice", lineno, col)
            try:
                noise_names[lhs] = Noise(
                    _int_attr(attrs, "minlength", lineno, rhs_col), _int_attr(attrs, "maxlength", lineno, rhs_col)
                )
            except GrammarError as exc:
                if isinstance(exc, GrammarSyntaxError):
                    raise
                raise GrammarSyntaxError(str(exc), lineno, rhs_col) from None
            continue

        symbols = []
        pos = 0
        while pos < len(rhs_text):
            if not rhs_text[pos:].strip():
                break
            sm = _SYMBOL_RE.match(rhs_text, pos)
            if not sm:
                bad = len(rhs_text[pos:]) - len(rhs_text[pos:].lstrip())
                raise GrammarSyntaxError(f"cannot read symbol at {rhs_text[pos:].strip()!r}", lineno, rhs_col + pos + bad)
            sym_col = rhs_col + pos + (len(sm.group(0)) - len(sm.group(0).lstrip()))
            if sm.group("probe"):
                symbols.append(("probe", sm.group("probe"), sym_col))
            elif sm.group("lit"):
                symbols.append(("lit", sm.group("lit"), sym_col))
            elif sm.group("rootcat"):
                words = tuple(re.findall(r'"([^"\s]+)"', sm.group("roots")))
                symbols.append(("root", (sm.group("rootcat"), words), sym_col))
            else:
                symbols.append(("ident", sm.group("ident"), sym_col))
            pos = sm.end()
        if not symbols:
            raise GrammarSyntaxError("empty right-hand side", lineno, rhs_col)
        if "prob" not in attrs:
            raise GrammarSyntaxError("missing prob=", lineno, len(body.rstrip()) + 1)
        try:
            prob = float(attrs["prob"])
        except ValueError:
            raise GrammarSyntaxError(f"prob {attrs['prob']!r} is not a number", lineno, col) from None
        if not 0.0 <= prob <= 1.0:
            raise GrammarSyntaxError(f"prob {prob} outside [0, 1]", lineno, col)
        raw_rules.append((lhs, symbols, prob, attrs.get("id"), lineno))

    defined = {lhs for lhs, *_ in raw_rules}
    for name in noise_names:
        if name in defined:
            raise GrammarSyntaxError(f"{name} is declared both as noise and as a non-terminal", 1, 1)

    rules = []
    explicit_ids = {rid for *_, rid, _ in raw_rules if rid}
    counter = 0
    for lhs, symbols, prob, rule_id, lineno in raw_rules:
        rhs: list[Symbol] = []
        for kind, value, col in symbols:
            if kind == "probe":
                sym = Probe(value)
            elif kind == "lit":
                sym = Literal(value)
            elif kind == "root":
                sym = Root(value[0], value[1])
            elif value in noise_names:
                sym = noise_names[value]
            elif value in defined:
                sym = NonTerminal(value)
            else:
                raise GrammarSyntaxError(f"undefined non-terminal {value}", lineno, col)
            if isinstance(sym, Noise):
                if not rhs:
                    raise GrammarSyntaxError("noise at start of rule", lineno, col)
                if isinstance(rhs[-1], Noise):
                    raise GrammarSyntaxError("adjacent noise symbols", lineno, col)
            elif rhs and not isinstance(rhs[-1], Noise):
                rhs.append(default_noise)
            rhs.append(sym)
        if isinstance(rhs[-1], Noise):
            raise GrammarSyntaxError("noise at end of rule", lineno, symbols[-1][2])
        if rule_id is None:
            counter += 1
            while f"U#{counter}" in explicit_ids:
                counter += 1
            rule_id = f"U#{counter}"
        rules.append(Rule(rule_id, lhs, tuple(rhs), prob))

    for start in start_symbols:
        if start not in defined:
            raise GrammarSyntaxError(f"no rule for start symbol {start}", len(source.splitlines()) or 1, 1)
    try:
        return Grammar(
            tuple(rules),
            tuple(start_symbols),
            default_noise,
            {k: frozenset(v) for k, v in lexicon.items()},
        )
    except GrammarError as exc:
        raise GrammarSyntaxError(str(exc), 1, 1) from None


def _noise_name(n: Noise) -> str:
    return f"NOISE_{n.min_chars}_{n.max_chars}"


def serialize_grammar(g: Grammar) -> str:
    """Emit DSL text; every noise symbol is written out explicitly."""
    lines = [f"@start {', '.join(g.start_symbols)}"]
    lines.append(f"@default_noise min={g.default_noise.min_chars} max={g.default_noise.max_chars}")
    for root in sorted(g.root_lexicon):
        lines.append(f"@lexicon {root}: {', '.join(sorted(g.root_lexicon[root]))}")
    noises = sorted({s for r in g.rules for s in r.rhs if isinstance(s, Noise)}, key=lambda n: (n.min_chars, n.max_chars))
    for n in noises:
        lines.append(f"{_noise_name(n)} -> noise ; minlength={n.min_chars}, maxlength={n.max_chars}")
    for r in g.rules:
        rhs = " ".join(_noise_name(s) if isinstance(s, Noise) else str(s) for s in r.rhs)
        lines.append(f"{r.lhs} -> {rhs} ; prob={r.probability!r}, id={r.rule_id}")
    return "\n".join(lines) + "\n"
