"""Annotated documents: inline-markup ingestion, tokens, probe and gold spans.

Input documents carry the output of an upstream tagger as inline markup::

    <IMP><name>Dravid</name> hit <runs conf="0.9">67 runs</runs> in the match</IMP>.

Every tag other than ``IMP`` is a probe whose tag name is its category.
``IMP`` marks a gold informational string. All offsets in the resulting
:class:`AnnotatedDocument` refer to the markup-free ``raw_text``.

Probe tags may nest to express alternative readings of the same text, e.g.
``<name><degree>B.A.</degree> Ambedkar</name>``. Crossing tags are an error.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

GOLD_TAG = "IMP"
PUNCTUATION = frozenset(".,;:!?\"'()")

_ENTITIES = {"&amp;": "&", "&lt;": "<", "&gt;": ">"}
_MARKUP_RE = re.compile(
    r"""<(?P<close>/)?(?P<name>[A-Za-z_][\w\-]*)(?P<attrs>(?:\s+[\w\-]+\s*=\s*(?:"[^"]*"|'[^']*'))*)\s*>"""
    r"""|&(?:amp|lt|gt);|<"""
)
_ATTR_RE = re.compile(r"""([\w\-]+)\s*=\s*(?:"([^"]*)"|'([^']*)')""")


class AnnotationError(ValueError):
    """Malformed markup or an invalid annotation attribute."""

    def __init__(self, message: str, tag: str | None = None, offset: int | None = None):
        where = []
        if tag is not None:
            where.append(f"tag <{tag}>")
        if offset is not None:
            where.append(f"offset {offset}")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)
        self.tag = tag
        self.offset = offset


@dataclass(frozen=True, slots=True)
class Token:
    surface: str
    char_start: int
    char_end: int

    def __post_init__(self):
        if not self.char_start < self.char_end:
            raise ValueError(f"empty token at {self.char_start}")


@dataclass(frozen=True, slots=True)
class ProbeSpan:
    """An annotated atomic unit. ``token_range`` is inclusive on both ends."""

    category: str
    confidence: float
    token_range: tuple[int, int]
    char_range: tuple[int, int]

    def __post_init__(self):
        if not 0.0 <= self.confidence <= 1.0:
            raise AnnotationError(f"confidence {self.confidence} outside [0, 1]", self.category)


@dataclass(frozen=True, slots=True)
class GoldSpan:
    char_range: tuple[int, int]
    probe_sequence: tuple[str, ...]
    doc_id: str = ""


@dataclass(frozen=True)
class AnnotatedDocument:
    doc_id: str
    raw_text: str
    tokens: tuple[Token, ...] = ()
    probes: tuple[ProbeSpan, ...] = ()
    gold: tuple[GoldSpan, ...] = ()
    # lazily built indexes, excluded from equality
    _probe_starts: dict = field(default=None, init=False, repr=False, compare=False)
    _covered: frozenset = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        n = len(self.raw_text)
        for p in self.probes:
            s, e = p.char_range
            if not 0 <= s < e <= n:
                raise AnnotationError(f"probe span {p.char_range} outside text of length {n}", p.category)

    def text(self, char_range: tuple[int, int]) -> str:
        return self.raw_text[char_range[0]:char_range[1]]

    def probes_starting_at(self, token_index: int) -> tuple[ProbeSpan, ...]:
        if self._probe_starts is None:
            index: dict[int, list[ProbeSpan]] = {}
            for p in self.probes:
                index.setdefault(p.token_range[0], []).append(p)
            object.__setattr__(self, "_probe_starts", {k: tuple(v) for k, v in index.items()})
        return self._probe_starts.get(token_index, ())

    def covered_tokens(self) -> frozenset[int]:
        """Token indices that fall inside some probe span."""
        if self._covered is None:
            covered = set()
            for p in self.probes:
                covered.update(range(p.token_range[0], p.token_range[1] + 1))
            object.__setattr__(self, "_covered", frozenset(covered))
        return self._covered


def tokenize(text: str) -> list[Token]:
    """Split on whitespace, peeling leading/trailing punctuation into one-char tokens."""
    tokens = []
    for m in re.finditer(r"\S+", text):
        start, end = m.span()
        lead = start
        while lead < end and text[lead] in PUNCTUATION:
            tokens.append(Token(text[lead], lead, lead + 1))
            lead += 1
        trail = end
        while trail > lead and text[trail - 1] in PUNCTUATION:
            trail -= 1
        if lead < trail:
            tokens.append(Token(text[lead:trail], lead, trail))
        for i in range(trail, end):
            tokens.append(Token(text[i], i, i + 1))
    return tokens


def _tokenize_with_boundaries(text: str, boundaries: set[int]) -> list[Token]:
    cuts = sorted({0, len(text)} | {b for b in boundaries if 0 < b < len(text)})
    tokens = []
    for a, b in zip(cuts, cuts[1:]):
        for t in tokenize(text[a:b]):
            tokens.append(Token(t.surface, t.char_start + a, t.char_end + a))
    return tokens


def _trim(text: str, start: int, end: int) -> tuple[int, int]:
    while start < end and text[start].isspace():
        start += 1
    while end > start and text[end - 1].isspace():
        end -= 1
    return start, end


def _token_range(tokens: list[Token], char_range: tuple[int, int]) -> tuple[int, int]:
    s, e = char_range
    inside = [i for i, t in enumerate(tokens) if t.char_start >= s and t.char_end <= e]
    return inside[0], inside[-1]


def _parse_attrs(attrs: str) -> dict[str, str]:
    out = {}
    for m in _ATTR_RE.finditer(attrs):
        value = m.group(2) if m.group(2) is not None else m.group(3)
        out[m.group(1)] = value
    return out


def _confidence(tag: str, attrs: dict[str, str], offset: int) -> float:
    raw = attrs.get("conf")
    if raw is None:
        return 1.0
    try:
        conf = float(raw)
    except ValueError:
        raise AnnotationError(f"confidence {raw!r} is not a number", tag, offset) from None
    if not 0.0 <= conf <= 1.0:
        raise AnnotationError(f"confidence {conf} outside [0, 1]", tag, offset)
    return conf


def parse_annotated_document(source: str, doc_id: str = "doc") -> AnnotatedDocument:
    """Strip inline markup from ``source`` and record probe and gold spans.

    Offsets reported in errors are offsets into ``source``.
    """
    pieces: list[str] = []
    length = 0
    # (name, attrs, raw offset, source offset)
    stack: list[tuple[str, dict[str, str], int, int]] = []
    raw_probes: list[tuple[str, float, int, int]] = []
    raw_gold: list[tuple[int, int]] = []

    pos = 0
    for m in _MARKUP_RE.finditer(source):
        if m.start() > pos:
            pieces.append(source[pos:m.start()])
            length += m.start() - pos
        pos = m.end()
        token = m.group(0)
        if token in _ENTITIES:
            pieces.append(_ENTITIES[token])
            length += 1
            continue
        name = m.group("name")
        if name is None:
            raise AnnotationError("stray '<' (escape it as &lt;)", None, m.start())
        if m.group("close"):
            if not stack:
                raise AnnotationError("closing tag without opening tag", name, m.start())
            open_name, attrs, raw_start, src_start = stack.pop()
            if open_name != name:
                raise AnnotationError(
                    f"improperly nested: expected </{open_name}> (opened at {src_start})", name, m.start()
                )
            if name == GOLD_TAG:
                raw_gold.append((raw_start, length))
            else:
                raw_probes.append((name, _confidence(name, attrs, src_start), raw_start, length))
        else:
            if name == GOLD_TAG and stack:
                inner = "IMP inside IMP" if any(s[0] == GOLD_TAG for s in stack) else "IMP inside a probe"
                raise AnnotationError(inner, name, m.start())
            stack.append((name, _parse_attrs(m.group("attrs")), length, m.start()))
    if pos < len(source):
        pieces.append(source[pos:])
    if stack:
        name, _, _, src_start = stack[-1]
        raise AnnotationError("unclosed tag", name, src_start)

    raw_text = "".join(pieces)
    trimmed_probes = []
    for name, conf, s, e in raw_probes:
        ts, te = _trim(raw_text, s, e)
        if ts == te:
            raise AnnotationError("probe has no content", name, s)
        trimmed_probes.append((name, conf, ts, te))
    trimmed_gold = [_trim(raw_text, s, e) for s, e in raw_gold]

    boundaries = set()
    for _, _, s, e in trimmed_probes:
        boundaries.update((s, e))
    for s, e in trimmed_gold:
        boundaries.update((s, e))
    tokens = _tokenize_with_boundaries(raw_text, boundaries)

    probes = sorted(
        (ProbeSpan(name, conf, _token_range(tokens, (s, e)), (s, e)) for name, conf, s, e in trimmed_probes),
        key=lambda p: (p.char_range[0], -p.char_range[1], p.category),
    )
    gold = []
    for s, e in sorted(trimmed_gold):
        seq = tuple(p.category for p in probes if s <= p.char_range[0] and p.char_range[1] <= e)
        gold.append(GoldSpan((s, e), seq, doc_id))
    return AnnotatedDocument(doc_id, raw_text, tuple(tokens), tuple(probes), tuple(gold))


def gap_chars(doc: AnnotatedDocument, left_end: int, right_start: int) -> int:
    """Length of the whitespace-trimmed text between two character offsets."""
    if not 0 <= left_end <= right_start <= len(doc.raw_text):
        raise IndexError(
            f"gap [{left_end}, {right_start}) outside document {doc.doc_id!r} of length {len(doc.raw_text)}"
        )
    return len(doc.raw_text[left_end:right_start].strip())
