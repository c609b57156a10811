"""Bottom-up chart parsing with bounded noise gaps, parse scoring and extraction.

Chart positions are token boundaries. Terminal matches seed the agenda as
passive edges; rules are started bottom-up from their first constituent and
extended left to right. Between two constituents the rule's noise symbol
decides how much text may be skipped: the whitespace-trimmed character length
of the skipped text must fall inside its bounds. Two constituents written
without noise between them must be separated by whitespace only.

Passive edges with the same (symbol, start, end) share one edge and collect
all their derivations; so do active edges with the same (rule, progress,
start, end). Parse trees are unpacked from this forest on demand.
"""

from __future__ import annotations

import itertools
import json
from collections import defaultdict, deque
from dataclasses import dataclass
from typing import Iterator, Union

from .grammar import Grammar, Literal, Noise, NonTerminal, Probe, Root, Rule, Terminal, rule_sort_key
from .textmodel import AnnotatedDocument, gap_chars

DEFAULT_EDGE_CAP = 1_000_000
ROOT_SUFFIXES = ("ing", "es", "ed", "s", "d")

# Irregular forms the suffix fallback cannot reach. Grammar lexicons extend this.
BUILTIN_ROOT_LEXICON: dict[str, frozenset[str]] = {
    "make": frozenset({"made", "makes", "making"}),
    "hit": frozenset({"hits", "hitting"}),
    "score": frozenset({"scored", "scores", "scoring"}),
    "take": frozenset({"took", "taken", "takes", "taking"}),
    "win": frozenset({"won", "wins", "winning"}),
    "beat": frozenset({"beaten", "beats", "beating"}),
    "lose": frozenset({"lost", "loses", "losing"}),
    "run": frozenset({"ran", "runs", "running"}),
    "get": frozenset({"got", "gets", "getting", "gotten"}),
    "give": frozenset({"gave", "given", "gives", "giving"}),
    "strike": frozenset({"struck", "strikes", "striking"}),
    "bowl": frozenset({"bowled", "bowls", "bowling"}),
    "smash": frozenset({"smashed", "smashes", "smashing"}),
    "hold": frozenset({"held", "holds", "holding"}),
    "fall": frozenset({"fell", "fallen", "falls", "falling"}),
}


class ChartOverflowError(RuntimeError):
    """The chart grew past its edge cap."""


class StaleExtractionError(LookupError):
    """An extraction does not belong to the document/grammar it was explained against."""


@dataclass(frozen=True, slots=True)
class TerminalMatch:
    terminal: Terminal
    char_range: tuple[int, int]
    token_range: tuple[int, int]  # inclusive
    confidence: float

    @property
    def score(self) -> float:
        return self.confidence

    @property
    def is_probe(self) -> bool:
        return isinstance(self.terminal, Probe)


@dataclass(frozen=True, slots=True)
class NoiseFill:
    spec: Noise
    char_range: tuple[int, int]
    gap_len: int


Child = Union["ParseNode", TerminalMatch, NoiseFill]


@dataclass(frozen=True, slots=True)
class ParseNode:
    rule_id: str
    lhs: str
    probability: float
    token_range: tuple[int, int]  # inclusive
    char_range: tuple[int, int]
    children: tuple[Child, ...]
    score: float

    @property
    def scored_children(self) -> list:
        return [c for c in self.children if not isinstance(c, NoiseFill)]

    def terminal_matches(self) -> Iterator[TerminalMatch]:
        for c in self.children:
            if isinstance(c, TerminalMatch):
                yield c
            elif isinstance(c, ParseNode):
                yield from c.terminal_matches()

    def nodes(self) -> Iterator["ParseNode"]:
        yield self
        for c in self.children:
            if isinstance(c, ParseNode):
                yield from c.nodes()

    def to_dict(self, doc: AnnotatedDocument | None = None) -> dict:
        def child(c):
            if isinstance(c, ParseNode):
                return c.to_dict(doc)
            if isinstance(c, NoiseFill):
                return {
                    "noise": [c.spec.min_chars, c.spec.max_chars],
                    "char_range": list(c.char_range),
                    "gap_len": c.gap_len,
                }
            out = {"terminal": str(c.terminal), "char_range": list(c.char_range), "confidence": c.confidence}
            if doc is not None:
                out["text"] = doc.text(c.char_range)
            return out

        out = {
            "rule_id": self.rule_id,
            "lhs": self.lhs,
            "probability": self.probability,
            "char_range": list(self.char_range),
            "score": self.score,
            "children": [child(c) for c in self.children],
        }
        if doc is not None:
            out["text"] = doc.text(self.char_range)
        return out


@dataclass(frozen=True, slots=True)
class Extraction:
    doc_id: str
    char_range: tuple[int, int]
    surface_text: str
    rule_id: str
    score: float
    parse: ParseNode


def score_node(rule_prob: float, child_scores) -> float:
    """Rule probability times the mean of the (non-noise) child scores."""
    child_scores = list(child_scores)
    if not child_scores:
        raise ValueError("a parse node needs at least one scored child")
    return rule_prob * (sum(child_scores) / len(child_scores))


# ---------------------------------------------------------------------------
# terminal matching

def _root_matches(word: str, roots, lexicon: dict[str, frozenset[str]]) -> bool:
    word = word.lower()
    for root in roots:
        root = root.lower()
        if word == root or word in lexicon.get(root, ()):
            return True
    candidates = [word[: -len(suf)] for suf in ROOT_SUFFIXES if word.endswith(suf) and len(word) > len(suf)]
    return any(c == r.lower() for c in candidates for r in roots)


def match_terminal(
    term: Terminal,
    doc: AnnotatedDocument,
    from_token: int,
    lexicon: dict[str, frozenset[str]] | None = None,
) -> list[TerminalMatch]:
    """All matches of ``term`` beginning at token ``from_token``.

    Literal and root terminals never match a token that lies inside a probe span.
    """
    if not 0 <= from_token < len(doc.tokens):
        return []
    if isinstance(term, Probe):
        return [
            TerminalMatch(term, p.char_range, p.token_range, p.confidence)
            for p in doc.probes_starting_at(from_token)
            if p.category == term.category
        ]
    if from_token in doc.covered_tokens():
        return []
    tok = doc.tokens[from_token]
    rng = (tok.char_start, tok.char_end)
    if isinstance(term, Literal):
        if tok.surface.lower() == term.word.lower():
            return [TerminalMatch(term, rng, (from_token, from_token), 1.0)]
        return []
    if isinstance(term, Root):
        merged = dict(BUILTIN_ROOT_LEXICON)
        merged.update(lexicon or {})
        if _root_matches(tok.surface, term.roots, merged):
            return [TerminalMatch(term, rng, (from_token, from_token), 1.0)]
        return []
    raise TypeError(f"not a terminal: {term!r}")


# ---------------------------------------------------------------------------
# chart

@dataclass
class _Passive:
    symbol: object
    start: int  # token position, half-open
    end: int
    derivations: list  # TerminalMatch for terminals, active keys for non-terminals


@dataclass
class _Active:
    rule: Rule
    progress: int  # constituents matched so far
    start: int
    end: int
    derivations: list  # (previous active key | None, passive key, NoiseFill | None)


def _rule_plan(rule: Rule) -> tuple[list, list]:
    """Split a rule into its constituents and the noise spec before each (None = adjacent)."""
    constituents, gaps = [], []
    pending = None
    for s in rule.rhs:
        if isinstance(s, Noise):
            pending = s
        else:
            gaps.append(pending)
            constituents.append(s)
            pending = None
    return constituents, gaps


class Chart:
    """Packed (or, for testing, unpacked) bottom-up chart for one document."""

    def __init__(self, doc: AnnotatedDocument, grammar: Grammar, edge_cap: int = DEFAULT_EDGE_CAP, packed: bool = True):
        self.doc = doc
        self.grammar = grammar
        self.edge_cap = edge_cap
        self.packed = packed
        self.lexicon = dict(BUILTIN_ROOT_LEXICON)
        self.lexicon.update(grammar.root_lexicon)
        self.passives: dict[tuple, _Passive] = {}
        self.actives: dict[tuple, _Active] = {}
        self._plans = {r.rule_id: _rule_plan(r) for r in grammar.rules}
        self._serial = itertools.count()
        self._passive_by_symbol: dict[object, list[tuple]] = defaultdict(list)
        self._active_by_next: dict[object, list[tuple]] = defaultdict(list)
        self._rules_by_first: dict[object, list[Rule]] = defaultdict(list)
        for r in grammar.rules:
            self._rules_by_first[self._plans[r.rule_id][0][0]].append(r)
        self._agenda: deque[tuple[str, tuple]] = deque()

    # -- geometry ---------------------------------------------------------
    def char_start(self, pos: int) -> int:
        return self.doc.tokens[pos].char_start

    def char_end(self, pos: int) -> int:
        return self.doc.tokens[pos - 1].char_end

    def _gap(self, left_end_pos: int, right_start_pos: int, spec: Noise | None):
        """Return (ok, NoiseFill|None) for skipping text between two positions."""
        if right_start_pos < left_end_pos:
            return False, None
        lo = self.char_end(left_end_pos)
        hi = self.char_start(right_start_pos)
        n = gap_chars(self.doc, lo, hi)
        if spec is None:
            return n == 0, None
        if not spec.admits(n):
            return False, None
        return True, NoiseFill(spec, (lo, hi), n)

    # -- edge bookkeeping -------------------------------------------------
    def _check_cap(self):
        if len(self.passives) + len(self.actives) > self.edge_cap:
            raise ChartOverflowError(
                f"chart for {self.doc.doc_id!r} exceeded {self.edge_cap} edges; raise edge_cap or simplify the grammar"
            )

    def _add_passive(self, symbol, start, end, derivation):
        key = (symbol, start, end) if self.packed else (symbol, start, end, next(self._serial))
        edge = self.passives.get(key)
        if edge is not None:
            edge.derivations.append(derivation)
            return
        self.passives[key] = _Passive(symbol, start, end, [derivation])
        self._check_cap()
        self._agenda.append(("p", key))

    def _add_active(self, rule, progress, start, end, derivation):
        constituents = self._plans[rule.rule_id][0]
        key = (rule.rule_id, progress, start, end)
        if not self.packed:
            key += (next(self._serial),)
        edge = self.actives.get(key)
        if edge is not None:
            edge.derivations.append(derivation)
            return
        self.actives[key] = _Active(rule, progress, start, end, [derivation])
        self._check_cap()
        if progress == len(constituents):
            self._add_passive(NonTerminal(rule.lhs), start, end, key)
        else:
            self._agenda.append(("a", key))

    def _extend(self, akey, pkey):
        active = self.actives[akey]
        passive = self.passives[pkey]
        constituents, gaps = self._plans[active.rule.rule_id]
        ok, fill = self._gap(active.end, passive.start, gaps[active.progress])
        if ok:
            self._add_active(active.rule, active.progress + 1, active.start, passive.end, (akey, pkey, fill))

    def build(self) -> "Chart":
        doc = self.doc
        terminals = {s for r in self.grammar.rules for s in r.rhs if isinstance(s, (Probe, Literal, Root))}
        for term in sorted(terminals, key=str):
            for i in range(len(doc.tokens)):
                for m in match_terminal(term, doc, i, self.lexicon):
                    self._add_passive(term, m.token_range[0], m.token_range[1] + 1, m)

        while self._agenda:
            kind, key = self._agenda.popleft()
            # an edge joins the indexes only once processed, so each
            # (active, passive) pair is combined exactly once
            if kind == "p":
                passive = self.passives[key]
                self._passive_by_symbol[passive.symbol].append(key)
                for rule in self._rules_by_first.get(passive.symbol, ()):
                    self._add_active(rule, 1, passive.start, passive.end, (None, key, None))
                for akey in list(self._active_by_next.get(passive.symbol, ())):
                    self._extend(akey, key)
            else:
                active = self.actives[key]
                nxt = self._plans[active.rule.rule_id][0][active.progress]
                self._active_by_next[nxt].append(key)
                for pkey in list(self._passive_by_symbol.get(nxt, ())):
                    self._extend(key, pkey)
        return self

    # -- unpacking --------------------------------------------------------
    def passive_edges(self, symbol) -> list[tuple]:
        return list(self._passive_by_symbol.get(symbol, ()))

    def _passive_parses(self, pkey, visiting: frozenset) -> list:
        edge = self.passives[pkey]
        if not isinstance(edge.symbol, NonTerminal):
            return list(edge.derivations)
        if pkey in visiting:
            return []
        visiting = visiting | {pkey}
        out = []
        for akey in edge.derivations:
            active = self.actives[akey]
            rule = active.rule
            for children in self._active_children(akey, visiting):
                out.append(self._make_node(rule, active.start, active.end, children))
        return out

    def _active_children(self, akey, visiting) -> list[tuple]:
        active = self.actives[akey]
        out = []
        for prev, pkey, fill in active.derivations:
            heads = [()] if prev is None else self._active_children(prev, visiting)
            if not heads:
                continue
            for sub in self._passive_parses(pkey, visiting):
                tail = (fill, sub) if fill is not None else (sub,)
                out.extend(h + tail for h in heads)
        return out

    def _make_node(self, rule: Rule, start: int, end: int, children: tuple) -> ParseNode:
        score = score_node(rule.probability, [c.score for c in children if not isinstance(c, NoiseFill)])
        return ParseNode(
            rule.rule_id,
            rule.lhs,
            rule.probability,
            (start, end - 1),
            (self.char_start(start), self.char_end(end)),
            tuple(children),
            score,
        )

    def best_parse(self, pkey, visiting: frozenset = frozenset()):
        """Highest-scoring tree for one packed edge (lowest rule id on ties)."""
        edge = self.passives[pkey]
        if not isinstance(edge.symbol, NonTerminal):
            return max(edge.derivations, key=lambda m: m.confidence)
        if pkey in visiting:
            return None
        visiting = visiting | {pkey}
        best = None
        for akey in sorted(edge.derivations, key=lambda k: rule_sort_key(k[0])):
            active = self.actives[akey]
            children = self._best_children(akey, visiting)
            if children is None:
                continue
            node = self._make_node(active.rule, active.start, active.end, children)
            if best is None or node.score > best.score:
                best = node
        return best

    def _best_children(self, akey, visiting):
        active = self.actives[akey]
        best, best_sum = None, -1.0
        for prev, pkey, fill in active.derivations:
            head = () if prev is None else self._best_children(prev, visiting)
            if head is None:
                continue
            sub = self.best_parse(pkey, visiting)
            if sub is None:
                continue
            children = head + ((fill, sub) if fill is not None else (sub,))
            total = sum(c.score for c in children if not isinstance(c, NoiseFill))
            if total > best_sum:
                best, best_sum = children, total
        return best


def build_chart(doc: AnnotatedDocument, g: Grammar, edge_cap: int = DEFAULT_EDGE_CAP, packed: bool = True) -> Chart:
    return Chart(doc, g, edge_cap=edge_cap, packed=packed).build()


def parse_rank_key(node: ParseNode) -> tuple:
    """Descending score, then earlier start, longer span, lower rule id."""
    start, end = node.char_range
    return (-node.score, start, -(end - start), rule_sort_key(node.rule_id))


def enumerate_parses(chart: Chart, symbol: str) -> list[ParseNode]:
    """Every complete parse rooted at ``symbol``, best first."""
    out = []
    for pkey in chart.passive_edges(NonTerminal(symbol)):
        out.extend(chart._passive_parses(pkey, frozenset()))
    out.sort(key=parse_rank_key)
    return out


def _overlaps(a: tuple[int, int], b: tuple[int, int]) -> bool:
    return a[0] < b[1] and b[0] < a[1]


def select_extractions(doc: AnnotatedDocument, candidates) -> list[Extraction]:
    """Greedy highest-score-first selection of non-overlapping parses, returned in document order."""
    chosen: list[ParseNode] = []
    for node in sorted(candidates, key=parse_rank_key):
        if any(_overlaps(node.char_range, c.char_range) for c in chosen):
            continue
        chosen.append(node)
    chosen.sort(key=lambda n: n.char_range)
    return [
        Extraction(doc.doc_id, n.char_range, " ".join(doc.text(n.char_range).split()), n.rule_id, n.score, n)
        for n in chosen
    ]


def extract(doc: AnnotatedDocument, g: Grammar, edge_cap: int = DEFAULT_EDGE_CAP) -> list[Extraction]:
    """Extract informational strings from one document.

    Only the best tree of each packed start-symbol edge is a candidate: any
    other tree over the same span overlaps it and would lose the greedy pass.
    """
    if not doc.tokens or not g.rules:
        return []
    chart = build_chart(doc, g, edge_cap=edge_cap)
    candidates = []
    for start in g.start_symbols:
        for pkey in chart.passive_edges(NonTerminal(start)):
            node = chart.best_parse(pkey)
            if node is not None:
                candidates.append(node)
    return select_extractions(doc, candidates)


# ---------------------------------------------------------------------------
# explanation

def _fmt(x: float) -> str:
    return f"{x:.6g}"


def _check_fresh(doc: AnnotatedDocument, g: Grammar, extraction: Extraction):
    if extraction.doc_id != doc.doc_id:
        raise StaleExtractionError(f"extraction is from document {extraction.doc_id!r}, not {doc.doc_id!r}")
    s, e = extraction.char_range
    if not 0 <= s < e <= len(doc.raw_text):
        raise StaleExtractionError(f"span {extraction.char_range} is outside document {doc.doc_id!r}")
    for node in extraction.parse.nodes():
        try:
            rule = g.rule(node.rule_id)
        except KeyError:
            raise StaleExtractionError(f"rule {node.rule_id} is not in the grammar") from None
        if rule.probability != node.probability or rule.lhs != node.lhs:
            raise StaleExtractionError(f"rule {node.rule_id} changed since the extraction was made")


def explain(doc: AnnotatedDocument, g: Grammar, extraction: Extraction, as_json: bool = False) -> str:
    """Render the derivation behind an extraction, one line per tree node."""
    _check_fresh(doc, g, extraction)
    if as_json:
        return json.dumps(
            {
                "doc_id": extraction.doc_id,
                "char_range": list(extraction.char_range),
                "text": extraction.surface_text,
                "score": extraction.score,
                "parse": extraction.parse.to_dict(doc),
            },
            indent=2,
        )

    lines = []

    def label(node: ParseNode) -> str:
        return f"{node.lhs}[{node.char_range[0]}:{node.char_range[1]}]"

    def render(node: ParseNode, depth: int):
        parts = []
        for c in node.children:
            if isinstance(c, ParseNode):
                parts.append(f"{label(c)}={_fmt(c.score)}")
            elif isinstance(c, NoiseFill):
                parts.append(f"~{c.gap_len}/({c.spec.min_chars},{c.spec.max_chars})~")
            else:
                parts.append(f"{c.terminal}:{doc.text(c.char_range)!r}={_fmt(c.confidence)}")
        scores = ", ".join(_fmt(c.score) for c in node.scored_children)
        arithmetic = f"{_fmt(node.probability)} × mean({scores}) = {_fmt(node.score)}"
        lines.append(f"{'  ' * depth}{label(node)} {node.rule_id}: {' '.join(parts)} | score = {arithmetic}")
        for c in node.children:
            if isinstance(c, ParseNode):
                render(c, depth + 1)

    render(extraction.parse, 0)
    return "\n".join(lines)
