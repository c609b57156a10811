"""Grammar induction from documents with gold ``IMP`` spans.

The pipeline: every gold span becomes a training instance; instances are
clustered by their exact probe-category sequence; within a cluster each slot
(the gap before, between and after the probes) contributes trigram counts
``(left, interior word or NULL, right)``; interiors whose relative frequency
in their slot falls below ``rho`` are dropped; rules are generated from the
cross product of surviving interiors plus one probes-only generic rule.
"""

from __future__ import annotations

import itertools
import json
import warnings
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Optional

from .grammar import DEFAULT_START, Grammar, Literal, Noise, Probe, Rule
from .textmodel import AnnotatedDocument, tokenize

START = "START"
END = "END"
NULL = None  # interior of an empty slot


class LearnerError(ValueError):
    pass


@dataclass(frozen=True)
class LearnerConfig:
    rho: float = 0.0
    generic_mass: float = 0.5
    noise_slack_chars: int = 0
    min_noise: int = 0
    start_symbol: str = DEFAULT_START

    def __post_init__(self):
        if not 0.0 <= self.rho <= 1.0:
            raise ValueError(f"rho must lie in [0, 1], got {self.rho}")
        if not 0.0 <= self.generic_mass <= 1.0:
            raise ValueError(f"generic_mass must lie in [0, 1], got {self.generic_mass}")
        if self.noise_slack_chars < 0 or self.min_noise < 0:
            raise ValueError("noise settings must be non-negative")


@dataclass(frozen=True, slots=True)
class SlotGap:
    text: str  # whitespace-trimmed gap text
    length: int  # gap_chars of the gap
    interior: Optional[str]  # last word before the slot's right symbol, lower-cased
    tail: int  # characters between that word and the right symbol


@dataclass(frozen=True, slots=True)
class TrainingInstance:
    doc_id: str
    char_range: tuple[int, int]
    probe_sequence: tuple[str, ...]
    slot_gaps: tuple[SlotGap, ...]

    def __post_init__(self):
        if len(self.slot_gaps) != len(self.probe_sequence) + 1:
            raise ValueError("slot count must be probe count + 1")


@dataclass(frozen=True)
class Cluster:
    key: tuple[str, ...]
    instances: tuple[TrainingInstance, ...]

    @property
    def slot_count(self) -> int:
        return len(self.key) + 1

    def slot_symbols(self, slot: int) -> tuple[str, str]:
        left = START if slot == 0 else self.key[slot - 1]
        right = END if slot == len(self.key) else self.key[slot]
        return left, right


@dataclass(frozen=True, slots=True)
class TrigramStat:
    slot_index: int
    left_symbol: str
    interior: Optional[str]
    right_symbol: str
    count: int


def _slot_gap(text: str) -> SlotGap:
    trimmed = text.strip()
    words = [t for t in tokenize(trimmed) if any(ch.isalnum() for ch in t.surface)]
    if not words:
        return SlotGap(trimmed, len(trimmed), NULL, 0)
    last = words[-1]
    return SlotGap(trimmed, len(trimmed), last.surface.lower(), len(trimmed) - last.char_end)


def collect_instances(corpus: Iterable[AnnotatedDocument]) -> list[TrainingInstance]:
    """One instance per gold span; spans without probes (or with overlapping probes) are skipped with a warning."""
    instances = []
    for doc in corpus:
        for gold in doc.gold:
            gs, ge = gold.char_range
            probes = [p for p in doc.probes if gs <= p.char_range[0] and p.char_range[1] <= ge]
            if not probes:
                warnings.warn(f"{doc.doc_id}: gold span {gold.char_range} contains no probes; skipped", stacklevel=2)
                continue
            if any(a.char_range[1] > b.char_range[0] for a, b in zip(probes, probes[1:])):
                warnings.warn(f"{doc.doc_id}: gold span {gold.char_range} has overlapping probes; skipped", stacklevel=2)
                continue
            bounds = [gs] + [x for p in probes for x in p.char_range] + [ge]
            gaps = tuple(_slot_gap(doc.raw_text[bounds[2 * i]:bounds[2 * i + 1]]) for i in range(len(probes) + 1))
            instances.append(TrainingInstance(doc.doc_id, gold.char_range, tuple(p.category for p in probes), gaps))
    return instances


def cluster_by_tag_sequence(instances: Iterable[TrainingInstance]) -> list[Cluster]:
    groups: dict[tuple[str, ...], list[TrainingInstance]] = {}
    for inst in instances:
        groups.setdefault(inst.probe_sequence, []).append(inst)
    ordered = sorted(groups.items(), key=lambda kv: (-len(kv[1]), kv[0]))
    return [Cluster(key, tuple(members)) for key, members in ordered]


def compute_trigram_stats(c: Cluster) -> list[TrigramStat]:
    """Interior counts per slot, interiors listed in order of first appearance."""
    stats = []
    for slot in range(c.slot_count):
        counts = Counter(inst.slot_gaps[slot].interior for inst in c.instances)
        left, right = c.slot_symbols(slot)
        stats.extend(TrigramStat(slot, left, interior, right, n) for interior, n in counts.items())
    return stats


def filter_by_rho(stats: Iterable[TrigramStat], rho: float) -> list[TrigramStat]:
    """Drop interiors whose share of their slot is below ``rho``."""
    if not 0.0 <= rho <= 1.0:
        raise ValueError(f"rho must lie in [0, 1], got {rho}")
    stats = list(stats)
    totals = Counter()
    for s in stats:
        totals[s.slot_index] += s.count
    return [s for s in stats if s.count / totals[s.slot_index] >= rho]


def learn_noise_bounds(c: Cluster, cfg: LearnerConfig) -> list[Noise]:
    """Per slot: (min_noise, longest observed gap + slack)."""
    out = []
    for slot in range(c.slot_count):
        longest = max(inst.slot_gaps[slot].length for inst in c.instances)
        out.append(Noise(cfg.min_noise, max(cfg.min_noise, longest + cfg.noise_slack_chars)))
    return out


def _tail_bounds(c: Cluster, cfg: LearnerConfig) -> list[Noise]:
    out = []
    for slot in range(c.slot_count):
        tails = [inst.slot_gaps[slot].tail for inst in c.instances if inst.slot_gaps[slot].interior is not NULL]
        out.append(Noise(0, max(tails, default=0) + cfg.noise_slack_chars))
    return out


def _rhs(c: Cluster, choices, noise: list[Noise], tails: list[Noise]) -> tuple:
    last = len(c.key)
    rhs = []
    for slot, word in enumerate(choices):
        if slot > 0:
            rhs.append(Probe(c.key[slot - 1]))
        if word is NULL:
            if 0 < slot < last:
                rhs.append(noise[slot])
            continue
        if slot > 0:
            rhs.append(noise[slot])
        rhs.append(Literal(word))
        if slot < last:
            rhs.append(tails[slot])
    return tuple(rhs)


def generate_rules(c: Cluster, cfg: LearnerConfig, cluster_index: int = 0, stats=None) -> list[Rule]:
    """Generic rule first, then one rule per combination of surviving slot interiors.

    When some slot keeps no interior at all, no combination can be built from
    surviving trigrams and the generic rule takes the whole mass.
    """
    if not c.instances:
        raise LearnerError("cannot generate rules for an empty cluster")
    if stats is None:
        stats = filter_by_rho(compute_trigram_stats(c), cfg.rho)
    noise = learn_noise_bounds(c, cfg)
    tails = _tail_bounds(c, cfg)

    surviving: list[list[TrigramStat]] = [[] for _ in range(c.slot_count)]
    for s in stats:
        surviving[s.slot_index].append(s)

    generic_choices = (NULL,) * c.slot_count
    combos = []
    if all(surviving):
        totals = [sum(s.count for s in slot) for slot in surviving]
        for picks in itertools.product(*surviving):
            p = 1.0
            for pick, total in zip(picks, totals):
                p *= pick.count / total
            combos.append((tuple(s.interior for s in picks), p))

    generic_p = 1.0 if not combos else cfg.generic_mass
    rules_out = []
    for choices, p in combos:
        if choices == generic_choices:
            generic_p += (1.0 - cfg.generic_mass) * p
        else:
            rules_out.append((choices, (1.0 - cfg.generic_mass) * p))

    lhs = cfg.start_symbol
    rules = [Rule(f"L{cluster_index}#1", lhs, _rhs(c, generic_choices, noise, tails), min(generic_p, 1.0))]
    for n, (choices, p) in enumerate(rules_out, start=2):
        rules.append(Rule(f"L{cluster_index}#{n}", lhs, _rhs(c, choices, noise, tails), p))
    return rules


@dataclass(frozen=True)
class LearnedGrammar:
    grammar: Grammar
    clusters: tuple[Cluster, ...]
    stats: tuple[tuple[TrigramStat, ...], ...]  # unfiltered, per cluster

    def stats_json(self, cfg: LearnerConfig) -> list[dict]:
        out = []
        for c, stats in zip(self.clusters, self.stats):
            tails = _tail_bounds(c, cfg)
            slots = []
            for slot in range(c.slot_count):
                interiors = {("" if s.interior is NULL else s.interior): s.count for s in stats if s.slot_index == slot}
                slots.append({
                    "interiors": interiors,
                    "max_gap": max(inst.slot_gaps[slot].length for inst in c.instances),
                    "max_tail": tails[slot].max_chars - cfg.noise_slack_chars,
                })
            out.append({"key": list(c.key), "instances": len(c.instances), "slots": slots})
        return out


def learn(corpus: Iterable[AnnotatedDocument], cfg: LearnerConfig = LearnerConfig()) -> LearnedGrammar:
    instances = collect_instances(corpus)
    if not instances:
        raise LearnerError("empty training signal: no gold span with probes in the corpus")
    clusters = cluster_by_tag_sequence(instances)
    rules, all_stats = [], []
    for i, c in enumerate(clusters):
        stats = compute_trigram_stats(c)
        all_stats.append(tuple(stats))
        rules.extend(generate_rules(c, cfg, i, filter_by_rho(stats, cfg.rho)))
    return LearnedGrammar(Grammar(tuple(rules), (cfg.start_symbol,)), tuple(clusters), tuple(all_stats))


def learn_grammar(corpus: Iterable[AnnotatedDocument], cfg: LearnerConfig = LearnerConfig()) -> Grammar:
    return learn(corpus, cfg).grammar


def write_stats(learned: LearnedGrammar, cfg: LearnerConfig, fh) -> None:
    json.dump(learned.stats_json(cfg), fh, indent=2)
    fh.write("\n")
