"""Precision/recall of extractions against gold spans, and the RHO sweep."""

from __future__ import annotations

import json
import random
from dataclasses import asdict, dataclass, replace
from typing import Iterable, Optional, Sequence

from .chart import Extraction, extract
from .learner import LearnerConfig, learn_grammar
from .textmodel import AnnotatedDocument, GoldSpan

MODES = ("exact", "overlap")


@dataclass(frozen=True)
class EvalReport:
    rho: Optional[float]
    correct: int
    extracted: int
    gold_total: int

    @property
    def precision(self) -> float:
        return self.correct / self.extracted if self.extracted else 1.0

    @property
    def recall(self) -> float:
        return self.correct / self.gold_total if self.gold_total else 1.0

    def to_dict(self) -> dict:
        return {**asdict(self), "precision": self.precision, "recall": self.recall}


def split_corpus(docs: Sequence[AnnotatedDocument], train_fraction: float = 0.8, seed: int = 0):
    """Seeded shuffle, then cut at round(n * train_fraction); both parts non-empty."""
    if not 0.0 < train_fraction < 1.0:
        raise ValueError(f"train_fraction must lie in (0, 1), got {train_fraction}")
    if len(docs) < 2:
        raise ValueError(f"need at least 2 documents to split, got {len(docs)}")
    shuffled = list(docs)
    random.Random(seed).shuffle(shuffled)
    cut = min(max(round(len(shuffled) * train_fraction), 1), len(shuffled) - 1)
    return shuffled[:cut], shuffled[cut:]


def _jaccard(a: tuple[int, int], b: tuple[int, int]) -> float:
    inter = max(0, min(a[1], b[1]) - max(a[0], b[0]))
    union = max(a[1], b[1]) - min(a[0], b[0])
    return inter / union if union else 0.0


def score_extractions(predicted: Iterable[Extraction], gold: Iterable[GoldSpan], mode: str = "exact", rho=None) -> EvalReport:
    """Credit each extraction against at most one unmatched gold span of the same document."""
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    predicted = list(predicted)
    unmatched: dict[str, list[GoldSpan]] = {}
    gold_total = 0
    for g in gold:
        unmatched.setdefault(g.doc_id, []).append(g)
        gold_total += 1

    correct = 0
    for ex in predicted:
        pool = unmatched.get(ex.doc_id, [])
        hit = None
        if mode == "exact":
            hit = next((g for g in pool if g.char_range == ex.char_range), None)
        else:
            scored = [(_jaccard(g.char_range, ex.char_range), i) for i, g in enumerate(pool)]
            scored = [(j, i) for j, i in scored if j >= 0.5]
            if scored:
                hit = pool[max(scored, key=lambda t: (t[0], -t[1]))[1]]
        if hit is not None:
            pool.remove(hit)
            correct += 1
    return EvalReport(rho, correct, len(predicted), gold_total)


def evaluate_grammar(grammar, docs: Iterable[AnnotatedDocument], mode: str = "exact", rho=None) -> EvalReport:
    docs = list(docs)
    predicted = [ex for d in docs for ex in extract(d, grammar)]
    return score_extractions(predicted, [g for d in docs for g in d.gold], mode, rho)


def rho_sweep(
    corpus: Sequence[AnnotatedDocument],
    rhos: Iterable[float],
    cfg: LearnerConfig = LearnerConfig(),
    seed: int = 0,
    train_fraction: float = 0.8,
    mode: str = "exact",
    train_equals_test: bool = False,
) -> list[EvalReport]:
    """Learn on the training split at each rho and score on the test split; highest rho first."""
    rhos = sorted(rhos, reverse=True)
    if not rhos:
        return []
    if train_equals_test:
        train = test = list(corpus)
    else:
        train, test = split_corpus(corpus, train_fraction, seed)
    reports = []
    for rho in rhos:
        grammar = learn_grammar(train, replace(cfg, rho=rho))
        reports.append(evaluate_grammar(grammar, test, mode, rho))
    return reports


def format_table(reports: Iterable[EvalReport]) -> str:
    lines = ["RHO\tPrecision\tRecall"]
    for r in reports:
        rho = "-" if r.rho is None else f"{r.rho:.2f}"
        lines.append(f"{rho}\t{r.precision:.4f}\t{r.recall:.4f}")
    return "\n".join(lines) + "\n"


def format_jsonl(reports: Iterable[EvalReport]) -> str:
    return "".join(json.dumps(r.to_dict()) + "\n" for r in reports)
