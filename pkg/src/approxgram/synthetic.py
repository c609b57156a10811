"""Templated cricket-report corpus with probe markup and gold IMP spans.

Gold spans run from the first probe of a reporting sentence to its last
probe. Optional corruption mimics an imperfect upstream tagger: jittered
confidences, dropped probe tags, mislabelled probes and probe-bearing
sentences that are not informational.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

PLAYERS = [
    "Sachin Tendulkar", "Rahul Dravid", "VVS Laxman", "Kapil Dev", "Anil Kumble", "Sourav Ganguly",
    "Nasser Hussain", "Shane Warne", "Brian Lara", "Wasim Akram", "Javagal Srinath", "Virender Sehwag",
    "Glenn McGrath", "Inzamam", "Harbhajan Singh", "Zaheer Khan",
]
TEAMS = ["India", "Pakistan", "England", "Australia", "Sri Lanka", "West Indies", "New Zealand", "Kerala", "Hyderabad"]
PLACES = ["Lords", "Eden Gardens", "Old Trafford", "the Oval", "Chepauk", "Sharjah", "Calcutta", "Headingley"]
TOURNAMENTS = ["the Natwest Trophy", "the World Cup", "the Ranji Trophy", "the Coca-Cola Cup", "the Test series"]

FILLERS = [
    "The crowd cheered loudly throughout the afternoon session.",
    "Rain delayed the start of play by an hour.",
    "Spectators queued outside the gates from early morning.",
    "The pitch was expected to assist the spinners later on.",
    "Ticket sales were brisk for the weekend fixture.",
]


def _runs(rng):
    return rng.choice([f"{rng.randint(10, 180)} runs", str(rng.randint(10, 180)), "a duck", "a century"])


def _wickets(rng):
    return rng.choice([f"{rng.randint(2, 7)} wickets", f"{rng.randint(2, 7)} for {rng.randint(15, 70)}"])


def _balls(rng):
    return rng.choice([f"{rng.randint(20, 160)} balls", f"{rng.randint(20, 160)} deliveries"])


FILLS = {
    "player_name": lambda rng: rng.choice(PLAYERS),
    "team": lambda rng: rng.choice(TEAMS),
    "place": lambda rng: rng.choice(PLACES),
    "tournament": lambda rng: rng.choice(TOURNAMENTS),
    "runs": _runs,
    "wickets": _wickets,
    "balls": _balls,
}

# Informational templates: probes as (category,), everything else as word choices.
# Every template has at least two probes and at least one word between adjacent probes.
TEMPLATES = [
    [("player_name",), ["made", "hit", "scored", "smashed", "made"], ("runs",), ["off", "from", "in", "off"], ("balls",)],
    [("player_name",), ["took", "claimed", "grabbed", "took"], ("wickets",), ["against", "versus", "against"], ("team",)],
    [("team",), ["beat", "defeated", "thrashed", "beat"], ("team",), ["by"], ("runs",)],
    [("team",), ["won", "clinched", "won"], ("tournament",), ["at"], ("place",)],
    [("player_name",), ["and"], ("player_name",), ["added", "put on", "added"], ("runs",)],
    [("team",), ["were bowled out for", "posted", "made", "were all out for"], ("runs",)],
    [("player_name",), ["made", "scored", "made"], ("runs",), ["at", "in"], ("place",)],
]
ADVERBS = ["", "", "", "brilliantly", "comfortably", "quickly", "today"]
TRAILERS = ["", ".", " in the final session.", " before lunch.", " on the second day.", "."]

DISTRACTORS = [
    [("player_name",), ["was seen at"], ("place",), ["yesterday."]],
    [("player_name",), ["said"], ("team",), ["would need to improve."]],
    [["Fans of"], ("team",), ["gathered near"], ("place",), ["before the toss."]],
    [["The weather at"], ("place",), ["was pleasant."]],
]


@dataclass(frozen=True)
class CorpusOptions:
    jitter_confidence: bool = True
    drop_rate: float = 0.1  # chance a gold sentence with 3+ probes misses one tag
    mislabel_rate: float = 0.05  # chance a probe gets a wrong category
    distractor_rate: float = 0.6  # chance per document of a probe-bearing non-gold sentence
    max_gold: int = 2


CLEAN = CorpusOptions(jitter_confidence=False, drop_rate=0.0, mislabel_rate=0.0, distractor_rate=0.0, max_gold=1)


def _probe(rng, category, opts: CorpusOptions, drop: bool = False) -> str:
    text = FILLS[category](rng)
    if drop:
        return text
    if rng.random() < opts.mislabel_rate:
        category = rng.choice([c for c in FILLS if c != category])
    conf = ""
    if opts.jitter_confidence:
        conf = f' conf="{rng.uniform(0.85, 1.0):.2f}"'
    return f"<{category}{conf}>{text}</{category}>"


def _render(rng, template, opts: CorpusOptions, drop_index: int = -1) -> list[str]:
    parts = []
    n_probe = 0
    for piece in template:
        if isinstance(piece, tuple):
            parts.append(_probe(rng, piece[0], opts, drop=n_probe == drop_index))
            n_probe += 1
        else:
            word = rng.choice(piece)
            adverb = rng.choice(ADVERBS)
            parts.append(f"{adverb} {word}".strip())
    return parts


def _sentence(rng, opts: CorpusOptions) -> str:
    template = rng.choice(TEMPLATES)
    n_probes = sum(isinstance(p, tuple) for p in template)
    # a gold span keeps at least two probes even when a tag goes missing
    drop_index = -1
    if n_probes >= 3 and rng.random() < opts.drop_rate:
        drop_index = rng.randrange(n_probes)
    parts = _render(rng, template, opts, drop_index)
    tagged = [i for i, p in enumerate(parts) if p.startswith("<")]
    first, last = tagged[0], tagged[-1]
    lead = " ".join(parts[:first])
    core = " ".join(parts[first:last + 1])
    tail = " ".join(parts[last + 1:])
    sentence = " ".join(x for x in (lead, f"<IMP>{core}</IMP>", tail) if x)
    return sentence + rng.choice(TRAILERS)


def generate_document(rng: random.Random, opts: CorpusOptions = CorpusOptions()) -> str:
    sentences = [_sentence(rng, opts) for _ in range(rng.randint(1, opts.max_gold))]
    if rng.random() < opts.distractor_rate:
        sentences.insert(rng.randint(0, len(sentences)), " ".join(_render(rng, rng.choice(DISTRACTORS), opts)))
    sentences.insert(rng.randint(0, len(sentences)), rng.choice(FILLERS))
    return " ".join(sentences)


def generate_corpus(n_docs: int = 250, seed: int = 0, opts: CorpusOptions = CorpusOptions()) -> list[tuple[str, str]]:
    """``(doc_id, markup)`` pairs; identical for identical arguments."""
    rng = random.Random(seed)
    return [(f"syn{i:04d}", generate_document(rng, opts)) for i in range(n_docs)]
