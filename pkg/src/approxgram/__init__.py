"""Approximate grammars for information extraction.

Probabilistic grammars over probe annotations, literals and morphological
roots, with bounded noise between constituents; a chart parser that scores
and selects informational strings; and a learner that induces such grammars
from gold-annotated text.
"""

from .chart import (
    Extraction,
    ParseNode,
    build_chart,
    enumerate_parses,
    explain,
    extract,
    match_terminal,
    score_node,
)
from .grammar import Grammar, Literal, Noise, NonTerminal, Probe, Root, Rule, parse_grammar, serialize_grammar, validate_grammar
from .learner import LearnerConfig, learn, learn_grammar
from .textmodel import AnnotatedDocument, gap_chars, parse_annotated_document, tokenize

__version__ = "0.1.0"
