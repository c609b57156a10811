"""Command-line entry point: learn, extract, eval, sweep, explain.

Exit codes: 0 success, 1 runtime failure, 2 usage or validation error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import warnings
from contextlib import contextmanager
from pathlib import Path

from .chart import ChartOverflowError, StaleExtractionError, explain, extract
from .corpus import dump_extractions, read_corpus
from .evaluation import MODES, evaluate_grammar, format_jsonl, format_table, rho_sweep
from .grammar import GrammarError, Noise, load_root_lexicon, parse_grammar, serialize_grammar, validate_grammar
from .learner import LearnerConfig, LearnerError, learn, write_stats
from .textmodel import AnnotationError

log = logging.getLogger("approxgram")


class UsageError(Exception):
    pass


def _rho_list(text: str) -> list[float]:
    try:
        values = [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}") from None
    if not values:
        raise argparse.ArgumentTypeError("empty rho list")
    return values


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--corpus", nargs="+", metavar="PATH", help="annotated corpus files (.jsonl or markup) or directories")
    common.add_argument("--grammar", metavar="PATH", help="grammar DSL file")
    common.add_argument("--lexicon", metavar="PATH", help="root lexicon sidecar (root: form, form)")
    common.add_argument("--out", metavar="PATH", help="output file (default: stdout)")
    common.add_argument("--rho", type=_rho_list, default=[0.0], help="rho threshold, or a comma list for sweep")
    common.add_argument("--generic-mass", type=float, default=0.5)
    common.add_argument("--default-noise-max", type=int, default=40)
    common.add_argument("--noise-slack", type=int, default=0)
    common.add_argument("--train-fraction", type=float, default=0.8)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--mode", choices=MODES, default="exact")
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="approxgram", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("learn", parents=[common], help="induce a grammar from gold-annotated documents")
    sub.add_parser("extract", parents=[common], help="extract informational strings as JSON lines")
    sub.add_parser("eval", parents=[common], help="score a grammar's extractions against gold spans")
    p = sub.add_parser("sweep", parents=[common], help="learn/extract/score across rho values")
    p.add_argument("--train-equals-test", action="store_true", help="train and test on the whole corpus")
    p = sub.add_parser("explain", parents=[common], help="print the derivation behind one extraction")
    p.add_argument("--doc", default="0", help="document id or index (default: first document)")
    p.add_argument("--index", type=int, default=0, help="extraction index within the document")
    return parser


_REQUIRED = {
    "learn": ("corpus", "out"),
    "extract": ("grammar", "corpus"),
    "eval": ("grammar", "corpus"),
    "sweep": ("corpus",),
    "explain": ("grammar", "corpus"),
}


def _check_args(args):
    missing = [f"--{name}" for name in _REQUIRED[args.command] if not getattr(args, name)]
    if missing:
        raise UsageError(f"{args.command} requires {', '.join(missing)}")
    for rho in args.rho:
        if not 0.0 <= rho <= 1.0:
            raise UsageError(f"--rho values must lie in [0, 1], got {rho}")
    if args.command != "sweep" and len(args.rho) > 1:
        raise UsageError("a rho list is only meaningful for sweep")
    if not 0.0 <= args.generic_mass <= 1.0:
        raise UsageError("--generic-mass must lie in [0, 1]")
    if args.default_noise_max < 0 or args.noise_slack < 0:
        raise UsageError("noise settings must be non-negative")
    for path in args.corpus or ():
        if not Path(path).exists():
            raise UsageError(f"corpus path not found: {path}")


@contextmanager
def _output(path):
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            yield fh
    else:
        yield sys.stdout


def _learner_config(args) -> LearnerConfig:
    return LearnerConfig(rho=args.rho[0], generic_mass=args.generic_mass, noise_slack_chars=args.noise_slack)


def _load_grammar(args):
    path = Path(args.grammar)
    if not path.exists():
        raise UsageError(f"grammar file not found: {path}")
    lexicon = load_root_lexicon(Path(args.lexicon).read_text(encoding="utf-8")) if args.lexicon else None
    g = parse_grammar(path.read_text(encoding="utf-8"), lexicon, Noise(0, args.default_noise_max))
    for d in validate_grammar(g):
        if d.level == "error":
            raise UsageError(f"{path}: {d}")
        log.info("%s: %s", path, d)
    return g


def cmd_learn(args) -> int:
    docs = read_corpus(args.corpus)
    cfg = _learner_config(args)
    learned = learn(docs, cfg)
    Path(args.out).write_text(serialize_grammar(learned.grammar), encoding="utf-8")
    with open(f"{args.out}.stats.json", "w", encoding="utf-8") as fh:
        write_stats(learned, cfg, fh)
    log.info("wrote %d rules from %d clusters to %s", len(learned.grammar.rules), len(learned.clusters), args.out)
    return 0


def cmd_extract(args) -> int:
    g = _load_grammar(args)
    docs = read_corpus(args.corpus)
    with _output(args.out) as fh:
        n = dump_extractions(((d, ex) for d in docs for ex in extract(d, g)), fh)
    log.info("%d extractions from %d documents", n, len(docs))
    return 0


def _write_reports(args, reports):
    with _output(args.out) as fh:
        fh.write(format_jsonl(reports) if args.json else format_table(reports))


def cmd_eval(args) -> int:
    g = _load_grammar(args)
    docs = read_corpus(args.corpus)
    _write_reports(args, [evaluate_grammar(g, docs, args.mode)])
    return 0


def cmd_sweep(args) -> int:
    docs = read_corpus(args.corpus)
    reports = rho_sweep(
        docs,
        args.rho,
        _learner_config(args),
        seed=args.seed,
        train_fraction=args.train_fraction,
        mode=args.mode,
        train_equals_test=args.train_equals_test,
    )
    _write_reports(args, reports)
    return 0


def cmd_explain(args) -> int:
    g = _load_grammar(args)
    docs = read_corpus(args.corpus)
    by_id = {d.doc_id: d for d in docs}
    if args.doc in by_id:
        doc = by_id[args.doc]
    else:
        try:
            doc = docs[int(args.doc)]
        except (ValueError, IndexError):
            raise UsageError(f"no document {args.doc!r}") from None
    extractions = extract(doc, g)
    if not 0 <= args.index < len(extractions):
        raise UsageError(f"document {doc.doc_id!r} has {len(extractions)} extractions; index {args.index} is out of range")
    with _output(args.out) as fh:
        fh.write(explain(doc, g, extractions[args.index], as_json=args.json) + "\n")
    return 0


COMMANDS = {"learn": cmd_learn, "extract": cmd_extract, "eval": cmd_eval, "sweep": cmd_sweep, "explain": cmd_explain}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    if not args.verbose:
        warnings.simplefilter("ignore")
    try:
        _check_args(args)
        return COMMANDS[args.command](args)
    except (UsageError, GrammarError, AnnotationError, StaleExtractionError, json.JSONDecodeError) as exc:
        print(f"approxgram {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except (LearnerError, ChartOverflowError, OSError) as exc:
        print(f"approxgram {args.command}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
