"""Write the bundled synthetic cricket corpus as JSON lines."""

import argparse
from pathlib import Path

from approxgram.corpus import write_corpus
from approxgram.synthetic import CLEAN, CorpusOptions, generate_corpus


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--docs", type=int, default=250)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--clean", action="store_true", help="no tagger noise, uniform confidence, one gold per document")
    ap.add_argument("--out", type=Path, default=Path(__file__).resolve().parent.parent / "data" / "synthetic_cricket.jsonl")
    args = ap.parse_args()
    opts = CLEAN if args.clean else CorpusOptions()
    args.out.parent.mkdir(parents=True, exist_ok=True)
    write_corpus(generate_corpus(args.docs, args.seed, opts), args.out)
    print(f"wrote {args.docs} documents to {args.out}")


if __name__ == "__main__":
    main()
