"""RHO sweep over several seeded splits of a corpus, averaged per rho."""

import argparse
from pathlib import Path
from statistics import mean

from approxgram.corpus import read_corpus
from approxgram.evaluation import EvalReport, rho_sweep
from approxgram.learner import LearnerConfig

DEFAULT_CORPUS = Path(__file__).resolve().parent.parent / "data" / "synthetic_cricket.jsonl"


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--corpus", type=Path, default=DEFAULT_CORPUS)
    ap.add_argument("--rho", default="0.30,0.25,0.20,0.15,0.10,0.05,0.0")
    ap.add_argument("--seeds", type=int, default=5, help="number of train/test splits")
    ap.add_argument("--mode", choices=["exact", "overlap"], default="exact")
    args = ap.parse_args()

    docs = read_corpus([args.corpus])
    rhos = [float(x) for x in args.rho.split(",")]
    runs = [rho_sweep(docs, rhos, LearnerConfig(), seed=s, mode=args.mode) for s in range(args.seeds)]
    print(f"# {len(docs)} documents, {args.seeds} splits, mode={args.mode}")
    print("RHO\tPrecision\tRecall\tP_range\tR_range")
    for i, rho in enumerate(sorted(rhos, reverse=True)):
        reports: list[EvalReport] = [run[i] for run in runs]
        ps = [r.precision for r in reports]
        rs = [r.recall for r in reports]
        print(f"{rho:.2f}\t{mean(ps):.4f}\t{mean(rs):.4f}\t{min(ps):.3f}-{max(ps):.3f}\t{min(rs):.3f}-{max(rs):.3f}")


if __name__ == "__main__":
    main()
