"""Write a synthetic intent-style corpus (JSONL with id, text, label)."""

import argparse
from pathlib import Path

from memcluster.pipeline.corpus import write_corpus
from memcluster.synthetic import make_corpus


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("out", type=Path)
    parser.add_argument("--docs", type=int, default=200)
    parser.add_argument("--classes", type=int, default=10)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()
    write_corpus(make_corpus(args.docs, args.classes, seed=args.seed), args.out)
    print(f"wrote {args.docs} documents in {args.classes} classes to {args.out}")


if __name__ == "__main__":
    main()
