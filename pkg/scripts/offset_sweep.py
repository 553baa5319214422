"""Transition-offset sweep on a synthetic corpus with the scripted oracle.

The oracle splits labels in Relaxed mode, so later transitions leave more
labels behind. Pass ``--input`` to sweep a real JSONL corpus instead.
"""

import argparse
from pathlib import Path

from memcluster.gateway import OracleClient, OracleScript
from memcluster.model import RunConfig
from memcluster.pipeline import DEFAULT_OFFSETS, ingest_corpus, sweep_offsets
from memcluster.synthetic import make_corpus


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--input", type=Path)
    parser.add_argument("--k-min", type=int, default=15)
    parser.add_argument("--k-max", type=int, default=20)
    parser.add_argument("--offsets", type=int, nargs="+", default=list(DEFAULT_OFFSETS))
    parser.add_argument("--noise", type=float, default=0.2)
    parser.add_argument("--split", type=float, default=0.15)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out-dir", type=Path)
    args = parser.parse_args()

    corpus = ingest_corpus(args.input) if args.input else make_corpus(600, 20, seed=args.seed)
    labeler = {d.id: d.gold_label for d in corpus}
    script = OracleScript(labeler, naming_noise=args.noise, split_bias=args.split, rng_seed=args.seed)
    config = RunConfig(k_min=args.k_min, k_max=args.k_max)
    report = sweep_offsets(corpus, config, args.offsets, OracleClient(script), out_dir=args.out_dir)
    print(report.table())


if __name__ == "__main__":
    main()
