"""Ablation table on a synthetic corpus with the scripted oracle.

Prints ACC/NMI/ARI and final label count for the default configuration and
each memory / few-shot / single-prompt variant, for several oracle seeds.
"""

import argparse

from memcluster.gateway import OracleClient, OracleScript
from memcluster.model import RunConfig
from memcluster.pipeline import ablate
from memcluster.synthetic import make_corpus


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--docs", type=int, default=200)
    parser.add_argument("--classes", type=int, default=10)
    parser.add_argument("--k-min", type=int, default=5)
    parser.add_argument("--k-max", type=int, default=10)
    parser.add_argument("--noise", type=float, default=0.3)
    parser.add_argument("--split", type=float, default=0.2)
    parser.add_argument("--seeds", type=int, nargs="+", default=[0, 1, 2])
    args = parser.parse_args()

    corpus = make_corpus(args.docs, args.classes, seed=1)
    labeler = {d.id: d.gold_label for d in corpus}
    config = RunConfig(k_min=args.k_min, k_max=args.k_max)
    for seed in args.seeds:
        script = OracleScript(labeler, naming_noise=args.noise, split_bias=args.split, rng_seed=seed)
        print(f"\noracle seed {seed}")
        print(ablate(corpus, config, OracleClient(script)).table())


if __name__ == "__main__":
    main()
