"""Command line: ``memcluster cluster | evaluate | sweep | ablate``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Sequence

from memcluster.errors import MemClusterError, TransportError, AuthError
from memcluster.gateway import ChatCompletionsClient, OracleClient, OracleScript
from memcluster.metrics import LabelVectorPair, MetricsReport, format_table
from memcluster.model import DEFAULT_EXEMPLARS, Document, LLMSettings, Mode, RunConfig
from memcluster.pipeline import (
    DEFAULT_OFFSETS,
    ablate,
    ingest_corpus,
    resume_run,
    run_clustering,
    save_artifacts,
    sweep_offsets,
)
from memcluster.pipeline.runner import save_metrics

log = logging.getLogger("memcluster")


def _int_list(value: str) -> list[int]:
    return [int(v) for v in value.split(",") if v.strip()]


def _add_run_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--input", required=True, type=Path, help="JSONL corpus: {id?, text, label?} per line")
    p.add_argument("--k-min", type=int, required=True)
    p.add_argument("--k-max", type=int, required=True)
    p.add_argument("--no-memory", action="store_true", help="hide known labels from every prompt")
    p.add_argument("--no-fewshot", action="store_true", help="omit the Examples section")
    p.add_argument("--mode", choices=["dual", "strict", "relaxed"], default="dual")
    p.add_argument("--exemplars", type=Path, help="JSON list of [text, reply-line] pairs")
    p.add_argument("--oracle-script", type=Path, help="use the scripted oracle instead of a provider")
    p.add_argument("--model", default=LLMSettings.model)
    p.add_argument("--base-url", default=LLMSettings.base_url)
    p.add_argument("--temperature", type=float, default=LLMSettings.temperature)
    p.add_argument("--timeout", type=float, default=LLMSettings.timeout)
    p.add_argument("--api-key-env", default=LLMSettings.api_key_env)
    p.add_argument("--max-parse-retries", type=int, default=2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--shuffle", action="store_true", help="seeded shuffle of document order")
    p.add_argument("--out-dir", type=Path, required=True)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="memcluster", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("cluster", help="cluster a corpus in one pass")
    _add_run_options(p)
    p.add_argument("--offset", type=int, default=0, help="shift of the Relaxed->Strict threshold")
    p.add_argument("--resume", action="store_true", help="continue from OUT_DIR/events.jsonl")
    p.add_argument("--no-fsync", action="store_true")

    p = sub.add_parser("evaluate", help="score a run's partition against gold labels")
    p.add_argument("--input", required=True, type=Path)
    p.add_argument("--run-dir", required=True, type=Path)

    p = sub.add_parser("sweep", help="one run per transition offset")
    _add_run_options(p)
    p.add_argument(
        "--offsets",
        type=_int_list,
        nargs="+",
        default=[list(DEFAULT_OFFSETS)],
        help="e.g. --offsets -10 0 10 50 or --offsets=-10,0,10",
    )

    p = sub.add_parser("ablate", help="default model plus the memory/few-shot/prompt ablations")
    _add_run_options(p)
    p.add_argument("--offset", type=int, default=0)
    return parser


def _config(args: argparse.Namespace, offset: int) -> RunConfig:
    exemplars = DEFAULT_EXEMPLARS
    if args.exemplars:
        exemplars = tuple(tuple(pair) for pair in json.loads(args.exemplars.read_text(encoding="utf-8")))
    return RunConfig(
        k_min=args.k_min,
        k_max=args.k_max,
        offset=offset,
        use_memory=not args.no_memory,
        use_fewshot=not args.no_fewshot,
        forced_mode=None if args.mode == "dual" else Mode(args.mode),
        exemplars=exemplars,
        max_parse_retries=args.max_parse_retries,
        llm=LLMSettings(
            base_url=args.base_url,
            model=args.model,
            temperature=args.temperature,
            timeout=args.timeout,
            api_key_env=args.api_key_env,
        ),
        seed=args.seed,
        shuffle=args.shuffle,
    )


def _client(args: argparse.Namespace, corpus: Sequence[Document], settings: LLMSettings):
    if args.oracle_script:
        script = OracleScript.load(args.oracle_script)
        if not script.labeler:
            # the oracle may read gold labels; prompts never do
            labeler = {d.id: d.gold_label for d in corpus if d.gold_label is not None}
            script = OracleScript.from_json({**script.to_json(), "labeler": labeler})
        return OracleClient(script)
    return ChatCompletionsClient(settings)


def cmd_cluster(args: argparse.Namespace) -> int:
    corpus = ingest_corpus(args.input)
    if not corpus:
        print(f"error: {args.input} contains no documents", file=sys.stderr)
        return 2
    config = _config(args, args.offset)
    client = _client(args, corpus, config.llm)
    events = args.out_dir / "events.jsonl"
    fsync = not args.no_fsync
    try:
        if args.resume:
            artifacts = resume_run(events, corpus, config, client, fsync=fsync)
        else:
            if events.exists():
                print(f"error: {events} exists; pass --resume or choose another --out-dir", file=sys.stderr)
                return 2
            artifacts = run_clustering(corpus, config, client, events_path=events, fsync=fsync)
    except (TransportError, AuthError) as exc:
        print(f"run aborted: {exc}\nprogress is saved in {events}; rerun with --resume", file=sys.stderr)
        return 3
    save_artifacts(artifacts, args.out_dir)
    print(f"{len(artifacts.events)} documents -> {artifacts.partition.k} clusters ({args.out_dir})")
    if artifacts.metrics is not None:
        print(format_table([("memcluster", artifacts.metrics)], k_column=True))
    return 0


def cmd_evaluate(args: argparse.Namespace) -> int:
    corpus = ingest_corpus(args.input)
    gold = {d.id: d.gold_label for d in corpus}
    partition = json.loads((args.run_dir / "partition.json").read_text(encoding="utf-8"))
    predicted = {doc_id: label for label, ids in partition.items() for doc_id in ids}
    missing = [d for d in predicted if gold.get(d) is None]
    if missing:
        print(f"error: {len(missing)} documents lack gold labels (e.g. {missing[0]})", file=sys.stderr)
        return 2
    ids = list(predicted)
    report = MetricsReport.compute(LabelVectorPair.encode([predicted[d] for d in ids], [gold[d] for d in ids]))
    save_metrics(report, args.run_dir)
    print(format_table([("memcluster", report)], k_column=True))
    return 0


def _experiment(args: argparse.Namespace, runner) -> int:
    corpus = ingest_corpus(args.input)
    base = _config(args, getattr(args, "offset", 0))
    client = _client(args, corpus, base.llm)
    report = runner(corpus, base, client)
    args.out_dir.mkdir(parents=True, exist_ok=True)
    table = report.table()
    (args.out_dir / "table.txt").write_text(table + "\n", encoding="utf-8")
    (args.out_dir / "report.json").write_text(json.dumps(report.to_json(), indent=2) + "\n", encoding="utf-8")
    print(table)
    return 0 if all(r.ok for r in report.rows) else 1


def cmd_sweep(args: argparse.Namespace) -> int:
    offsets = [o for chunk in args.offsets for o in chunk]
    return _experiment(args, lambda c, b, cl: sweep_offsets(c, b, offsets, cl, out_dir=args.out_dir))


def cmd_ablate(args: argparse.Namespace) -> int:
    return _experiment(args, lambda c, b, cl: ablate(c, b, cl, out_dir=args.out_dir))


COMMANDS = {"cluster": cmd_cluster, "evaluate": cmd_evaluate, "sweep": cmd_sweep, "ablate": cmd_ablate}


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    try:
        return COMMANDS[args.command](args)
    except MemClusterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
