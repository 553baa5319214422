from memcluster.pipeline.corpus import ingest_corpus, processing_order, write_corpus
from memcluster.pipeline.events import RunEvent, RunLocked, read_log
from memcluster.pipeline.experiments import DEFAULT_OFFSETS, ExperimentReport, ablate, sweep_offsets
from memcluster.pipeline.runner import (
    RunArtifacts,
    evaluate_run,
    replay,
    resume_run,
    run_clustering,
    save_artifacts,
)

__all__ = [
    "DEFAULT_OFFSETS",
    "ExperimentReport",
    "RunArtifacts",
    "RunEvent",
    "RunLocked",
    "ablate",
    "evaluate_run",
    "ingest_corpus",
    "processing_order",
    "read_log",
    "replay",
    "resume_run",
    "run_clustering",
    "save_artifacts",
    "sweep_offsets",
    "write_corpus",
]
