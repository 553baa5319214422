"""Single-pass LLM text clustering with a dynamic label memory and dual-prompt granularity control."""

from memcluster.granularity import ModeDecision, range_description, select_mode
from memcluster.memory import StepOutcome, apply_assignment, apply_merge, core_step, derive_partition
from memcluster.model import (
    AssignmentLog,
    Document,
    Label,
    LLMSettings,
    MemoryState,
    MergeSuggestion,
    Mode,
    ParsedResponse,
    Partition,
    ResponseKind,
    RunConfig,
    normalize_label,
)

__version__ = "0.1.0"

__all__ = [
    "AssignmentLog",
    "Document",
    "LLMSettings",
    "Label",
    "MemoryState",
    "MergeSuggestion",
    "Mode",
    "ModeDecision",
    "ParsedResponse",
    "Partition",
    "ResponseKind",
    "RunConfig",
    "StepOutcome",
    "apply_assignment",
    "apply_merge",
    "core_step",
    "derive_partition",
    "normalize_label",
    "range_description",
    "select_mode",
]
