"""Relaxed/Strict mode selection and the range phrase shown to the model."""

from __future__ import annotations

from dataclasses import dataclass

from memcluster.model import Mode, RunConfig


@dataclass(frozen=True)
class ModeDecision:
    mode: Mode
    memory_size: int
    threshold: int
    step: int = 0
    forced: bool = False


def select_mode(memory_size: int, config: RunConfig, step: int = 0) -> ModeDecision:
    """Strict once the live label count reaches ``k_max + offset``; Relaxed below it.

    Memoryless in the step index: a merge that shrinks memory under the
    threshold brings Relaxed mode back. ``forced_mode`` pins the answer.
    """
    if memory_size < 0:
        raise ValueError("memory_size must be >= 0")
    threshold = config.threshold
    if config.forced_mode is not None:
        return ModeDecision(config.forced_mode, memory_size, threshold, step, forced=True)
    mode = Mode.STRICT if memory_size >= threshold else Mode.RELAXED
    return ModeDecision(mode, memory_size, threshold, step)


def range_description(k_min: int, k_max: int) -> str:
    if k_min > k_max:
        raise ValueError(f"k_min ({k_min}) > k_max ({k_max})")
    return f"within the range of {k_min} to {k_max}"
