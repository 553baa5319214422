"""Clustering accuracy (best one-to-one mapping), NMI and ARI."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from typing import Hashable, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from memcluster.errors import LengthMismatch, TooFewSamples


@dataclass(frozen=True)
class LabelVectorPair:
    predicted: tuple[int, ...]
    truth: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.predicted) != len(self.truth):
            raise LengthMismatch(f"predicted has {len(self.predicted)} items, truth has {len(self.truth)}")
        if not self.predicted:
            raise TooFewSamples("need at least one sample")
        for name, codes in (("predicted", self.predicted), ("truth", self.truth)):
            if set(codes) != set(range(max(codes) + 1)):
                raise ValueError(f"{name} codes are not dense in [0, K)")

    @property
    def n(self) -> int:
        return len(self.predicted)

    @classmethod
    def encode(cls, predicted: Sequence[Hashable], truth: Sequence[Hashable]) -> LabelVectorPair:
        if len(predicted) != len(truth):
            raise LengthMismatch(f"predicted has {len(predicted)} items, truth has {len(truth)}")
        return cls(dense_encode(predicted), dense_encode(truth))


def dense_encode(values: Sequence[Hashable]) -> tuple[int, ...]:
    """Codes in order of first appearance."""
    codes: dict[Hashable, int] = {}
    return tuple(codes.setdefault(v, len(codes)) for v in values)


def contingency(pair: LabelVectorPair) -> np.ndarray:
    k_pred = max(pair.predicted) + 1
    k_true = max(pair.truth) + 1
    table = np.zeros((k_pred, k_true), dtype=np.int64)
    np.add.at(table, (np.asarray(pair.predicted), np.asarray(pair.truth)), 1)
    return table


def accuracy(pair: LabelVectorPair) -> float:
    table = contingency(pair)
    size = max(table.shape)
    square = np.zeros((size, size), dtype=np.int64)
    square[: table.shape[0], : table.shape[1]] = table
    rows, cols = linear_sum_assignment(square, maximize=True)
    return float(square[rows, cols].sum()) / pair.n


def _entropy(counts: np.ndarray, n: int) -> float:
    p = counts[counts > 0] / n
    return float(-(p * np.log(p)).sum())


def nmi(pair: LabelVectorPair) -> float:
    """Mutual information over the arithmetic mean of the two entropies (natural log)."""
    table = contingency(pair)
    n = pair.n
    h_pred = _entropy(table.sum(axis=1), n)
    h_true = _entropy(table.sum(axis=0), n)
    if h_pred == 0.0 or h_true == 0.0:
        # single-cluster on both sides is the identical trivial partition
        return 1.0 if h_pred == h_true else 0.0
    row = table.sum(axis=1, keepdims=True)
    col = table.sum(axis=0, keepdims=True)
    nz = table > 0
    joint = table[nz] / n
    outer = (row @ col)[nz] / (n * n)
    mi = float((joint * np.log(joint / outer)).sum())
    return min(1.0, max(0.0, mi / ((h_pred + h_true) / 2)))


def _comb2(x: np.ndarray | int) -> np.ndarray | int:
    return x * (x - 1) // 2


def ari(pair: LabelVectorPair) -> float:
    if pair.n < 2:
        raise TooFewSamples("ARI needs at least two samples")
    table = contingency(pair)
    index = int(_comb2(table).sum())
    sum_pred = int(_comb2(table.sum(axis=1)).sum())
    sum_true = int(_comb2(table.sum(axis=0)).sum())
    total = _comb2(pair.n)
    expected = sum_pred * sum_true / total
    max_index = (sum_pred + sum_true) / 2
    if max_index == expected:
        # only reachable when both sides are all-one-cluster or both all-singletons
        return 1.0 if sum_pred == sum_true else 0.0
    return (index - expected) / (max_index - expected)


@dataclass(frozen=True)
class MetricsReport:
    acc: float
    nmi: float
    ari: float
    k_pred: int
    k_true: int
    n: int = 0

    @classmethod
    def compute(cls, pair: LabelVectorPair) -> MetricsReport:
        return cls(
            acc=accuracy(pair),
            nmi=nmi(pair),
            ari=ari(pair) if pair.n >= 2 else 1.0,
            k_pred=max(pair.predicted) + 1,
            k_true=max(pair.truth) + 1,
            n=pair.n,
        )

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> MetricsReport:
        return cls(**d)


def format_table(rows: Sequence[tuple[str, MetricsReport | None]], key_header: str = "Method", k_column: bool = False) -> str:
    """Fixed-width table, scores as percentages with one decimal; a ``None`` report marks a failed row."""
    width = max([len(key_header)] + [len(name) for name, _ in rows]) + 2
    header = f"{key_header:<{width}}| {'ACC':>6} {'NMI':>6} {'ARI':>6}"
    if k_column:
        header += f" | {'K':>5}"
    lines = [header, "-" * len(header)]
    for name, rep in rows:
        if rep is None:
            line = f"{name:<{width}}| {'FAILED':>6} {'-':>6} {'-':>6}"
            if k_column:
                line += f" | {'-':>5}"
        else:
            line = f"{name:<{width}}| {rep.acc * 100:>6.1f} {rep.nmi * 100:>6.1f} {rep.ari * 100:>6.1f}"
            if k_column:
                line += f" | {rep.k_pred:>5d}"
        lines.append(line)
    return "\n".join(lines)
