"""Evaluation metrics: edit distance, accuracy, and sample quality."""

from __future__ import annotations

from dataclasses import dataclass

from . import halluc
from .errors import DataError


def levenshtein(a: str, b: str) -> int:
    """Minimum number of single-character insertions, deletions, and
    substitutions turning a into b. Operates on unicode scalars; unit
    costs; no transposition."""
    if a == b:
        return 0
    if not a:
        return len(b)
    if not b:
        return len(a)
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        cur = [i] + [0] * len(b)
        for j, cb in enumerate(b, start=1):
            cur[j] = min(
                prev[j] + 1,
                cur[j - 1] + 1,
                prev[j - 1] + (ca != cb),
            )
        prev = cur
    return prev[len(b)]


@dataclass(frozen=True)
class EvalReport:
    accuracy: float
    avg_levenshtein: float
    count: int


def evaluate(predictions: list[str], references: list[str]) -> EvalReport:
    """Exact-match accuracy and mean edit distance over aligned lists."""
    if len(predictions) != len(references):
        raise DataError(
            f"prediction/reference length mismatch: {len(predictions)} vs {len(references)}"
        )
    if not references:
        raise DataError("cannot evaluate an empty set")
    hits = 0
    total_dist = 0
    for p, r in zip(predictions, references):
        d = levenshtein(p, r)
        total_dist += d
        hits += d == 0
    n = len(references)
    return EvalReport(accuracy=hits / n, avg_levenshtein=total_dist / n, count=n)


@dataclass(frozen=True)
class QualityReport:
    cross_entropy: float
    uniqueness: float
    length_histogram: dict[int, int]


def sample_quality(samples: list[str], reference_stems: list[str],
                   smoothing: float = 0.1) -> QualityReport:
    """How much the samples look like the reference stems.

    Cross-entropy is bits per event (characters plus one end event per
    sample) under a smoothed trigram model of the reference stems. The
    model's vocabulary is the union of the characters seen on either side,
    so unseen symbols cost smoothed rather than infinite bits.
    """
    if not samples:
        raise DataError("cannot score an empty sample set")
    if smoothing <= 0:
        raise DataError("smoothing must be positive to keep cross-entropy finite")
    vocab = set("".join(reference_stems)) | set("".join(samples))
    model = halluc.trigram_fit(reference_stems, smoothing=smoothing,
                               vocab=tuple(sorted(vocab)))
    total_bits = 0.0
    events = 0
    histogram: dict[int, int] = {}
    for s in samples:
        total_bits += model.bits(s)
        events += len(s) + 1
        histogram[len(s)] = histogram.get(len(s), 0) + 1
    return QualityReport(
        cross_entropy=total_bits / events,
        uniqueness=len(set(samples)) / len(samples),
        length_histogram=dict(sorted(histogram.items())),
    )
