"""Factor (lemma, form) pairs into prefix/stem/suffix around a shared stem.

Candidates are the maximal common contiguous substrings of the two words,
ranked by length (longest first), then by leftmost occurrence in the form,
then leftmost in the lemma. The first candidate is taken as the stem.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

from .corpus import Dataset
from .errors import DataError, NoCommonStemError

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class StemDecomposition:
    """A (prefix, stem, suffix) factoring of both lemma and form."""

    lemma_prefix: str
    stem: str
    lemma_suffix: str
    form_prefix: str
    form_suffix: str

    @property
    def lemma(self) -> str:
        return self.lemma_prefix + self.stem + self.lemma_suffix

    @property
    def form(self) -> str:
        return self.form_prefix + self.stem + self.form_suffix


def stem_candidates(lemma: str, form: str) -> list[StemDecomposition]:
    """All maximal common-substring decompositions, best first.

    Returns an empty list when the two strings share no character
    (the pair is then excluded from stem training but can still be
    copied through by the augmentation pipeline).
    """
    if not lemma or not form:
        raise DataError("stem alignment needs non-empty lemma and form")
    m, n = len(lemma), len(form)
    # match[i][j] = length of the longest common suffix of lemma[:i+1], form[:j+1]
    match = [[0] * n for _ in range(m)]
    occurrences = []  # (length, form_start, lemma_start)
    for i in range(m):
        for j in range(n):
            if lemma[i] != form[j]:
                continue
            length = 1 + (match[i - 1][j - 1] if i > 0 and j > 0 else 0)
            match[i][j] = length
            extendable = i + 1 < m and j + 1 < n and lemma[i + 1] == form[j + 1]
            if not extendable:
                occurrences.append((length, j - length + 1, i - length + 1))
    occurrences.sort(key=lambda occ: (-occ[0], occ[1], occ[2]))
    return [
        StemDecomposition(
            lemma_prefix=lemma[:li],
            stem=lemma[li : li + length],
            lemma_suffix=lemma[li + length :],
            form_prefix=form[:fi],
            form_suffix=form[fi + length :],
        )
        for length, fi, li in occurrences
    ]


def best_stem(lemma: str, form: str) -> StemDecomposition:
    """The first-ranked candidate, assumed to be the true stem."""
    candidates = stem_candidates(lemma, form)
    if not candidates:
        raise NoCommonStemError(f"{lemma!r} and {form!r} share no character")
    return candidates[0]


def training_stems(ds: Dataset) -> list[str]:
    """One stem per alignable triple, duplicates retained, file order kept."""
    stems = []
    for t in ds:
        candidates = stem_candidates(t.lemma, t.form)
        if not candidates:
            log.warning(
                "%s: no common stem for %r / %r, pair skipped",
                ds.language,
                t.lemma,
                t.form,
            )
            continue
        stems.append(candidates[0].stem)
    return stems


def alignment_rows(ds: Dataset):
    """6-column rows for the align TSV; unalignable pairs are skipped.

    Columns: lemma, form, lemma_prefix, stem, form_prefix, and the two
    suffixes merged as form_suffix|lemma_suffix (see the format reference
    in the README).
    """
    for t in ds:
        candidates = stem_candidates(t.lemma, t.form)
        if not candidates:
            log.warning(
                "%s: no common stem for %r / %r, row skipped",
                ds.language,
                t.lemma,
                t.form,
            )
            continue
        d = candidates[0]
        yield (
            t.lemma,
            t.form,
            d.lemma_prefix,
            d.stem,
            d.form_prefix,
            f"{d.form_suffix}|{d.lemma_suffix}",
        )
