"""Artificial stem generators, output cleaning, and the splicing pipeline.

Three generators sit behind one contract: propose(length, rng) returns a
pad-free string over the real alphabet of exactly the requested length.
The pipeline swaps each base example's stem for a proposed one in both the
lemma and the inflected form, copying the tags verbatim, and emits 10,000
artificial triples per run.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from . import codec, gan
from .align import stem_candidates
from .corpus import Alphabet, Dataset, Triple
from .errors import DataError, GenerationExhaustedError

log = logging.getLogger(__name__)

RETRY_LIMIT = 50
MAX_RUN = 2

# Multi-character sentinels cannot collide with any single-character symbol.
BEGIN = "<s>"
END = "</s>"


def clean(raw: str, target_len: int, pad_glyph: str = "0") -> str:
    """Apply the cleaning rules in order: cut at the first pad glyph from
    the left, collapse any run of more than two identical characters to
    two, then truncate to the target length. May return an empty string."""
    if target_len < 1:
        raise ValueError("target length must be >= 1")
    kept = raw.split(pad_glyph, 1)[0]
    collapsed: list[str] = []
    run = 0
    for ch in kept:
        run = run + 1 if collapsed and collapsed[-1] == ch else 1
        if run <= MAX_RUN:
            collapsed.append(ch)
    return "".join(collapsed[:target_len])


def random_stem(alphabet: Alphabet, length: int, rng: np.random.Generator) -> str:
    """Characters drawn i.i.d. uniformly over the real alphabet (no pad)."""
    if length < 1:
        raise DataError("stem length must be >= 1")
    symbols = alphabet.real_symbols
    picks = rng.integers(0, len(symbols), size=length)
    return "".join(symbols[i] for i in picks)


class TrigramModel:
    """Character trigram counts with add-k smoothing over alphabet + end.

    Contexts are pairs padded with two begin markers; every stem contributes
    one end-marker transition. Smoothing spreads mass over the model's
    vocabulary plus the end marker, so with k > 0 every continuation has
    nonzero probability.
    """

    def __init__(self, counts: dict, vocab: tuple[str, ...], smoothing: float):
        self.counts = counts
        self.vocab = vocab
        self.smoothing = smoothing
        self._choices = vocab + (END,)

    def probability(self, context: tuple[str, str], symbol: str) -> float:
        row = self.counts.get(context, {})
        total = sum(row.values())
        k = self.smoothing
        denom = total + k * len(self._choices)
        if denom == 0.0:
            raise DataError(f"no mass for context {context!r} with smoothing 0")
        if symbol != END and symbol not in self.vocab:
            return 0.0
        return (row.get(symbol, 0) + k) / denom

    def distribution(self, context: tuple[str, str]) -> np.ndarray:
        row = self.counts.get(context, {})
        counts = np.array([row.get(s, 0) for s in self._choices], dtype=float)
        counts += self.smoothing
        total = counts.sum()
        if total == 0.0:
            raise DataError(f"no mass for context {context!r} with smoothing 0")
        return counts / total

    def bits(self, stem: str) -> float:
        """Total negative log2 probability of the stem including its end
        event; infinite if any event has zero probability."""
        total = 0.0
        context = (BEGIN, BEGIN)
        for symbol in (*stem, END):
            p = self.probability(context, symbol)
            if p == 0.0:
                return float("inf")
            total -= float(np.log2(p))
            context = (context[1], symbol)
        return total


def trigram_fit(stems: list[str], smoothing: float = 0.1,
                vocab: tuple[str, ...] | None = None) -> TrigramModel:
    """Count all (c-2, c-1) -> c transitions over the stems.

    vocab defaults to the characters observed in the stems; pass the real
    alphabet to smooth over symbols the stems happen to miss.
    """
    if not stems:
        raise DataError("cannot fit a trigram model on an empty corpus")
    if smoothing < 0:
        raise DataError("smoothing must be non-negative")
    observed = set()
    for s in stems:
        observed.update(s)
    if vocab is None:
        vocab = tuple(sorted(observed))
    else:
        vocab = tuple(vocab)
        missing = observed - set(vocab)
        if missing:
            raise DataError(f"stems use symbols outside the vocabulary: {sorted(missing)!r}")
    counts: dict[tuple[str, str], dict[str, int]] = {}
    for s in stems:
        seq = [BEGIN, BEGIN, *s, END]
        for i in range(2, len(seq)):
            context = (seq[i - 2], seq[i - 1])
            row = counts.setdefault(context, {})
            row[seq[i]] = row.get(seq[i], 0) + 1
    return TrigramModel(counts, vocab, smoothing)


def trigram_sample(model: TrigramModel, rng: np.random.Generator,
                   max_len: int = codec.FRAME_LEN) -> str:
    """Ancestral sampling until the end marker or max_len characters."""
    out: list[str] = []
    context = (BEGIN, BEGIN)
    while len(out) < max_len:
        probs = model.distribution(context)
        draw = int(np.searchsorted(np.cumsum(probs), rng.random()))
        draw = min(draw, len(probs) - 1)
        symbol = model._choices[draw]
        if symbol == END:
            break
        out.append(symbol)
        context = (context[1], symbol)
    return "".join(out)


@dataclass
class RandomStemGenerator:
    """Uniform random characters of exactly the requested length."""

    alphabet: Alphabet
    method: str = "random"

    def propose(self, length: int, rng: np.random.Generator) -> str:
        return random_stem(self.alphabet, length, rng)


@dataclass
class TrigramStemGenerator:
    """Samples the trigram chain until a draw reaches the requested length.

    Up to 50 draws are tried; a long-enough draw is truncated to length.
    If none reaches it, the non-empty draws are concatenated as a last
    resort before giving up.
    """

    model: TrigramModel
    method: str = "trigram"

    def propose(self, length: int, rng: np.random.Generator) -> str:
        if length < 1:
            raise DataError("stem length must be >= 1")
        pieces: list[str] = []
        for _ in range(RETRY_LIMIT):
            s = trigram_sample(self.model, rng)
            if len(s) >= length:
                return s[:length]
            if s:
                pieces.append(s)
        joined = "".join(pieces)
        if len(joined) >= length:
            return joined[:length]
        raise GenerationExhaustedError(
            f"trigram generator produced no length-{length} stem in {RETRY_LIMIT} draws"
        )


class GanStemGenerator:
    """Cleans raw model output down to usable stems.

    Raw samples are drawn in batches for speed and consumed one at a time;
    each is cleaned, empties are skipped, and short pieces are concatenated
    until the requested length is covered. The retry budget is 50 raw
    samples per proposal.
    """

    method = "gan"

    def __init__(self, model: gan.GanModel, batch: int = 256):
        self.model = model
        self.batch = batch
        self._buffer: list[str] = []

    def _next_raw(self, rng: np.random.Generator) -> str:
        if not self._buffer:
            self._buffer = gan.sample_raw(self.model, self.batch, rng)
            self._buffer.reverse()
        return self._buffer.pop()

    def propose(self, length: int, rng: np.random.Generator) -> str:
        if length < 1:
            raise DataError("stem length must be >= 1")
        pad = self.model.alphabet.pad_glyph
        acc = ""
        for _ in range(RETRY_LIMIT):
            piece = clean(self._next_raw(rng), length, pad_glyph=pad)
            acc += piece
            if len(acc) >= length:
                return acc[:length]
        raise GenerationExhaustedError(
            f"model produced no usable stem of length {length} in {RETRY_LIMIT} samples"
        )


StemGenerator = RandomStemGenerator | TrigramStemGenerator | GanStemGenerator


def propose_stem(generator: StemGenerator, target_len: int,
                 rng: np.random.Generator) -> str:
    """A pad-free stem of exactly target_len from any of the three methods."""
    return generator.propose(target_len, rng)


def hallucinate(ds: Dataset, generator: StemGenerator, n: int = 10000, *,
                rng: np.random.Generator) -> Dataset:
    """n artificial triples built by stem replacement.

    Base triples are sampled uniformly with replacement from the alignable
    ones; each proposal replaces the stem in both the lemma and the form,
    keeping all affixes and tags from the base triple.
    """
    if n < 0:
        raise DataError("n must be non-negative")
    bases = []
    for t in ds:
        candidates = stem_candidates(t.lemma, t.form)
        if candidates:
            bases.append((t, candidates[0]))
        else:
            log.warning("%s: %r / %r not alignable, never used as a base",
                        ds.language, t.lemma, t.form)
    if not bases:
        raise DataError(f"{ds.language}: no alignable triples to hallucinate from")
    triples = []
    for _ in range(n):
        base, d = bases[int(rng.integers(0, len(bases)))]
        stem = generator.propose(len(d.stem), rng)
        triples.append(Triple(
            lemma=d.lemma_prefix + stem + d.lemma_suffix,
            form=d.form_prefix + stem + d.form_suffix,
            tags=base.tags,
        ))
    return Dataset(language=ds.language, triples=triples)
