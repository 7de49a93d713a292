"""Unimorph-style corpus ingestion and per-language alphabet derivation.

Input files are 3-column tab-separated UTF-8 text, one record per line:
lemma, inflected form, semicolon-joined morphological tags. Re-serializing
a parsed dataset reproduces the source lines byte for byte (modulo the
trailing newline).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

from .errors import DataError, MalformedRowError, PadCollisionError, UnknownSymbolError

log = logging.getLogger(__name__)

EXPECTED_TRAIN_LOW_SIZE = 100

# The pad renders as '0' unless the language really uses '0' as a character,
# in which case it falls back to the visible null symbol.
PAD_GLYPH_CANDIDATES = ("0", "␀")


@dataclass(frozen=True)
class Triple:
    """One inflection example: lemma, inflected form, tag bundle."""

    lemma: str
    form: str
    tags: tuple[str, ...]

    def to_line(self) -> str:
        return f"{self.lemma}\t{self.form}\t{';'.join(self.tags)}"


@dataclass
class Dataset:
    """An ordered collection of triples for one language."""

    language: str
    triples: list[Triple]

    def __len__(self) -> int:
        return len(self.triples)

    def __iter__(self):
        return iter(self.triples)

    def to_text(self) -> str:
        if not self.triples:
            return ""
        return "\n".join(t.to_line() for t in self.triples) + "\n"


@dataclass(frozen=True)
class Alphabet:
    """Indexed character inventory with the reserved pad symbol at index 0.

    symbols[0] is the pad glyph; symbols[1:] are the real characters,
    unique and sorted by code point. Real stems never contain the pad.
    """

    symbols: tuple[str, ...]

    def __post_init__(self):
        if not self.symbols:
            raise DataError("alphabet needs at least the pad symbol")
        real = self.symbols[1:]
        if len(set(real)) != len(real):
            raise DataError("duplicate symbols in alphabet")
        if self.symbols[0] in real:
            raise PadCollisionError(
                f"pad glyph {self.symbols[0]!r} collides with a real symbol"
            )

    @cached_property
    def _index(self) -> dict[str, int]:
        return {ch: i for i, ch in enumerate(self.symbols[1:], start=1)}

    @property
    def pad_glyph(self) -> str:
        return self.symbols[0]

    @property
    def real_symbols(self) -> tuple[str, ...]:
        return self.symbols[1:]

    def __len__(self) -> int:
        return len(self.symbols)

    def index_of(self, ch: str) -> int:
        """Index of a real character; the pad is not addressable by glyph."""
        try:
            return self._index[ch]
        except KeyError:
            raise UnknownSymbolError(f"character {ch!r} not in alphabet") from None

    def symbol_at(self, index: int) -> str:
        if not 0 <= index < len(self.symbols):
            raise UnknownSymbolError(f"index {index} outside alphabet")
        return self.symbols[index]

    def __contains__(self, ch: str) -> bool:
        return ch in self._index


def parse_row(line: str, line_no: int | None = None) -> Triple:
    """Parse one record. Trailing newline characters are ignored."""
    line = line.rstrip("\r\n")
    fields = line.split("\t")
    if len(fields) != 3:
        raise MalformedRowError(
            f"expected 3 tab-separated columns, got {len(fields)}", line_no
        )
    lemma, form, tags = fields
    if not lemma or not form or not tags:
        raise MalformedRowError("empty field", line_no)
    return Triple(lemma=lemma, form=form, tags=tuple(tags.split(";")))


def load_dataset(path: str | Path, language: str | None = None) -> Dataset:
    """Load a train-low file; every row must parse, order is preserved."""
    path = Path(path)
    if language is None:
        language = path.stem
    text = path.read_text(encoding="utf-8")
    lines = text.split("\n")
    while lines and lines[-1] == "":
        lines.pop()
    triples = [parse_row(line, line_no=i) for i, line in enumerate(lines, start=1)]
    if len(triples) != EXPECTED_TRAIN_LOW_SIZE:
        log.warning(
            "%s: %d examples (train-low sets usually have %d)",
            language,
            len(triples),
            EXPECTED_TRAIN_LOW_SIZE,
        )
    return Dataset(language=language, triples=triples)


def write_dataset(ds: Dataset, path: str | Path, provenance: str | None = None) -> None:
    """Serialize back to the 3-column format.

    With provenance, a 4th column carrying the tag is appended to every row;
    the default stays schema-identical to the input files.
    """
    lines = []
    for t in ds.triples:
        line = t.to_line()
        if provenance is not None:
            line = f"{line}\t{provenance}"
        lines.append(line)
    text = "\n".join(lines) + "\n" if lines else ""
    Path(path).write_text(text, encoding="utf-8")


def build_alphabet(ds: Dataset) -> Alphabet:
    """Union of all lemma and form characters, sorted, pad prefixed at index 0."""
    if not ds.triples:
        raise DataError("cannot build an alphabet from an empty dataset")
    chars = set()
    for t in ds.triples:
        chars.update(t.lemma)
        chars.update(t.form)
    for pad in PAD_GLYPH_CANDIDATES:
        if pad not in chars:
            return Alphabet(symbols=(pad, *sorted(chars)))
    raise PadCollisionError(
        f"dataset uses every candidate pad glyph {PAD_GLYPH_CANDIDATES!r}"
    )
