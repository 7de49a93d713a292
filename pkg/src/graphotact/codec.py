"""Convert stems to and from fixed-shape one-hot sequence matrices.

Every stem occupies a 10-slot frame; slots past the end of the stem hold
the pad class (index 0). The pad is a real one-hot class, not a zero row,
so a generator softmax can emit it.
"""

from __future__ import annotations

import io

import numpy as np

from .corpus import Alphabet
from .errors import DataError, OverlongStemError

FRAME_LEN = 10


def encode_stem(stem: str, alphabet: Alphabet) -> np.ndarray:
    """One-hot rows for each character, pad rows after, shape (10, V)."""
    if len(stem) > FRAME_LEN:
        raise OverlongStemError(
            f"stem {stem!r} has {len(stem)} characters, frame is {FRAME_LEN}"
        )
    seq = np.zeros((FRAME_LEN, len(alphabet)))
    for t, ch in enumerate(stem):
        seq[t, alphabet.index_of(ch)] = 1.0
    seq[len(stem):, 0] = 1.0
    return seq


def decode(seq: np.ndarray, alphabet: Alphabet) -> str:
    """Per-row argmax mapped back to symbols; ties resolve to the lowest index.

    Pad rows render as the pad glyph; no truncation happens here (cleaning
    is a separate stage).
    """
    if seq.ndim != 2 or seq.shape[1] != len(alphabet):
        raise DataError(
            f"sequence shape {seq.shape} does not match alphabet size {len(alphabet)}"
        )
    return "".join(alphabet.symbol_at(int(i)) for i in seq.argmax(axis=1))


def strip_pad(raw: str, pad_glyph: str = "0") -> str:
    """Remove the maximal trailing run of pad glyphs."""
    return raw.rstrip(pad_glyph)


def tensor_csv(seq: np.ndarray) -> str:
    """Debug dump of a sequence tensor as CSV rows."""
    buf = io.StringIO()
    for row in np.atleast_2d(seq):
        buf.write(",".join(repr(float(v)) for v in row))
        buf.write("\n")
    return buf.getvalue()
