"""Shared fixtures: paths, a tiny corpus, and the synthetic CV language."""

from pathlib import Path

import numpy as np
import pytest

from graphotact import corpus

DATA_DIR = Path(__file__).parent / "data"

CONSONANTS = "bdgkt"
VOWELS = "aeiou"


def cv_stems(n: int = 100, seed: int = 11) -> list[str]:
    """Stems that strictly alternate consonant/vowel starting with a
    consonant, lengths cycling 3 through 6."""
    rng = np.random.default_rng(seed)
    out = []
    for k in range(n):
        length = 3 + k % 4
        out.append("".join(
            (CONSONANTS if i % 2 == 0 else VOWELS)[rng.integers(0, 5)]
            for i in range(length)
        ))
    return out


def is_cv(s: str) -> bool:
    """Length at least 3, consonant first, strict class alternation."""
    if len(s) < 3:
        return False
    return all(ch in (CONSONANTS if i % 2 == 0 else VOWELS)
               for i, ch in enumerate(s))


def cv_alphabet() -> corpus.Alphabet:
    return corpus.Alphabet(("0", *sorted(CONSONANTS + VOWELS)))


@pytest.fixture(scope="session")
def toyglot_path() -> Path:
    return DATA_DIR / "toyglot-train-low"


@pytest.fixture(scope="session")
def toyglot(toyglot_path) -> corpus.Dataset:
    return corpus.load_dataset(toyglot_path, language="toyglot")


@pytest.fixture()
def mini_dataset() -> corpus.Dataset:
    triples = [
        corpus.Triple("walk", "walked", ("V", "PST")),
        corpus.Triple("touch", "touching", ("V", "V.PTCP", "PRS")),
        corpus.Triple("tima", "timta", ("V", "PST")),
        corpus.Triple("kura", "kurmi", ("V", "PRS")),
        corpus.Triple("nasi", "nasisu", ("ADJ", "CMPR")),
        corpus.Triple("sipa", "pasipa", ("N", "PL")),
    ]
    return corpus.Dataset(language="mini", triples=triples)
