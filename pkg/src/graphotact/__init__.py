"""Graphotactics learning and inflection-triple hallucination toolkit.

Pipeline: load a 100-example lemma/form/tags file, factor each pair around
its shared stem, train stem generators (uniform random, character trigram,
adversarial recurrent net), then splice generated stems back into the real
examples to emit artificial training triples.
"""

from .align import StemDecomposition, best_stem, stem_candidates, training_stems
from .corpus import Alphabet, Dataset, Triple, build_alphabet, load_dataset
from .errors import DataError, GraphotactError, NumericFault
from .gan import GanModel, TrainConfig, classify_regime, load_model, save_model, train
from .halluc import (
    GanStemGenerator,
    RandomStemGenerator,
    TrigramStemGenerator,
    clean,
    hallucinate,
    propose_stem,
    trigram_fit,
)
from .metrics import EvalReport, QualityReport, evaluate, levenshtein, sample_quality

__all__ = [
    "Alphabet",
    "Dataset",
    "DataError",
    "EvalReport",
    "GanModel",
    "GanStemGenerator",
    "GraphotactError",
    "NumericFault",
    "QualityReport",
    "RandomStemGenerator",
    "StemDecomposition",
    "TrainConfig",
    "TrigramStemGenerator",
    "Triple",
    "best_stem",
    "build_alphabet",
    "classify_regime",
    "clean",
    "evaluate",
    "hallucinate",
    "levenshtein",
    "load_dataset",
    "load_model",
    "propose_stem",
    "sample_quality",
    "save_model",
    "stem_candidates",
    "train",
    "training_stems",
    "trigram_fit",
]

__version__ = "0.1.0"
