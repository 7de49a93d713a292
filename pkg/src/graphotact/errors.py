"""Exception types shared across the toolkit.

The CLI maps these onto exit codes: usage errors exit 1, DataError and
its subclasses exit 2, NumericFault exits 3.
"""


class GraphotactError(Exception):
    """Base class for all toolkit errors."""


class DataError(GraphotactError):
    """Malformed, missing, or unusable input data."""


class MalformedRowError(DataError):
    """A corpus row that does not have three non-empty tab-separated fields."""

    def __init__(self, message, line_no=None):
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)
        self.line_no = line_no


class PadCollisionError(DataError):
    """No pad glyph is available: the data uses every candidate glyph."""


class NoCommonStemError(DataError):
    """Lemma and form share no character, so no stem can be extracted."""


class OverlongStemError(DataError):
    """Stem does not fit the fixed encoding frame."""


class UnknownSymbolError(DataError):
    """Character not present in the alphabet."""


class EmptyTrainingSetError(DataError):
    """No usable training stems remain after filtering."""


class GenerationExhaustedError(DataError):
    """A stem generator failed to produce usable output within its retry budget."""


class MissingModelError(DataError):
    """An operation that needs a trained model checkpoint was run without one."""


class CheckpointError(DataError):
    """Checkpoint file is corrupt or has an unsupported version."""


class NumericFault(GraphotactError):
    """Non-finite value encountered during numeric computation."""

    def __init__(self, message, step=None):
        if step is not None:
            message = f"step {step}: {message}"
        super().__init__(message)
        self.step = step
