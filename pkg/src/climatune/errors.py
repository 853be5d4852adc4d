"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: usage 2, data 3, model 4, I/O 5.
"""


class ClimatuneError(Exception):
    """Base class for all errors raised by this package."""


class UsageError(ClimatuneError):
    """Bad command-line arguments or malformed query parameters."""


class DataError(ClimatuneError):
    """Corpus or climate input that cannot be ingested."""


class MusicXmlError(DataError):
    """Malformed or empty MusicXML document."""


class ClimateDataError(DataError):
    """Malformed climate CSV or an unknown/degenerate year."""


class ModelError(ClimatuneError):
    """Shape mismatches, vocabulary mismatches, bad checkpoints."""


class CheckpointError(ModelError):
    """Checkpoint file is truncated, corrupted, or incompatible."""
