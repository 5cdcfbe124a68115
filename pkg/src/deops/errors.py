"""Exception hierarchy shared by all deops modules."""


class DeopsError(Exception):
    """Base class for every error raised by this package."""


class ConfigError(DeopsError, ValueError):
    """A parameter or configuration value is out of range or inconsistent."""


class IngestError(DeopsError):
    """Raw corpus text could not be decoded or read."""

    def __init__(self, message, line_number=None):
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)
        self.line_number = line_number


class EmptyCorpusError(DeopsError):
    """The input contained no non-empty lines."""


class NoContextsError(DeopsError):
    """Scoring was asked to run over zero contexts."""


class SeedCoverageError(NoContextsError):
    """None of the clue tokens produced a context in the corpus."""

    def __init__(self, missing):
        self.missing = tuple(missing)
        super().__init__(
            "no contexts found for clue tokens: " + ", ".join(self.missing)
        )


class RankRangeError(DeopsError, IndexError):
    """A cutoff k exceeds the length of the ranked list."""


class LabelParseError(DeopsError, ValueError):
    def __init__(self, message, line_number=None):
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)
        self.line_number = line_number


class SynthSpecError(DeopsError, ValueError):
    """A synthetic corpus specification is degenerate."""


class CacheError(DeopsError):
    """An index cache file is unreadable, corrupt, or keyed to other input."""
