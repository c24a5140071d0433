"""Exception types shared across the package."""


class ChartGenError(Exception):
    """Base class for all package-specific errors."""


class TableError(ChartGenError):
    """A data table could not be parsed or fails a structural requirement."""


class SynthesisError(ChartGenError):
    """A chart specification could not be drawn from the given table."""


class RenderError(ChartGenError):
    """A chart specification could not be laid out or rendered."""


class QAError(ChartGenError):
    """A question could not be generated or its answer could not be derived."""


class EncodeError(ChartGenError):
    """A question or answer could not be encoded."""


class DecodeError(ChartGenError):
    """An answer vector or encoded question could not be decoded."""


class EvaluationError(ChartGenError):
    """Evaluation inputs are malformed or inconsistent."""


class CorpusError(ChartGenError):
    """Corpus build or validation failed."""


class ConfigError(ChartGenError):
    """A configuration file is missing required fields or has bad values."""
