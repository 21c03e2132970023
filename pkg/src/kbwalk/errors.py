"""Exception hierarchy shared across the package."""


class KbwalkError(Exception):
    """Base class for all package errors."""


class IngestError(KbwalkError):
    """Corpus could not be ingested (empty file, zero accepted rows, ...)."""


class LookupError_(KbwalkError):
    """Unknown concept or sentence id."""


class ProviderError(KbwalkError):
    """Embedding / inference / entailment backend failure."""


class DimensionMismatch(KbwalkError):
    """Vector operands of unequal dimension."""


class SearchError(KbwalkError):
    """Tree search could not start or finish."""

    def __init__(self, message, missing_concepts=()):
        super().__init__(message)
        self.missing_concepts = tuple(missing_concepts)


class PipelineStageError(KbwalkError):
    """Wraps a failure with the pipeline stage it occurred in."""

    def __init__(self, stage, cause):
        super().__init__(f"[{stage}] {cause}")
        self.stage = stage
        self.cause = cause
