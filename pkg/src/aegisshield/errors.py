"""Exception types shared across the package."""

from __future__ import annotations


class AegisError(Exception):
    """Base class for all package errors."""


class ValidationError(AegisError):
    """One or more field-addressed validation failures.

    ``errors`` is a list of (code, field, message) tuples so callers can
    surface every problem at once instead of failing on the first.
    """

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(f"{code}[{field}]: {msg}" for code, field, msg in self.errors))


class OutOfRangeError(AegisError):
    """A DREAD dimension fell outside [1, 10]."""


class TransportError(AegisError):
    """Network-level failure; retryable."""


class TimeoutError_(TransportError):
    """Request timed out; retryable."""


class RateLimitedError(AegisError):
    """Upstream returned 429 after backoff was exhausted."""


class QuotaExceededError(AegisError):
    """Upstream rejected the request for quota reasons."""


class AuthFailedError(AegisError):
    """Upstream rejected the configured credentials."""


class ProviderRefusedError(AegisError):
    """The completion provider rejected the request (non-retryable 4xx)."""


class MissingBindingError(AegisError):
    """A prompt placeholder had no binding."""

    def __init__(self, name):
        self.name = name
        super().__init__(f"no binding for placeholder {name!r}")


class NoParsableObjectError(AegisError):
    """No balanced JSON object/array could be located in the raw text."""

    def __init__(self, raw):
        self.raw = raw
        super().__init__("no parsable JSON object in provider output")


class SchemaViolationError(AegisError):
    """Parsed JSON did not match the expected shape."""

    def __init__(self, path, message):
        self.path = path
        super().__init__(f"at {path}: {message}")


class GenerationFailedError(AegisError):
    """A pipeline stage could not produce a valid artifact after retries."""


class NotMermaidError(AegisError):
    """Attack-tree output did not begin with a mermaid ``graph`` header."""


class FileMissingError(AegisError):
    """A required input file does not exist."""


class MalformedBundleError(AegisError):
    """A STIX bundle could not be parsed; carries the offending object index."""

    def __init__(self, message, object_index=None):
        self.object_index = object_index
        super().__init__(message)


class NotFoundError(AegisError):
    """A well-formed id was not present in the knowledge base."""


class RenderFailedError(AegisError):
    """PDF rendering failed."""


class IoError(AegisError):
    """Run persistence failed at the filesystem level."""


class SchemaVersionMismatchError(AegisError):
    """Persisted run has an incompatible schema version."""

    def __init__(self, found, supported):
        self.found = found
        self.supported = supported
        super().__init__(
            f"run file has schema version {found}, this build supports {supported}; "
            "re-generate the run or upgrade the package"
        )


class MissingLlmKeyError(AegisError):
    """Session creation without an LLM key."""


class EmptyTextError(AegisError):
    """Text input contained no words."""


class TooFewSamplesError(AegisError):
    """Not enough observations for the requested statistic."""


class EmptySampleError(AegisError):
    """A statistical sample was empty."""


class NonPositiveError(AegisError):
    """Box-Cox input contained non-positive values and shifting was off."""


class BadInputError(AegisError):
    """Proportion-test arguments were out of range."""


class DimensionMismatchError(AegisError):
    """Vectors of different lengths."""


class ZeroVectorError(AegisError):
    """Cosine similarity with a zero vector."""


class DegenerateInputError(AegisError):
    """Correlation input too short or with zero variance."""


class NoComparablePairsError(AegisError):
    """Similarity analysis found no same-category tool/expert pair."""
