"""Exception hierarchy shared by all vidsearch modules."""


class VidsearchError(Exception):
    """Base class for all vidsearch errors."""


class DegenerateInput(VidsearchError):
    """Input data cannot support the requested estimation (too few samples, zero spread)."""


class EmptyInput(VidsearchError):
    """An operation that requires at least one element received none."""


class DimensionMismatch(VidsearchError):
    """Vector length differs from the space or provider dimension."""


class DuplicateId(VidsearchError):
    """A keyframe id was added twice to the same space."""


class ZeroVector(VidsearchError):
    """A zero vector cannot be normalized or used as a query."""


class FormatError(VidsearchError):
    """A binary file has a bad magic number, version, or is truncated."""


class ManifestError(VidsearchError):
    """Corpus manifest validation failure; message names the offending file/record."""


class MixedSpaces(VidsearchError):
    """Fusion over ranked lists whose origins declare different embedding spaces."""


class UnknownColorTerm(VidsearchError):
    """Color label outside the 11-term palette."""


class ProviderUnavailable(VidsearchError):
    """A mandatory external provider (embedder) could not be reached."""


class QueryError(VidsearchError):
    """Malformed search request (maps to HTTP 400 in the service)."""
