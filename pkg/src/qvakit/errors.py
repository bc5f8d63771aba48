"""Error kinds raised by the library.

Every error carries a short ``kind`` string so the CLI can report it without
matching on class names.
"""


class QvaError(Exception):
    kind = "error"


class OrderMismatch(QvaError):
    kind = "order-mismatch"


class NonInvertible(QvaError):
    kind = "non-invertible"


class PoleAtSample(QvaError):
    """A spectral argument hit a pole; the caller should draw a new sample."""

    kind = "pole-at-sample"


class TruncationDepth(QvaError):
    kind = "truncation-depth"


class DegreeBoundExceeded(QvaError):
    kind = "degree-bound-exceeded"


class InternalConsistency(QvaError):
    kind = "internal-consistency"


class UnsupportedKind(QvaError):
    kind = "unsupported-kind"


class EmbeddingError(QvaError):
    kind = "embedding"


class ShapeMismatch(QvaError):
    kind = "shape-mismatch"


class UnsupportedN(QvaError):
    kind = "unsupported-n"


class UnsupportedFamily(QvaError):
    kind = "unsupported-family"


class UsageError(QvaError):
    kind = "usage"


class ParseError(QvaError):
    kind = "parse"
